"""
Bundle I/O - đọc/ghi category, algebra, diagram và module bundle (JSON)

Một bundle có thể tham chiếu file khác bằng đường dẫn tương đối (key
"category", "algebras.<obj>", "diagram"); inline_bundle() thay mọi tham
chiếu bằng nội dung để dùng làm input của content hash.

Mọi ma trận là row-major: hàng = basis của đích, cột = basis của nguồn.
"""
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from .algkit import (
    Algebra, LeftModule, PeirceData, SABimodule, algebra_from_table, validate_bimodule,
    validate_left_module,
)
from .diagram import (
    DiagModule, Diagram, regular_diagram_bimodule, regular_diagram_module, validate_diag_module,
    validate_diagram,
)
from .errors import BundleFormatError, FieldError
from .exalg import Field, Mat
from .fincat import FinCat, category_to_dict, validate_category
from .task_defs import canonical_json
from .utils import atomic_write_text

PathLike = Union[str, Path]
REFERENCE_KEYS = ("category", "diagram")


# ============ RAW JSON ============

def read_json(path: PathLike) -> Any:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise BundleFormatError(p, f"cannot read file: {e.strerror or e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise BundleFormatError(p, f"line {e.lineno} column {e.colno}: {e.msg}") from e


def write_json(path: PathLike, payload: Any) -> Path:
    return atomic_write_text(path, canonical_json(payload))


def _load_ref(ref: Any, base_dir: Path) -> Any:
    if isinstance(ref, str):
        target = (base_dir / ref)
        return inline_bundle(target)
    return ref


def inline_bundle(path: PathLike) -> Dict[str, Any]:
    """JSON của bundle với mọi tham chiếu file đã được thay bằng nội dung"""
    p = Path(path)
    data = read_json(p)
    if not isinstance(data, dict):
        raise BundleFormatError(p, "top-level value must be an object")
    base_dir = p.parent
    for key in REFERENCE_KEYS:
        if key in data:
            data[key] = _load_ref(data[key], base_dir)
    if isinstance(data.get("algebras"), dict):
        data["algebras"] = {obj: _load_ref(ref, base_dir) for obj, ref in data["algebras"].items()}
    return data


def bundle_kind(data: Mapping[str, Any]) -> str:
    """category | algebra | diagram | module"""
    if "fibers" in data or "regular" in data:
        return "module"
    if "algebras" in data:
        return "diagram"
    if "mul" in data or "unit" in data:
        return "algebra"
    if "objects" in data:
        return "category"
    raise BundleFormatError(data.get("name", "<bundle>"), "cannot tell the bundle kind from its keys")


# ============ FIELD HELPERS ============

def resolve_field(data: Mapping[str, Any], modulus: Optional[int] = None) -> Field:
    """--mod thắng giá trị "field" trong file; mặc định QQ"""
    if modulus:
        return Field(modulus)
    return Field.parse(data.get("field"))


def parse_matrix(field: Field, rows: Any, shape: Sequence[int], where: str, origin: str) -> Mat:
    nrows, ncols = shape
    if not isinstance(rows, list) or len(rows) != nrows or any(
            not isinstance(r, list) or len(r) != ncols for r in rows):
        raise BundleFormatError(origin, f"field '{where}': expected a {nrows}x{ncols} matrix")
    try:
        return Mat.from_rows(field, rows, ncols)
    except FieldError as e:
        raise BundleFormatError(origin, f"field '{where}': {e}") from e


def _require(data: Mapping[str, Any], key: str, origin: str, where: str = "") -> Any:
    if key not in data:
        raise BundleFormatError(origin, f"missing field '{where + key}'")
    return data[key]


def _basis_check(data: Mapping[str, Any], dim: int, origin: str, where: str):
    basis = data.get("basis")
    if basis is not None and len(basis) != dim:
        raise BundleFormatError(origin, f"field '{where}basis': {len(basis)} labels for dimension {dim}")


# ============ CATEGORY ============

def category_from_data(data: Mapping[str, Any]) -> FinCat:
    return validate_category(data)


def load_category(path: PathLike) -> FinCat:
    return category_from_data(read_json(path))


def write_category(path: PathLike, cat: FinCat) -> Path:
    return write_json(path, category_to_dict(cat))


# ============ ALGEBRA ============

def algebra_from_data(data: Mapping[str, Any], field: Field, origin: str = "<algebra>") -> Algebra:
    """
    {"dim": n, "unit": [...], "mul": [{"i": a, "j": b, "coeffs": [...]}],
     "peirce": {"idempotents": [[...]], "blocks": [[h, l], ...]}}
    """
    dim = _require(data, "dim", origin)
    if not isinstance(dim, int) or dim < 1:
        raise BundleFormatError(origin, f"field 'dim': expected a positive integer, got {dim!r}")
    _basis_check(data, dim, origin, "")
    table = {}
    for k, entry in enumerate(data.get("mul", [])):
        try:
            table[(int(entry["i"]), int(entry["j"]))] = list(entry["coeffs"])
        except (KeyError, TypeError, ValueError) as e:
            raise BundleFormatError(origin, f"field 'mul[{k}]': malformed entry ({e})") from e
    unit = _require(data, "unit", origin)
    if not isinstance(unit, list) or len(unit) != dim:
        raise BundleFormatError(origin, f"field 'unit': expected {dim} coefficients")
    peirce = None
    if "peirce" in data:
        raw = data["peirce"]
        try:
            peirce = PeirceData(
                tuple(tuple(field.scalar(c) for c in e) for e in raw["idempotents"]),
                tuple((int(h), int(l)) for h, l in raw["blocks"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise BundleFormatError(origin, f"field 'peirce': malformed ({e})") from e
    return algebra_from_table(field, dim, table, unit, str(data.get("name", "")), peirce)


def algebra_to_data(alg: Algebra) -> Dict[str, Any]:
    export = alg.field.export
    mul = []
    for a in range(alg.dim):
        for b in range(alg.dim):
            prod = alg.products[a][b]
            if prod:
                coeffs = [export(prod.get(k, alg.field.zero)) for k in range(alg.dim)]
                mul.append({"i": a, "j": b, "coeffs": coeffs})
    data = {
        "name": alg.name,
        "field": alg.field.name,
        "dim": alg.dim,
        "unit": [export(u) for u in alg.unit],
        "mul": mul,
    }
    if alg.peirce is not None:
        data["peirce"] = {
            "idempotents": [[export(c) for c in e] for e in alg.peirce.idempotents],
            "blocks": [list(b) for b in alg.peirce.blocks],
        }
    return data


def load_algebra(path: PathLike, modulus: Optional[int] = None) -> Algebra:
    data = read_json(path)
    return algebra_from_data(data, resolve_field(data, modulus), str(path))


# ============ DIAGRAM ============

def diagram_from_data(data: Mapping[str, Any], modulus: Optional[int] = None,
                      origin: str = "<diagram>") -> Diagram:
    """
    {"category": ref|{...}, "algebras": {obj: ref|{...}}, "homs": {morphism: rows}}
    """
    field = resolve_field(data, modulus)
    base = category_from_data(_require(data, "category", origin))
    raw_algs = _require(data, "algebras", origin)
    algebras = {}
    for obj in base.objects:
        if obj not in raw_algs:
            raise BundleFormatError(origin, f"missing field 'algebras.{obj}'")
        algebras[obj] = algebra_from_data(raw_algs[obj], field, f"{origin}#algebras.{obj}")
    homs = {}
    for name, rows in data.get("homs", {}).items():
        if not base.has_morphism(name):
            raise BundleFormatError(origin, f"field 'homs.{name}': no such morphism")
        m = base.morphism(name)
        shape = (algebras[m.dom].dim, algebras[m.cod].dim)
        homs[name] = parse_matrix(field, rows, shape, f"homs.{name}", origin)
    return validate_diagram(base, algebras, homs, str(data.get("name", "")))


def diagram_to_data(diagram: Diagram) -> Dict[str, Any]:
    base = diagram.base
    return {
        "name": diagram.name,
        "field": diagram.field.name,
        "category": category_to_dict(base),
        "algebras": {x: algebra_to_data(diagram.algebra(x)) for x in base.objects},
        "homs": {v: diagram.phi(v).export_rows() for v in base.non_identity()},
    }


def load_diagram(path: PathLike, modulus: Optional[int] = None) -> Diagram:
    return diagram_from_data(inline_bundle(path), modulus, str(path))


# ============ MODULE / BIMODULE ============

def _actions(field: Field, raw: Any, count: int, dim: int, where: str, origin: str) -> List[Mat]:
    if not isinstance(raw, list) or len(raw) != count:
        raise BundleFormatError(origin, f"field '{where}': expected {count} action matrices")
    return [parse_matrix(field, rows, (dim, dim), f"{where}[{k}]", origin) for k, rows in enumerate(raw)]


def module_from_data(data: Mapping[str, Any], diagram: Optional[Diagram] = None,
                     modulus: Optional[int] = None, origin: str = "<module>") -> DiagModule:
    """
    {"diagram": ref|{...}, "kind": "bimodule"|"left", "regular": bool,
     "fibers": {obj: {"dim", "left": [...], "right": [...]}}, "transitions": {morphism: rows}}
    """
    if diagram is None:
        diagram = diagram_from_data(_require(data, "diagram", origin), modulus, f"{origin}#diagram")
    kind = data.get("kind", "bimodule")
    if kind not in ("bimodule", "left"):
        raise BundleFormatError(origin, f"field 'kind': expected 'bimodule' or 'left', got {kind!r}")
    if data.get("regular"):
        return regular_diagram_bimodule(diagram) if kind == "bimodule" else regular_diagram_module(diagram)

    field = diagram.field
    base = diagram.base
    raw_fibers = _require(data, "fibers", origin)
    fibers = {}
    for obj in base.objects:
        raw = raw_fibers.get(obj)
        if raw is None:
            raise BundleFormatError(origin, f"missing field 'fibers.{obj}'")
        dim = _require(raw, "dim", origin, f"fibers.{obj}.")
        _basis_check(raw, dim, origin, f"fibers.{obj}.")
        alg = diagram.algebra(obj)
        left = _actions(field, _require(raw, "left", origin, f"fibers.{obj}."), alg.dim, dim,
                        f"fibers.{obj}.left", origin)
        if kind == "bimodule":
            right = _actions(field, _require(raw, "right", origin, f"fibers.{obj}."), alg.dim, dim,
                             f"fibers.{obj}.right", origin)
            fibers[obj] = SABimodule(alg, dim, tuple(left), tuple(right), name=f"{obj}")
        else:
            fibers[obj] = LeftModule(alg, dim, tuple(left), name=f"{obj}")
    trans = {}
    for name, rows in data.get("transitions", {}).items():
        if not base.has_morphism(name):
            raise BundleFormatError(origin, f"field 'transitions.{name}': no such morphism")
        m = base.morphism(name)
        trans[name] = parse_matrix(field, rows, (fibers[m.dom].dim, fibers[m.cod].dim),
                                   f"transitions.{name}", origin)
    _check_fibers(fibers)
    return validate_diag_module(diagram, fibers, trans, str(data.get("name", "")))


def _check_fibers(fibers: Mapping[str, Union[LeftModule, SABimodule]]):
    """Module axioms của từng fiber"""
    for fib in fibers.values():
        if isinstance(fib, SABimodule):
            validate_bimodule(fib.algebra, fib.dim, fib.left, fib.right, fib.name)
        else:
            validate_left_module(fib.algebra, fib.dim, fib.left, fib.name)


def module_to_data(module: DiagModule) -> Dict[str, Any]:
    base = module.diagram.base
    fibers = {}
    for x in base.objects:
        fib = module.fiber(x)
        entry = {"dim": fib.dim, "left": [m.export_rows() for m in fib.left]}
        if isinstance(fib, SABimodule):
            entry["right"] = [m.export_rows() for m in fib.right]
        fibers[x] = entry
    return {
        "name": module.name,
        "kind": "bimodule" if module.is_bimodule else "left",
        "diagram": diagram_to_data(module.diagram),
        "fibers": fibers,
        "transitions": {v: module.T(v).export_rows() for v in base.non_identity()},
    }


def load_module(path: PathLike, diagram: Optional[Diagram] = None,
                modulus: Optional[int] = None) -> DiagModule:
    return module_from_data(inline_bundle(path), diagram, modulus, str(path))


@dataclass
class LoadedBundle:
    path: str
    kind: str
    data: Dict[str, Any]
    value: Any


def value_from_data(data: Mapping[str, Any], kind: str, modulus: Optional[int] = None,
                    origin: str = "<bundle>") -> Any:
    """Dựng object theo kind, chạy toàn bộ validator tương ứng"""
    if kind == "category":
        return category_from_data(data)
    if kind == "algebra":
        return algebra_from_data(data, resolve_field(data, modulus), origin)
    if kind == "diagram":
        return diagram_from_data(data, modulus, origin)
    return module_from_data(data, None, modulus, origin)


def load_any(path: PathLike, modulus: Optional[int] = None) -> LoadedBundle:
    """Đọc bundle bất kỳ"""
    data = inline_bundle(path)
    kind = bundle_kind(data)
    return LoadedBundle(str(path), kind, data, value_from_data(data, kind, modulus, str(path)))
