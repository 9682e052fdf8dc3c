"""
Check suites - kiểm chứng bằng số chính xác các mệnh đề của toolkit

Mỗi suite gồm:
    run(cfg)      -> (failures, witness) trên các instance curated/ngẫu nhiên
    controls(cfg) -> các instance bị làm hỏng có chủ đích; control đạt khi
                     lỗi cài sẵn bị phát hiện (raise CctError)
Report PASS chỉ khi không có failure và mọi control đều bắt được lỗi.
"""
import time
from dataclasses import dataclass, fields, replace
from typing import Any, Callable, Dict, List, Optional, Tuple

from .algkit import (
    SABimodule, bar_resolution_double_complex, bimodule_hom_space, regular_module, validate_algebra,
    validate_bimodule,
)
from .curated import (
    atom_complex, chain, constant_diagram, curated_diagrams, cyclic_group, detached_bimodule, dual_numbers,
    gcct_diagram, ground_algebra, p2, parallel_pair, random_chain_map, random_chain_module, random_delta,
    random_poset, random_subdivided_module, seeded,
)
from .diagram import (
    Pushforward, adjunction_data, bimodule_as_enveloping_module, direct_sum,
    hom_space, hom_space_bimod, maps_to_matrix, pullback_map, pullback_module,
    regular_diagram_bimodule, regular_diagram_module, shriek_algebra, shriek_bimodule,
    shriek_cohomology, shriek_map, subdivide_diagram, subdivide_module, validate_module_map,
)
from .errors import ConfigError, CctError, FieldError, UnknownCheckError
from .exalg import Field, Mat, rank
from .fincat import CatKind, FinCat, category_to_dict, classify, subdivide, validate_category, validate_functor
from .homalg import (
    ChainMap, Grading, Homotopy, build_cone_contraction, cone, contraction, contraction_defect,
    extract_homotopy_equivalence, is_quasi_isomorphism, is_relative_qiso, make_complex, total_complex,
    validate_chain_map,
)
from .logbus import get_log_bus
from .task_defs import CheckReport
from .utils import content_hash, elapsed_ms

Failures = List[Dict[str, Any]]


@dataclass
class SuiteConfig:
    """Tham số của một lần chạy check (từ CLI và --config JSON)"""
    seed: int = 1
    max_degree: int = 3
    modulus: int = 0
    instances: int = 0        # 0 = mặc định của suite
    size_cap: int = 20000
    corrupt: bool = False     # chạy instance bị làm hỏng thay cho instance thật
    diagrams: Tuple[str, ...] = ()

    @property
    def field(self) -> Field:
        return Field(self.modulus or None)

    def count(self, default: int) -> int:
        return self.instances or default

    def params(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "max_degree": self.max_degree,
            "modulus": self.modulus,
            "instances": self.instances,
            "corrupt": self.corrupt,
            "diagrams": list(self.diagrams),
        }

    def cache_params(self) -> Dict[str, Any]:
        """params() cộng các giới hạn tài nguyên có thể đổi kết quả"""
        return {**self.params(), "size_cap": self.size_cap}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SuiteConfig':
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        values = {}
        for key, value in data.items():
            if key == "diagrams":
                if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                    raise ConfigError("'diagrams' must be a list of names")
                values[key] = tuple(value)
            elif key == "corrupt":
                if not isinstance(value, bool):
                    raise ConfigError("'corrupt' must be true or false")
                values[key] = value
            else:
                if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                    raise ConfigError(f"'{key}' must be a non-negative integer")
                values[key] = value
        cfg = cls(**values)
        try:
            cfg.field
        except FieldError as e:
            raise ConfigError(str(e)) from e
        return cfg


@dataclass(frozen=True)
class Suite:
    name: str
    description: str
    run: Callable[[SuiteConfig], Tuple[Failures, Dict[str, Any]]]
    controls: Callable[[SuiteConfig], Dict[str, Callable[[], Any]]]


class _Detected(CctError):
    """Sai lệch phát hiện bằng so sánh trực tiếp (dims, rank, kind)"""


def _raised(fn: Callable[[], Any]) -> Optional[CctError]:
    try:
        fn()
    except CctError as e:
        return e
    return None


def _failure(instance: Any, error: Any) -> Dict[str, Any]:
    return {"instance": instance, "error": type(error).__name__ if isinstance(error, Exception) else "mismatch",
            "detail": str(error)}


def _selected(cfg: SuiteConfig, field: Field):
    diagrams = curated_diagrams(field)
    if not cfg.diagrams:
        return diagrams
    missing = [d for d in cfg.diagrams if d not in diagrams]
    if missing:
        raise ConfigError(f"unknown diagram(s) {', '.join(missing)}; known: {', '.join(diagrams)}")
    return {name: diagrams[name] for name in cfg.diagrams}


def validate_config(cfg: SuiteConfig) -> SuiteConfig:
    """Raise ConfigError khi config chọn diagram không tồn tại"""
    _selected(cfg, cfg.field)
    return cfg


# ============ prop21: subdivision of a delta is a poset ============

def _require_poset(cat: FinCat, what: str):
    kind = classify(cat)
    if kind is not CatKind.POSET:
        raise _Detected(f"{what} is {kind.value}")


def _subdivided_twice(cat: FinCat) -> Tuple[FinCat, FinCat]:
    """(C′, C″), cả hai phải là poset"""
    sub = subdivide(cat)
    validate_functor(sub.d)
    _require_poset(sub.category, "subdivision")
    twice = subdivide(sub.category)
    _require_poset(twice.category, "second subdivision")
    return sub.category, twice.category


def _with_parallel_arrow(cat: FinCat) -> FinCat:
    """Thêm một bản sao của arrow x -> y với x không có arrow vào, y không có arrow ra"""
    data = category_to_dict(cat)
    targets = {m["cod"] for m in data["morphisms"]}
    sources = {m["dom"] for m in data["morphisms"]}
    arrow = next(m for m in data["morphisms"] if m["dom"] not in targets and m["cod"] not in sources)
    data["morphisms"].append({"name": f"{arrow['name']}#", "dom": arrow["dom"], "cod": arrow["cod"]})
    return validate_category(data)


def _run_prop21(cfg: SuiteConfig):
    failures: Failures = []
    n = cfg.count(100)
    largest = 0
    for k in range(n):
        for kind, make in (("delta", random_delta), ("poset", random_poset)):
            cat = make(seeded(cfg.seed, f"prop21:{kind}:{k}"))
            try:
                _, twice = _subdivided_twice(cat)
            except CctError as e:
                failures.append(_failure(f"{kind}#{k}", e))
                continue
            largest = max(largest, len(twice.objects))
    once, twice = _subdivided_twice(parallel_pair())
    parallel = {
        "objects": len(once.objects),
        "morphisms": len(once.non_identity()),
        "kind": classify(once).value,
        "twice_objects": len(twice.objects),
        "twice_kind": classify(twice).value,
    }
    if (parallel["objects"], parallel["morphisms"], parallel["kind"]) != (4, 4, "poset"):
        failures.append(_failure("parallel", f"unexpected subdivision {parallel}"))
    return failures, {"deltas": n, "posets": n, "largest_second_subdivision": largest, "parallel": parallel}


def _controls_prop21(cfg: SuiteConfig):
    def doubled_arrow():
        _, twice = _subdivided_twice(parallel_pair())
        _require_poset(_with_parallel_arrow(twice), "second subdivision with a doubled arrow")

    def general():
        subdivide(cyclic_group())

    return {"doubled arrow in C″": doubled_arrow, "general category rejected": general}


# ============ prop32: cone contractions and homotopy equivalences ============

def _run_prop32(cfg: SuiteConfig):
    field = cfg.field
    failures: Failures = []
    n = cfg.count(50)
    sizes = []
    for k in range(n):
        f = random_chain_map(seeded(cfg.seed, f"prop32:{k}"), field)
        sizes.append(sum(f.source.dims) + sum(f.target.dims))
        try:
            result = contraction(cone(f))
            if not result.ok:
                raise _Detected(f"cone has homology in degree {result.failing_degree}")
            eq = extract_homotopy_equivalence(f, result.homotopy)
            build_cone_contraction(f, eq.gamma, eq.source_homotopy, eq.target_homotopy)
            if not is_quasi_isomorphism(f):
                raise _Detected("induced map on homology is not invertible")
        except CctError as e:
            failures.append(_failure(k, e))
    return failures, {"instances": n, "max_total_dim": max(sizes, default=0)}


def _interval_inclusion(field: Field) -> ChainMap:
    """k -id-> k vào chính nó ⊕ một interval nữa"""
    m = atom_complex(field, 1, [("interval", 1)], "M")
    n = atom_complex(field, 1, [("interval", 1), ("interval", 1)], "N")
    maps = {d: Mat.from_dod(field, {0: {0: field.one}}, (n.dim(d), m.dim(d))) for d in range(2)}
    return validate_chain_map(ChainMap(m, n, maps, name="f"))


def _controls_prop32(cfg: SuiteConfig):
    field = cfg.field

    def wrong_sign():
        f = _interval_inclusion(field)
        good = cone(f)
        s = contraction(good).homotopy
        # over GF(2) a sign flip is invisible, so the -d^M block is dropped instead
        factor = 0 if field.modulus == 2 else -1
        diffs = {}
        for d, mat in good.diffs.items():
            rows = f.source.dim(d - 2)
            diffs[d] = Mat.from_dod(field, {r: ({c: v * factor for c, v in row.items()} if r < rows else row)
                                            for r, row in mat.dod().items()}, mat.shape)
        bad = make_complex(field, good.dims, diffs, Grading.HOMOLOGICAL, "bad cone")
        if contraction_defect(bad, Homotopy(bad, bad, s.maps)) is not None:
            raise _Detected("sign error breaks the contraction")

    def not_qiso():
        f = random_chain_map(seeded(cfg.seed, "prop32:control"), field, quasi_iso=False)
        report = is_relative_qiso({"x": f})
        if not report.ok:
            raise _Detected(f"cone has homology in degree {report.failing['x']}")

    def corrupted_homotopy():
        f = _interval_inclusion(field)
        s = contraction(cone(f)).homotopy
        maps = dict(s.maps)
        maps[1] = maps[1].scale(2)
        extract_homotopy_equivalence(f, Homotopy(s.source, s.target, maps))

    return {"wrong sign in cone differential": wrong_sign, "non-quasi-isomorphism": not_qiso,
            "corrupted homotopy": corrupted_homotopy}


# ============ prop37: total complex of augmented rows ============

def _double_complexes(field: Field):
    k = ground_algebra(field)
    dual = dual_numbers(field)
    x_right = dual.right_matrices[1]
    return {
        "k": bar_resolution_double_complex(k, [regular_module(k)], {}, 3),
        "k[x]/x^2": bar_resolution_double_complex(dual, [regular_module(dual)], {}, 3),
        "k[x]/x^2 two rows": bar_resolution_double_complex(
            dual, [regular_module(dual), regular_module(dual)], {1: x_right}, 2),
    }


def _run_prop37(cfg: SuiteConfig):
    failures: Failures = []
    witness = {}
    for name, dc in _double_complexes(cfg.field).items():
        try:
            tot = total_complex(dc)
            witness[name] = {"dims": list(tot.complex.dims), "verified_below": tot.verified_degrees.stop}
        except CctError as e:
            failures.append(_failure(name, e))
    return failures, witness


def _controls_prop37(cfg: SuiteConfig):
    def corrupted_contraction():
        dc = _double_complexes(cfg.field)["k[x]/x^2"]
        contraction_maps = dict(dc.contraction)
        contraction_maps[(1, 0)] = contraction_maps[(1, 0)].scale(2)
        total_complex(replace(dc, contraction=contraction_maps))

    def corrupted_row():
        dc = _double_complexes(cfg.field)["k[x]/x^2"]
        horizontal = dict(dc.horizontal)
        horizontal[(1, 0)] = horizontal[(1, 0)].scale(3)
        total_complex(replace(dc, horizontal=horizontal))

    return {"corrupted contraction": corrupted_contraction, "corrupted row differential": corrupted_row}


# ============ adjunction (d_!, d*) ============

def _adjunction_cases(field: Field):
    k = ground_algebra(field)
    dual_k = curated_diagrams(field)["dual-k/P2"]
    return [constant_diagram(p2(), k, "const-k/P2"), dual_k, constant_diagram(chain(3), k, "const-k/chain3")]


def _run_adjunction(cfg: SuiteConfig):
    field = cfg.field
    failures: Failures = []
    cases = _adjunction_cases(field)
    subs = {id(a): subdivide(a.base) for a in cases}
    primes = {id(a): subdivide_diagram(a, subs[id(a)]) for a in cases}
    n = cfg.count(20)
    dims = []
    for k in range(n):
        diagram = cases[k % len(cases)]
        sub, prime = subs[id(diagram)], primes[id(diagram)]
        rng = seeded(cfg.seed, f"adjunction:{k}")
        try:
            n_mod = random_subdivided_module(rng, sub, diagram, prime)
            m_mod = random_chain_module(rng, diagram)
            data = adjunction_data(sub.d, n_mod, m_mod, diagram)
            dims.append(list(data.hom_dims))
            if not data.ok:
                raise _Detected(f"triangles {data.left_triangle}/{data.right_triangle}, "
                                f"hom dims {data.hom_dims}, bijective={data.bijective}")
            for x, eps in data.counit.components.items():
                if eps.nrows != eps.ncols or rank(eps) != eps.nrows:
                    raise _Detected(f"counit not invertible at {x}")
        except CctError as e:
            failures.append(_failure(f"{diagram.name}#{k}", e))
    return failures, {"instances": n, "hom_dims": dims}


def _controls_adjunction(cfg: SuiteConfig):
    def broken_unit():
        diagram = constant_diagram(p2(), ground_algebra(cfg.field), "const-k/P2")
        sub = subdivide(diagram.base)
        prime = subdivide_diagram(diagram, sub)
        n_mod = regular_diagram_module(prime)
        pf = Pushforward(sub.d, n_mod, diagram)
        eta = pf.unit()
        comps = dict(eta.components)
        first = sub.category.objects[0]
        comps[first] = comps[first].scale(2)
        validate_module_map(n_mod, pullback_module(sub.d, pf.module), comps)

    return {"broken naturality square": broken_unit}


# ============ dstar-ff: d* is full and faithful ============

def _run_dstar_ff(cfg: SuiteConfig):
    field = cfg.field
    failures: Failures = []
    cases = _adjunction_cases(field)
    subs = {id(a): subdivide(a.base) for a in cases}
    primes = {id(a): subdivide_diagram(a, subs[id(a)]) for a in cases}
    n = cfg.count(20)
    dims = []
    for k in range(n):
        diagram = cases[k % len(cases)]
        sub, prime = subs[id(diagram)], primes[id(diagram)]
        rng = seeded(cfg.seed, f"dstar-ff:{k}")
        try:
            m_mod = random_chain_module(rng, diagram)
            n_mod = random_chain_module(rng, diagram)
            m_prime = subdivide_module(m_mod, sub, prime)
            n_prime = subdivide_module(n_mod, sub, prime)
            below = hom_space(m_mod, n_mod)
            above = hom_space(m_prime, n_prime)
            images = [pullback_map(sub.d, eta, m_prime, n_prime) for eta in below]
            image_rank = rank(maps_to_matrix(images, prime.base.objects, field)) if images else 0
            dims.append([len(below), len(above)])
            if not len(below) == len(above) == image_rank:
                raise _Detected(f"dim Hom = {len(below)}, dim Hom' = {len(above)}, rank of η ↦ η′ = {image_rank}")
        except CctError as e:
            failures.append(_failure(f"{diagram.name}#{k}", e))
    return failures, {"instances": n, "hom_dims": dims}


def _controls_dstar_ff(cfg: SuiteConfig):
    def broken_square():
        diagram = constant_diagram(p2(), ground_algebra(cfg.field), "const-k/P2")
        m = regular_diagram_module(diagram)
        comps = {x: Mat.identity(cfg.field, 1) for x in diagram.base.objects}
        comps["1"] = comps["1"].scale(2)
        validate_module_map(m, m, comps)

    return {"broken naturality square": broken_square}


# ============ scct: ! is full and faithful ============

def _corrupt_action(mb) -> SABimodule:
    """Nhân đôi action trái của idempotent đầu tiên: unit không còn tác động như id"""
    module = mb.module
    first = mb.shriek.algebra.peirce.idempotents[0]
    target = next(k for k, c in enumerate(first) if c)
    left = list(module.left)
    left[target] = left[target].scale(2)
    return validate_bimodule(module.algebra, module.dim, left, module.right, name=f"{module.name}*")


def _run_scct(cfg: SuiteConfig):
    failures: Failures = []
    witness = {}
    for name, diagram in _selected(cfg, cfg.field).items():
        a = regular_diagram_bimodule(diagram)
        detached = detached_bimodule(diagram)
        first = detached_bimodule(diagram, diagram.base.objects[:1])
        # T của detached và first khác φ
        pairs = {"A,A": (a, a), "A,A+A": (a, direct_sum(a, a)), "A/0,A": (detached, a), "A,A/0": (a, detached),
                 f"{first.name},A": (first, a), f"A,{first.name}+A": (a, direct_sum(first, a))}
        sa = shriek_algebra(diagram)
        for label, (m, n) in pairs.items():
            key = f"{name} {label}"
            try:
                below = hom_space_bimod(m, n)
                envelope = hom_space(bimodule_as_enveloping_module(m), bimodule_as_enveloping_module(n))
                m_s, n_s = shriek_bimodule(m, sa), shriek_bimodule(n, sa)
                above = bimodule_hom_space(m_s.module, n_s.module)
                images = [shriek_map(eta, m_s, n_s) for eta in below]
                image_rank = rank(_flatten(cfg.field, images)) if images else 0
                witness[key] = {"hom": len(below), "hom_shriek": len(above), "hom_envelope": len(envelope)}
                if not len(below) == len(above) == image_rank == len(envelope):
                    raise _Detected(f"dims {witness[key]}, rank of η ↦ η! = {image_rank}")
            except CctError as e:
                failures.append(_failure(key, e))
    return failures, witness


def _flatten(field: Field, mats: List[Mat]) -> Mat:
    entries: Dict[int, Dict[int, Any]] = {}
    for j, m in enumerate(mats):
        for r, c, v in m.items():
            entries.setdefault(r * m.ncols + c, {})[j] = v
    return Mat.from_dod(field, entries, (mats[0].nrows * mats[0].ncols, len(mats)))


def _controls_scct(cfg: SuiteConfig):
    def corrupted_action():
        diagram = curated_diagrams(cfg.field)["const-k/P2"]
        mb = shriek_bimodule(regular_diagram_bimodule(diagram))
        _corrupt_action(mb)

    return {"corrupted M! action": corrupted_action}


# ============ invariance: H(A!, M!) under subdivision ============

def _run_invariance(cfg: SuiteConfig):
    failures: Failures = []
    witness = {}
    for name, diagram in _selected(cfg, cfg.field).items():
        try:
            sub = subdivide(diagram.base)
            prime = subdivide_diagram(diagram, sub)
            m = regular_diagram_bimodule(diagram)
            m_prime = subdivide_module(m, sub, prime)
            before = shriek_cohomology(diagram, m, cfg.max_degree, cfg.size_cap)
            after = shriek_cohomology(prime, m_prime, cfg.max_degree, cfg.size_cap)
            witness[name] = {"A": before, "A'": after}
            if before != after:
                raise _Detected(f"H(A!) = {before} but H(A'!) = {after}")
        except CctError as e:
            failures.append(_failure(name, e))
    return failures, witness


def _controls_invariance(cfg: SuiteConfig):
    def corrupted_structure_constant():
        diagram = curated_diagrams(cfg.field)["const-k/P2"]
        alg = shriek_algebra(diagram).algebra
        rows = [list(r) for r in alg.products]
        rows[0][0] = {k: v * 2 for k, v in rows[0][0].items()}
        validate_algebra(alg.field, alg.dim, tuple(tuple(r) for r in rows), alg.unit, "A!*", alg.peirce)

    return {"corrupted structure constant": corrupted_structure_constant}


# ============ gcct: non-poset delta through two subdivisions ============

def _run_gcct(cfg: SuiteConfig):
    failures: Failures = []
    diagram = gcct_diagram(cfg.field)
    first = subdivide(diagram.base)
    once = subdivide_diagram(diagram, first)
    second = subdivide(first.category)
    twice = subdivide_diagram(once, second)
    m_once = subdivide_module(regular_diagram_bimodule(diagram), first, once)
    m_twice = subdivide_module(m_once, second, twice)
    witness = {
        "C'": {"objects": len(once.base.objects), "kind": classify(once.base).value},
        "C''": {"objects": len(twice.base.objects), "kind": classify(twice.base).value},
    }
    try:
        h_once = shriek_cohomology(once, m_once, cfg.max_degree, cfg.size_cap)
        h_twice = shriek_cohomology(twice, m_twice, cfg.max_degree, cfg.size_cap)
        witness["A'"] = h_once
        witness["A''"] = h_twice
        if h_once != h_twice:
            raise _Detected(f"H(A'!) = {h_once} but H(A''!) = {h_twice}")
    except CctError as e:
        failures.append(_failure(diagram.name, e))
    return failures, witness


def _controls_gcct(cfg: SuiteConfig):
    def non_poset():
        shriek_algebra(gcct_diagram(cfg.field))

    return {"! rejects a non-poset base": non_poset}


# ============ REGISTRY ============

SUITES: Dict[str, Suite] = {s.name: s for s in (
    Suite("prop21", "subdivision of a delta is a poset", _run_prop21, _controls_prop21),
    Suite("prop32", "cone contractions vs homotopy equivalences", _run_prop32, _controls_prop32),
    Suite("prop37", "total complex contracts onto its augmentation", _run_prop37, _controls_prop37),
    Suite("adjunction", "d_! is left adjoint to d*", _run_adjunction, _controls_adjunction),
    Suite("dstar-ff", "d* is full and faithful", _run_dstar_ff, _controls_dstar_ff),
    Suite("scct", "! is full and faithful on bimodules", _run_scct, _controls_scct),
    Suite("invariance", "H(A!, M!) is unchanged by subdivision", _run_invariance, _controls_invariance),
    Suite("gcct", "cohomology comparison through two subdivisions", _run_gcct, _controls_gcct),
)}


def run_check(name: str, cfg: SuiteConfig) -> CheckReport:
    """Chạy một suite, trả về CheckReport (không raise với lỗi toán học)"""
    suite = SUITES.get(name)
    if suite is None:
        raise UnknownCheckError(name, list(SUITES))
    log = get_log_bus()
    start = time.time()
    params = cfg.params()
    instance_id = content_hash({"check": name, "params": params})
    controls = suite.controls(cfg)

    if cfg.corrupt:
        label, fn = next(iter(controls.items()))
        err = _raised(fn)
        if err is None:
            report = CheckReport.passed(name, f"mutation '{label}' went undetected",
                                        instance_id=instance_id, params=params, witness={"mutation": label})
        else:
            report = CheckReport.failed(name, str(err), instance_id=instance_id, params=params,
                                        witness={"mutation": label, "violated": str(err),
                                                 "error": type(err).__name__})
        report.elapsed_ms = elapsed_ms(start)
        return report

    try:
        failures, witness = suite.run(cfg)
    except ConfigError:
        raise
    except CctError as e:
        failures, witness = [_failure("suite", e)], {}
    detected = {label: _raised(fn) is not None for label, fn in controls.items()}
    witness = dict(witness)
    if failures:
        witness["failures"] = failures
    ok = not failures and all(detected.values())
    if ok:
        report = CheckReport.passed(name, suite.description, instance_id=instance_id, params=params,
                                    witness=witness, controls=detected)
        log.success(f"[CHECK] {name}: pass")
    else:
        missed = [label for label, hit in detected.items() if not hit]
        reason = f"{len(failures)} failing instance(s)" if failures else f"undetected control(s): {', '.join(missed)}"
        report = CheckReport.failed(name, reason, instance_id=instance_id, params=params,
                                    witness=witness, controls=detected)
        log.error(f"[CHECK] {name}: fail ({reason})")
    report.elapsed_ms = elapsed_ms(start)
    return report
