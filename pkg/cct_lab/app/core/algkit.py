"""
Finite-dimensional algebras, modules, bimodules và Hochschild cochains

Algebra được cho bởi structure constants: e_a e_b = Σ_k c[a][b][k] e_k
(lưu sparse: products[a][b] = {k: c}). Vector là list phần tử domain.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product as iter_product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    AlgebraError, BaseMismatchError, BudgetExceededError, HomomorphismError, ModuleAxiomError,
    NonAssociativeAlgebraError, NotHomogeneousError, UnitLawError,
)
from .exalg import Field, Mat, block_diag, kernel_basis, kernel_of_blocks, kron
from .homalg import Complex, DoubleComplex, Grading, cohomology_dims, make_complex
from .logbus import get_log_bus

Vector = List
Products = Tuple[Tuple[Dict[int, object], ...], ...]


@dataclass(frozen=True)
class PeirceData:
    """
    Hệ idempotent trực giao e_0..e_r (tổng = 1) và block (h, l) của từng
    basis element: e_h b e_l = b
    """
    idempotents: Tuple[Tuple, ...]
    blocks: Tuple[Tuple[int, int], ...]

    @property
    def count(self) -> int:
        return len(self.idempotents)


@dataclass(frozen=True, eq=False)
class Algebra:
    field: Field
    dim: int
    products: Products
    unit: Tuple
    name: str = ""
    peirce: Optional[PeirceData] = None

    # ---------- vectors ----------

    def zero_vector(self) -> Vector:
        return [self.field.zero] * self.dim

    def basis_vector(self, k: int) -> Vector:
        v = self.zero_vector()
        v[k] = self.field.one
        return v

    def mul_basis(self, a: int, b: int) -> Dict[int, object]:
        return self.products[a][b]

    def mul(self, x: Sequence, y: Sequence) -> Vector:
        out = self.zero_vector()
        for a, xa in enumerate(x):
            if not xa:
                continue
            row = self.products[a]
            for b, yb in enumerate(y):
                if not yb:
                    continue
                c = xa * yb
                for k, v in row[b].items():
                    out[k] += c * v
        return out

    # ---------- multiplication matrices ----------

    @cached_property
    def left_matrices(self) -> Tuple[Mat, ...]:
        """L_a: x ↦ e_a x"""
        mats = []
        for a in range(self.dim):
            entries: Dict[int, Dict[int, object]] = {}
            for b in range(self.dim):
                for k, v in self.products[a][b].items():
                    entries.setdefault(k, {})[b] = v
            mats.append(Mat.from_dod(self.field, entries, (self.dim, self.dim)))
        return tuple(mats)

    @cached_property
    def right_matrices(self) -> Tuple[Mat, ...]:
        """R_b: x ↦ x e_b"""
        mats = []
        for b in range(self.dim):
            entries: Dict[int, Dict[int, object]] = {}
            for a in range(self.dim):
                for k, v in self.products[a][b].items():
                    entries.setdefault(k, {})[a] = v
            mats.append(Mat.from_dod(self.field, entries, (self.dim, self.dim)))
        return tuple(mats)

    def same_as(self, other: 'Algebra') -> bool:
        return self is other or (
            self.field == other.field and self.dim == other.dim
            and self.products == other.products and self.unit == other.unit
        )

    def effective_peirce(self) -> PeirceData:
        if self.peirce is not None:
            return self.peirce
        return PeirceData((tuple(self.unit),), tuple((0, 0) for _ in range(self.dim)))

    def __repr__(self) -> str:
        return f"Algebra({self.name or '?'}, dim={self.dim}, {self.field.name})"


def combine(field: Field, mats: Sequence[Mat], coeffs: Sequence, shape: Tuple[int, int]) -> Mat:
    """Σ coeffs[a] mats[a]"""
    out = Mat.zeros(field, *shape)
    for c, m in zip(coeffs, mats):
        if c:
            out = out + m.scale(c)
    return out


# ============ VALIDATION ============

def validate_algebra(field: Field, dim: int, products: Products, unit: Sequence,
                     name: str = "", peirce: Optional[PeirceData] = None) -> Algebra:
    """
    Kiểm tra associativity trên mọi basis triple và unit law

    Raises:
        NonAssociativeAlgebraError: kèm triple (a, b, c) đầu tiên hỏng
        UnitLawError
    """
    if len(unit) != dim or len(products) != dim or any(len(r) != dim for r in products):
        raise AlgebraError(f"structure constants do not match dim {dim}")
    alg = Algebra(field, dim, products, tuple(unit), name, peirce)
    zero = field.zero

    for a, b, c in iter_product(range(dim), repeat=3):
        left: Dict[int, object] = {}
        for k, v in products[a][b].items():
            for l, w in products[k][c].items():
                left[l] = left.get(l, zero) + v * w
        right: Dict[int, object] = {}
        for k, v in products[b][c].items():
            for l, w in products[a][k].items():
                right[l] = right.get(l, zero) + v * w
        if {k: v for k, v in left.items() if v} != {k: v for k, v in right.items() if v}:
            raise NonAssociativeAlgebraError((a, b, c))

    for b in range(dim):
        e_b = alg.basis_vector(b)
        if alg.mul(alg.unit, e_b) != e_b:
            raise UnitLawError(b, "left")
        if alg.mul(e_b, alg.unit) != e_b:
            raise UnitLawError(b, "right")
    if peirce is not None:
        validate_peirce(alg, peirce)
    return alg


def algebra_from_table(field: Field, dim: int, table: Mapping[Tuple[int, int], Sequence],
                       unit: Sequence, name: str = "", peirce: Optional[PeirceData] = None) -> Algebra:
    """table[(a, b)] = coeff list (scalar tùy ý); cặp thiếu = 0"""
    rows = []
    for a in range(dim):
        row = []
        for b in range(dim):
            coeffs = table.get((a, b))
            entry = {}
            if coeffs is not None:
                if len(coeffs) != dim:
                    raise AlgebraError(f"product ({a}, {b}) has {len(coeffs)} coefficients, expected {dim}")
                for k, c in enumerate(coeffs):
                    v = field.scalar(c)
                    if v:
                        entry[k] = v
            row.append(entry)
        rows.append(tuple(row))
    return validate_algebra(field, dim, tuple(rows), tuple(field.scalar(u) for u in unit), name, peirce)


def validate_peirce(alg: Algebra, peirce: PeirceData) -> PeirceData:
    es = [list(e) for e in peirce.idempotents]
    total = alg.zero_vector()
    for e in es:
        total = [x + y for x, y in zip(total, e)]
    if total != list(alg.unit):
        raise AlgebraError("Peirce idempotents do not sum to the unit")
    for h, e in enumerate(es):
        for l, f in enumerate(es):
            expected = e if h == l else alg.zero_vector()
            if alg.mul(e, f) != expected:
                raise AlgebraError(f"idempotents {h}, {l} are not orthogonal idempotents")
    if len(peirce.blocks) != alg.dim:
        raise AlgebraError("Peirce block list has wrong length")
    for b, (h, l) in enumerate(peirce.blocks):
        e_b = alg.basis_vector(b)
        if alg.mul(es[h], e_b) != e_b or alg.mul(e_b, es[l]) != e_b:
            raise NotHomogeneousError("algebra", b)
    return peirce


@dataclass(frozen=True, eq=False)
class AlgebraHom:
    """φ: source -> target, matrix shape (target.dim, source.dim)"""
    source: Algebra
    target: Algebra
    matrix: Mat
    name: str = ""

    def apply(self, x: Sequence) -> Vector:
        col = Mat.from_dod(self.source.field, {i: {0: v} for i, v in enumerate(x) if v}, (len(x), 1))
        return (self.matrix @ col).column_values(0)


def validate_algebra_hom(source: Algebra, target: Algebra, matrix: Mat, name: str = "") -> AlgebraHom:
    if matrix.shape != (target.dim, source.dim):
        raise HomomorphismError(f"shape {matrix.shape}, expected {(target.dim, source.dim)}", name)
    hom = AlgebraHom(source, target, matrix, name)
    if hom.apply(source.unit) != list(target.unit):
        raise HomomorphismError("unit not preserved", name)
    images = [matrix.column_values(a) for a in range(source.dim)]
    for a, b in iter_product(range(source.dim), repeat=2):
        lhs = hom.apply(source.mul(source.basis_vector(a), source.basis_vector(b)))
        if lhs != target.mul(images[a], images[b]):
            raise HomomorphismError(f"product of basis {a}, {b} not preserved", name)
    return hom


# ============ OPPOSITE / ENVELOPING ============

def opposite(alg: Algebra) -> Algebra:
    products = tuple(tuple(alg.products[b][a] for b in range(alg.dim)) for a in range(alg.dim))
    peirce = None
    if alg.peirce is not None:
        peirce = PeirceData(alg.peirce.idempotents, tuple((l, h) for h, l in alg.peirce.blocks))
    return Algebra(alg.field, alg.dim, products, alg.unit, f"{alg.name}^op", peirce)


def enveloping(alg: Algebra) -> Algebra:
    """A ⊗ A^op, basis (a, b) ↦ a*dim + b; (a⊗b)(c⊗d) = ac ⊗ db"""
    n = alg.dim
    zero = alg.field.zero
    rows = []
    for a, b in iter_product(range(n), repeat=2):
        row = []
        for c, d in iter_product(range(n), repeat=2):
            entry: Dict[int, object] = {}
            for k, v in alg.products[a][c].items():
                for l, w in alg.products[d][b].items():
                    idx = k * n + l
                    entry[idx] = entry.get(idx, zero) + v * w
            row.append({k: v for k, v in entry.items() if v})
        rows.append(tuple(row))
    unit = tuple(x * y for x in alg.unit for y in alg.unit)
    return Algebra(alg.field, n * n, tuple(rows), unit, f"{alg.name}^e")


# ============ MODULES ============

@dataclass(frozen=True, eq=False)
class LeftModule:
    """left[a] = ma trận của m ↦ e_a · m"""
    algebra: Algebra
    dim: int
    left: Tuple[Mat, ...]
    name: str = ""

    def act(self, x: Sequence) -> Mat:
        return combine(self.algebra.field, self.left, x, (self.dim, self.dim))


@dataclass(frozen=True, eq=False)
class SABimodule:
    """
    Song-module trên cùng một algebra (k đối xứng)

    left[a]: m ↦ e_a · m; right[b]: m ↦ m · e_b
    """
    algebra: Algebra
    dim: int
    left: Tuple[Mat, ...]
    right: Tuple[Mat, ...]
    name: str = ""

    def act(self, x: Sequence) -> Mat:
        return combine(self.algebra.field, self.left, x, (self.dim, self.dim))

    def act_right(self, x: Sequence) -> Mat:
        return combine(self.algebra.field, self.right, x, (self.dim, self.dim))


def _check_left_rep(alg: Algebra, dim: int, left: Sequence[Mat], side: str):
    field = alg.field
    if len(left) != alg.dim or any(m.shape != (dim, dim) for m in left):
        raise ModuleAxiomError(f"{side} action shape", f"expected {alg.dim} matrices of size {dim}")
    if combine(field, left, alg.unit, (dim, dim)) != Mat.identity(field, dim):
        raise ModuleAxiomError(f"{side} unit acts as identity")
    for a, b in iter_product(range(alg.dim), repeat=2):
        prod = alg.products[a][b]
        rhs = combine(field, [left[k] for k in prod], list(prod.values()), (dim, dim))
        lhs = left[a] @ left[b] if side == "left" else left[b] @ left[a]
        if lhs != rhs:
            raise ModuleAxiomError(f"{side} action is compatible with products", f"basis {a}, {b}")


def validate_left_module(alg: Algebra, dim: int, left: Sequence[Mat], name: str = "") -> LeftModule:
    _check_left_rep(alg, dim, left, "left")
    return LeftModule(alg, dim, tuple(left), name)


def validate_bimodule(alg: Algebra, dim: int, left: Sequence[Mat], right: Sequence[Mat],
                      name: str = "") -> SABimodule:
    _check_left_rep(alg, dim, left, "left")
    _check_left_rep(alg, dim, right, "right")
    for a, b in iter_product(range(alg.dim), repeat=2):
        if left[a] @ right[b] != right[b] @ left[a]:
            raise ModuleAxiomError("left and right actions commute", f"basis {a}, {b}")
    return SABimodule(alg, dim, tuple(left), tuple(right), name)


def regular_module(alg: Algebra) -> LeftModule:
    return LeftModule(alg, alg.dim, alg.left_matrices, name=alg.name)


def regular_bimodule(alg: Algebra) -> SABimodule:
    return SABimodule(alg, alg.dim, alg.left_matrices, alg.right_matrices, name=alg.name)


def direct_sum_bimodule(x: SABimodule, y: SABimodule) -> SABimodule:
    field = x.algebra.field
    left = tuple(block_diag(field, [p, q]) for p, q in zip(x.left, y.left))
    right = tuple(block_diag(field, [p, q]) for p, q in zip(x.right, y.right))
    return SABimodule(x.algebra, x.dim + y.dim, left, right, name=f"{x.name}+{y.name}")


def bimodule_to_enveloping_module(x: SABimodule, env: Optional[Algebra] = None) -> LeftModule:
    """(a ⊗ b) · m = a m b"""
    alg = x.algebra
    env = env or enveloping(alg)
    acts = tuple(x.left[a] @ x.right[b] for a, b in iter_product(range(alg.dim), repeat=2))
    return LeftModule(env, x.dim, acts, name=f"{x.name}^e")


# ============ HOM SPACES ============

def intertwiner_blocks(source_actions: Sequence[Mat], target_actions: Sequence[Mat]) -> List[Mat]:
    """
    Constraints η S_b = T_b η trên vec(η) (row-major, η: n x m)
    """
    out = []
    for s, t in zip(source_actions, target_actions):
        n, m = t.nrows, s.nrows
        out.append(kron(Mat.identity(s.field, n), s.transpose()) - kron(t, Mat.identity(s.field, m)))
    return out


def unvec(field: Field, column: Sequence, nrows: int, ncols: int) -> Mat:
    entries: Dict[int, Dict[int, object]] = {}
    for idx, v in enumerate(column):
        if v:
            entries.setdefault(idx // ncols, {})[idx % ncols] = v
    return Mat.from_dod(field, entries, (nrows, ncols))


def bimodule_hom_space(x: SABimodule, y: SABimodule) -> List[Mat]:
    """Basis của Hom_{A-A}(X, Y)"""
    field = x.algebra.field
    blocks = intertwiner_blocks(x.left, y.left) + intertwiner_blocks(x.right, y.right)
    k = kernel_of_blocks(blocks, y.dim * x.dim, field)
    return [unvec(field, k.column_values(j), y.dim, x.dim) for j in range(k.ncols)]


def is_bimodule_map(x: SABimodule, y: SABimodule, eta: Mat) -> bool:
    if eta.shape != (y.dim, x.dim):
        return False
    return (all(eta @ p == q @ eta for p, q in zip(x.left, y.left))
            and all(eta @ p == q @ eta for p, q in zip(x.right, y.right)))


def center_dim(alg: Algebra) -> int:
    """dim Z(B) = dim HH^0(B, B)"""
    blocks = [r - l for l, r in zip(alg.left_matrices, alg.right_matrices)]
    return kernel_of_blocks(blocks, alg.dim, alg.field).ncols


def derivations_dim(alg: Algebra) -> int:
    """dim Der(B); với B giao hoán đó là dim HH^1(B, B)"""
    n = alg.dim
    field = alg.field
    zero = field.zero
    rows: Dict[int, Dict[int, object]] = {}
    r = 0
    for a, b in iter_product(range(n), repeat=2):
        prod = alg.products[a][b]
        ra = alg.right_matrices[b]
        la = alg.left_matrices[a]
        for out in range(n):
            row: Dict[int, object] = {}
            for k, c in prod.items():
                row[out * n + k] = row.get(out * n + k, zero) + c
            for s, v in ra.row(out).items():
                row[s * n + a] = row.get(s * n + a, zero) - v
            for s, v in la.row(out).items():
                row[s * n + b] = row.get(s * n + b, zero) - v
            rows[r] = row
            r += 1
    constraints = Mat.from_dod(field, rows, (r, n * n))
    return kernel_basis(constraints).ncols


# ============ HOCHSCHILD COCHAINS ============

def _homogeneous_blocks(x: SABimodule, peirce: PeirceData) -> List[Tuple[int, int]]:
    alg = x.algebra
    lefts = [x.act(e) for e in peirce.idempotents]
    rights = [x.act_right(e) for e in peirce.idempotents]
    blocks = []
    for j in range(x.dim):
        unit_j = Mat.unit_vector(alg.field, x.dim, j)
        h = next((h for h, m in enumerate(lefts) if m @ unit_j == unit_j), None)
        l = next((l for l, m in enumerate(rights) if m @ unit_j == unit_j), None)
        if h is None or l is None:
            raise NotHomogeneousError("bimodule", j)
        blocks.append((h, l))
    return blocks


def bar_cochain_complex(alg: Algebra, x: SABimodule, max_degree: int,
                        reduced: bool = False, cap: int = 20000) -> Complex:
    """
    Cochain complex tính HH^n(B, X) cho n = 0..max_degree (degree 0..max_degree+1)

    reduced=False: C^n = Hom(B^{⊗n}, X) đầy đủ.
    reduced=True: cochain chuẩn hóa tương đối với E = span các idempotent
        Peirce: hàm trên chuỗi composable của basis Ā, giá trị trong
        e_src X e_tgt; cùng cohomology, nhỏ hơn nhiều.

    Raises:
        BaseMismatchError: X không phải bimodule trên chính B
        BudgetExceededError: một C^n vượt quá cap tọa độ
    """
    if not x.algebra.same_as(alg):
        raise BaseMismatchError(
            f"coefficients {x.name} are a bimodule over {x.algebra.name or '?'}, not over {alg.name or '?'}")
    field = alg.field
    zero = field.zero
    log = get_log_bus()

    if reduced:
        peirce = alg.effective_peirce()
        letter_block = list(peirce.blocks)
        pivots = {}
        for h, e in enumerate(peirce.idempotents):
            t = next((k for k, v in enumerate(e) if v and letter_block[k] == (h, h)), None)
            if t is None:
                raise NotHomogeneousError("idempotent", h)
            pivots[h] = (t, e[t], e)
        pivot_set = {t for t, _, _ in pivots.values()}
        letters = [k for k in range(alg.dim) if k not in pivot_set]
        objects = list(range(peirce.count))
        x_blocks = _homogeneous_blocks(x, peirce)
    else:
        letter_block = [(0, 0)] * alg.dim
        pivots = {}
        pivot_set = set()
        letters = list(range(alg.dim))
        objects = [0]
        x_blocks = [(0, 0)] * x.dim

    x_index: Dict[Tuple[int, int], List[int]] = {}
    for j, blk in enumerate(x_blocks):
        x_index.setdefault(blk, []).append(j)

    product_cache: Dict[Tuple[int, int], Dict[int, object]] = {}

    def reduce_product(a: int, b: int) -> Dict[int, object]:
        key = (a, b)
        if key not in product_cache:
            vec = dict(alg.products[a][b])
            h, l = letter_block[a][0], letter_block[b][1]
            if reduced and h == l and h in pivots:
                t, et, e = pivots[h]
                c = vec.get(t, zero)
                if c:
                    ratio = field.domain.quo(c, et)
                    for k, v in enumerate(e):
                        if v:
                            vec[k] = vec.get(k, zero) - ratio * v
            product_cache[key] = {k: v for k, v in vec.items() if v and k not in pivot_set}
        return product_cache[key]

    def ends(chain) -> Tuple[int, int]:
        if chain[0] == "@":
            return chain[1], chain[1]
        return letter_block[chain[0]][0], letter_block[chain[-1]][1]

    chains: List[List[tuple]] = [[("@", h) for h in objects]]
    for n in range(1, max_degree + 2):
        if n == 1:
            level = [(b,) for b in letters]
        else:
            level = [c + (b,) for c in chains[-1] for b in letters
                     if letter_block[c[-1]][1] == letter_block[b][0]]
        if len(level) > 50 * cap:
            raise BudgetExceededError(n, len(level), cap)
        chains.append(level)

    bases: List[List[Tuple[tuple, int]]] = []
    indices: List[Dict[Tuple[tuple, int], int]] = []
    for n, level in enumerate(chains):
        size = sum(len(x_index.get(ends(c), ())) for c in level)
        if size > cap:
            raise BudgetExceededError(n, size, cap)
        basis = [(c, j) for c in level for j in x_index.get(ends(c), ())]
        bases.append(basis)
        indices.append({key: i for i, key in enumerate(basis)})
    dims = [len(b) for b in bases]
    log.debug(f"[BAR] {alg.name or '?'} {'reduced' if reduced else 'full'}: dims={dims}")

    lefts = [m.dod() for m in x.left]
    rights = [m.dod() for m in x.right]
    diffs = {}
    for n in range(max_degree + 1):
        col_index = indices[n]
        entries: Dict[int, Dict[int, object]] = {}
        for r, (a, y) in enumerate(bases[n + 1]):
            row: Dict[int, object] = {}

            def add(col_key, value):
                col = col_index.get(col_key)
                if col is not None and value:
                    row[col] = row.get(col, zero) + value

            rest = a[1:] if n >= 1 else ("@", ends(a)[1])
            for j, v in lefts[a[0]].get(y, {}).items():
                add((rest, j), v)
            for i in range(n):
                sign = -1 if i % 2 == 0 else 1
                for b, v in reduce_product(a[i], a[i + 1]).items():
                    add((a[:i] + (b,) + a[i + 2:], y), v if sign > 0 else -v)
            init = a[:-1] if n >= 1 else ("@", ends(a)[0])
            last_sign = 1 if (n + 1) % 2 == 0 else -1
            for j, v in rights[a[-1]].get(y, {}).items():
                add((init, j), v if last_sign > 0 else -v)
            if row:
                entries[r] = row
        diffs[n] = Mat.from_dod(field, entries, (dims[n + 1], dims[n]))
    return make_complex(field, dims, diffs, Grading.COHOMOLOGICAL,
                        name=f"C*({alg.name}, {x.name})", valid_top=max_degree)


def hochschild_dims(alg: Algebra, x: SABimodule, max_degree: int,
                    reduced: bool = True, cap: int = 20000) -> List[int]:
    cx = bar_cochain_complex(alg, x, max_degree, reduced=reduced, cap=cap)
    return cohomology_dims(cx, range(max_degree + 1))


# ============ BAR RESOLUTION ROWS ============

def bar_resolution_double_complex(alg: Algebra, modules: Sequence[LeftModule],
                                  maps: Mapping[int, Mat], width: int) -> DoubleComplex:
    """
    Hàng i = bar resolution của M_i cắt ở cột width:
    X_{h,i} = A^{⊗(h+1)} ⊗ M_i, contraction t(x) = 1 ⊗ x.

    Args:
        modules: M_0..M_height (A-module trái)
        maps: maps[i]: M_i -> M_{i-1}, A-linear, d∘d = 0
    """
    field = alg.field
    n = alg.dim
    height = len(modules) - 1
    aug = make_complex(field, [m.dim for m in modules], dict(maps), Grading.HOMOLOGICAL, name="M")
    for i, m in maps.items():
        for a in range(n):
            if m @ modules[i].left[a] != modules[i - 1].left[a] @ m:
                raise ModuleAxiomError("differential of M is A-linear", f"degree {i}, basis {a}")

    dims: Dict[Tuple[int, int], int] = {}
    for h in range(width + 1):
        for i in range(height + 1):
            dims[(h, i)] = n ** (h + 1) * modules[i].dim

    def encode(letters: Sequence[int], m_idx: int, m_dim: int) -> int:
        idx = 0
        for a in letters:
            idx = idx * n + a
        return idx * m_dim + m_idx

    def tuples(length: int):
        return iter_product(range(n), repeat=length)

    unit = list(alg.unit)
    horizontal, vertical, contraction_maps, epsilon = {}, {}, {}, {}
    for i, mod in enumerate(modules):
        md = mod.dim
        acts = [m.dod() for m in mod.left]
        # epsilon: a ⊗ m ↦ a·m
        e: Dict[int, Dict[int, object]] = {}
        for a in range(n):
            for r, row in acts[a].items():
                for mi, v in row.items():
                    e.setdefault(r, {})[encode((a,), mi, md)] = v
        epsilon[i] = Mat.from_dod(field, e, (md, dims[(0, i)]))
        # t^0: m ↦ 1 ⊗ m
        t0: Dict[int, Dict[int, object]] = {}
        for u, c in enumerate(unit):
            if c:
                for mi in range(md):
                    t0.setdefault(encode((u,), mi, md), {})[mi] = c
        contraction_maps[(0, i)] = Mat.from_dod(field, t0, (dims[(0, i)], md))

        for h in range(1, width + 1):
            d: Dict[int, Dict[int, object]] = {}
            for letters in tuples(h + 1):
                for mi in range(md):
                    col = encode(letters, mi, md)
                    for j in range(h):
                        sign = 1 if j % 2 == 0 else -1
                        for k, v in alg.products[letters[j]][letters[j + 1]].items():
                            new = letters[:j] + (k,) + letters[j + 2:]
                            row = d.setdefault(encode(new, mi, md), {})
                            row[col] = row.get(col, field.zero) + (v if sign > 0 else -v)
                    last_sign = 1 if h % 2 == 0 else -1
                    for r, row_vals in acts[letters[-1]].items():
                        v = row_vals.get(mi)
                        if v:
                            row = d.setdefault(encode(letters[:-1], r, md), {})
                            row[col] = row.get(col, field.zero) + (v if last_sign > 0 else -v)
            horizontal[(h, i)] = Mat.from_dod(field, d, (dims[(h - 1, i)], dims[(h, i)]))
            # t^h: x ↦ 1 ⊗ x
            t: Dict[int, Dict[int, object]] = {}
            for letters in tuples(h):
                for mi in range(md):
                    col = encode(letters, mi, md)
                    for u, c in enumerate(unit):
                        if c:
                            t.setdefault(encode((u,) + tuple(letters), mi, md), {})[col] = c
            contraction_maps[(h, i)] = Mat.from_dod(field, t, (dims[(h, i)], dims[(h - 1, i)]))

        if i >= 1:
            for h in range(width + 1):
                vertical[(h, i)] = kron(Mat.identity(field, n ** (h + 1)), maps[i])
    return DoubleComplex(field, width, height, dims, horizontal, vertical, aug,
                         epsilon, contraction_maps, truncated=True)
