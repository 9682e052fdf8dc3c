"""
Curated instances - algebra, category, diagram dùng trong check suites và
generator ngẫu nhiên (mọi generator nhận random.Random đã seed)
"""
import random
from functools import reduce
from itertools import product as iter_product
from typing import Dict, List, Optional, Sequence, Tuple

from .algkit import (
    Algebra, LeftModule, PeirceData, SABimodule, algebra_from_table, combine, intertwiner_blocks, regular_bimodule,
    unvec, validate_bimodule,
)
from .diagram import (
    DiagModule, Diagram, direct_sum, subdivide_module, validate_diag_module, validate_diagram,
)
from .exalg import Field, Mat, block_diag, inverse, kernel_of_blocks, rank
from .fincat import CatKind, FinCat, Subdivision, build_category, classify, poset_category
from .homalg import ChainMap, Complex, Grading, make_complex, validate_chain_map


# ============ ALGEBRAS ============

def ground_algebra(field: Field) -> Algebra:
    return algebra_from_table(field, 1, {(0, 0): [1]}, [1], "k")


def dual_numbers(field: Field) -> Algebra:
    """k[x]/x², basis (1, x)"""
    table = {(0, 0): [1, 0], (0, 1): [0, 1], (1, 0): [0, 1]}
    return algebra_from_table(field, 2, table, [1, 0], "k[x]/x^2")


def split_pair(field: Field) -> Algebra:
    """k × k, basis (e1, e2)"""
    one, zero = field.one, field.zero
    peirce = PeirceData(((one, zero), (zero, one)), ((0, 0), (1, 1)))
    return algebra_from_table(field, 2, {(0, 0): [1, 0], (1, 1): [0, 1]}, [1, 1], "kxk", peirce)


def upper_triangular(field: Field) -> Algebra:
    """Ma trận tam giác trên 2x2, basis (e11, e12, e22)"""
    one, zero = field.one, field.zero
    table = {
        (0, 0): [1, 0, 0], (0, 1): [0, 1, 0],
        (1, 2): [0, 1, 0], (2, 2): [0, 0, 1],
    }
    peirce = PeirceData(((one, zero, zero), (zero, zero, one)), ((0, 0), (0, 1), (1, 1)))
    return algebra_from_table(field, 3, table, [1, 0, 1], "T2", peirce)


ALGEBRAS = {
    "k": ground_algebra,
    "k[x]/x^2": dual_numbers,
    "kxk": split_pair,
    "T2": upper_triangular,
}

# χ(e_b) của các character A -> k
CHARACTERS = {
    "k": [[1]],
    "k[x]/x^2": [[1, 0]],
    "kxk": [[1, 0], [0, 1]],
    "T2": [[1, 0, 0], [0, 0, 1]],
}


def character_modules(alg: Algebra) -> List[LeftModule]:
    field = alg.field
    out = []
    for chi in CHARACTERS.get(alg.name, []):
        acts = tuple(Mat.from_rows(field, [[c]]) for c in chi)
        out.append(LeftModule(alg, 1, acts, name=f"S{len(out)}"))
    return out


def projective_modules(alg: Algebra) -> List[LeftModule]:
    """A·e_h cho từng idempotent Peirce"""
    peirce = alg.effective_peirce()
    out = []
    for h in range(peirce.count):
        idx = [b for b, (_, l) in enumerate(peirce.blocks) if l == h]
        acts = tuple(m.submatrix(idx, idx) for m in alg.left_matrices)
        out.append(LeftModule(alg, len(idx), acts, name=f"P{h}"))
    return out


def indecomposable_modules(alg: Algebra) -> List[LeftModule]:
    return projective_modules(alg) + character_modules(alg)


def zero_fiber(alg: Algebra) -> LeftModule:
    empty = Mat.zeros(alg.field, 0, 0)
    return LeftModule(alg, 0, tuple(empty for _ in range(alg.dim)), name="0")


def sum_fibers(alg: Algebra, parts: Sequence[LeftModule]) -> LeftModule:
    if not parts:
        return zero_fiber(alg)
    field = alg.field
    acts = tuple(block_diag(field, [p.left[b] for p in parts]) for b in range(alg.dim))
    return LeftModule(alg, sum(p.dim for p in parts), acts, name="+".join(p.name for p in parts))


# ============ CATEGORIES ============

def p2() -> FinCat:
    """0 -u-> 1"""
    return build_category(["0", "1"], [("u", "0", "1")], [], name="P2")


def chain(n: int) -> FinCat:
    objects = [str(i) for i in range(n)]
    return poset_category(objects, [(objects[i], objects[i + 1]) for i in range(n - 1)], name=f"chain{n}")


def parallel_pair() -> FinCat:
    return build_category(["0", "1"], [("u", "0", "1"), ("v", "0", "1")], [], name="parallel")


def square_poset() -> FinCat:
    return poset_category(["a", "b", "c", "d"],
                          [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")], name="square")


def discrete(n: int) -> FinCat:
    return poset_category([str(i) for i in range(n)], [], name=f"discrete{n}")


def cyclic_group() -> FinCat:
    """Một object, g∘g = id"""
    return build_category(["*"], [("g", "*", "*")], [("g", "g", "id_*")], name="C2")


CATEGORIES = {
    "P2": p2,
    "chain3": lambda: chain(3),
    "parallel": parallel_pair,
    "square": square_poset,
    "discrete2": lambda: discrete(2),
    "C2": cyclic_group,
}


def free_category(objects: Sequence[str], edges: Sequence[Tuple[str, str, str]], name: str = "") -> FinCat:
    """
    Path category của một quiver không chu trình; path tên "e1.e2" theo
    thứ tự chạy
    """
    out: Dict[str, List[Tuple[str, str]]] = {x: [] for x in objects}
    for e, src, tgt in edges:
        out[src].append((e, tgt))
    paths: Dict[str, Tuple[str, str]] = {}

    def extend(label: str, src: str, end: str):
        paths[label] = (src, end)
        for e, tgt in out[end]:
            extend(f"{label}.{e}", src, tgt)

    for e, src, tgt in edges:
        extend(e, src, tgt)
    compose = []
    for f, (a, b) in paths.items():
        for g, (b2, c) in paths.items():
            if b2 == b:
                compose.append((g, f, f"{f}.{g}"))
    return build_category(objects, [(p, s, t) for p, (s, t) in paths.items()], compose, "auto", name)


def _count_paths(objects: Sequence[str], edges: Sequence[Tuple[str, str, str]]) -> int:
    memo: Dict[str, int] = {}

    def from_node(x: str) -> int:
        if x not in memo:
            memo[x] = sum(1 + from_node(t) for _, s, t in edges if s == x)
        return memo[x]

    return sum(from_node(x) for x in objects)


def random_delta(rng: random.Random, max_objects: int = 5, max_morphisms: int = 8) -> FinCat:
    """Free category của một quiver ngẫu nhiên (cạnh i -> j với i < j, có cạnh song song)"""
    n = rng.randint(1, max_objects)
    objects = [f"x{i}" for i in range(n)]
    edges: List[Tuple[str, str, str]] = []
    if n >= 2:
        for k in range(rng.randint(0, max_morphisms)):
            i, j = sorted(rng.sample(range(n), 2))
            edges.append((f"e{k}", objects[i], objects[j]))
    while _count_paths(objects, edges) > max_morphisms:
        edges.pop()
    return free_category(objects, edges, name="delta")


def random_poset(rng: random.Random, max_objects: int = 5, density: float = 0.4) -> FinCat:
    n = rng.randint(1, max_objects)
    objects = [f"p{i}" for i in range(n)]
    relations = [(objects[i], objects[j]) for i in range(n) for j in range(i + 1, n)
                 if rng.random() < density]
    return poset_category(objects, relations, name="poset")


# ============ DIAGRAMS ============

def constant_diagram(base: FinCat, alg: Algebra, name: str = "") -> Diagram:
    eye = Mat.identity(alg.field, alg.dim)
    return validate_diagram(base, {x: alg for x in base.objects},
                            {m: eye for m in base.non_identity()}, name or f"const {alg.name}")


def _unit_map(big: Algebra) -> Mat:
    """k -> B, 1 ↦ 1"""
    return Mat.column(big.field, list(big.unit))


def curated_diagrams(field: Field) -> Dict[str, Diagram]:
    """Năm diagram trên poset dùng cho scct và invariance"""
    k = ground_algebra(field)
    dual = dual_numbers(field)
    pair = split_pair(field)
    base = p2()
    out = {
        "const-k/P2": constant_diagram(base, k, "const-k/P2"),
        "dual-k/P2": validate_diagram(base, {"0": dual, "1": k}, {"u": _unit_map(dual)}, "dual-k/P2"),
        "const-k/chain3": constant_diagram(chain(3), k, "const-k/chain3"),
        "kxk-k/P2": validate_diagram(p2(), {"0": pair, "1": k}, {"u": _unit_map(pair)}, "kxk-k/P2"),
        "const-k/square": constant_diagram(square_poset(), k, "const-k/square"),
    }
    return out


def point_diagram(alg: Algebra) -> Diagram:
    """alg trên category một object"""
    return constant_diagram(discrete(1), alg, f"{alg.name}/pt")


def gcct_diagram(field: Field) -> Diagram:
    """Hằng k trên parallel pair (delta nhưng không phải poset)"""
    return constant_diagram(parallel_pair(), ground_algebra(field), "const-k/parallel")


# ============ RANDOM COMPLEXES ============

def random_invertible(rng: random.Random, field: Field, n: int) -> Mat:
    if n == 0:
        return Mat.identity(field, 0)
    while True:
        m = Mat.from_rows(field, [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)], n)
        if rank(m) == n:
            return m


def _inverse(m: Mat) -> Mat:
    return m if m.nrows == 0 else inverse(m)


def random_algebra_base_change(rng: random.Random, alg: Algebra,
                               x: SABimodule) -> Tuple[Algebra, SABimodule]:
    """
    Cùng (B, X) viết trong basis ngẫu nhiên: f_a = Σ_j P[j, a] e_j cho B,
    Q cho X; Peirce data bị bỏ
    """
    field = alg.field
    p = random_invertible(rng, field, alg.dim)
    p_inv = _inverse(p)
    cols = [p.column_values(a) for a in range(alg.dim)]
    table = {}
    for a, b in iter_product(range(alg.dim), repeat=2):
        prod = p_inv @ Mat.column(field, alg.mul(cols[a], cols[b]))
        table[(a, b)] = prod.column_values(0)
    unit = (p_inv @ Mat.column(field, list(alg.unit))).column_values(0)
    moved = algebra_from_table(field, alg.dim, table, unit, name=f"{alg.name}~")

    q = random_invertible(rng, field, x.dim)
    q_inv = _inverse(q)
    shape = (x.dim, x.dim)
    left = [q_inv @ combine(field, x.left, col, shape) @ q for col in cols]
    right = [q_inv @ combine(field, x.right, col, shape) @ q for col in cols]
    return moved, validate_bimodule(moved, x.dim, left, right, name=f"{x.name}~")


def atom_complex(field: Field, top: int, atoms: Sequence[Tuple[str, int]], name: str) -> Complex:
    """
    Tổng trực tiếp của atom ("point", n) = k ở degree n và ("interval", n) =
    k -id-> k ở degree n, n-1; basis xếp theo thứ tự atom
    """
    dims = [0] * (top + 1)
    place: List[Dict[int, int]] = []
    for kind, n in atoms:
        spot = {}
        for deg in ((n,) if kind == "point" else (n, n - 1)):
            spot[deg] = dims[deg]
            dims[deg] += 1
        place.append(spot)
    entries: Dict[int, Dict[int, Dict[int, object]]] = {n: {} for n in range(1, top + 1)}
    for (kind, n), spot in zip(atoms, place):
        if kind == "interval":
            entries[n].setdefault(spot[n - 1], {})[spot[n]] = field.one
    diffs = {n: Mat.from_dod(field, entries[n], (dims[n - 1], dims[n])) for n in range(1, top + 1)}
    return make_complex(field, dims, diffs, Grading.HOMOLOGICAL, name)


def _conjugate(rng: random.Random, cx: Complex) -> Tuple[Complex, Dict[int, Mat], Dict[int, Mat]]:
    """d ↦ P d P^-1 với P ngẫu nhiên từng degree"""
    p = {n: random_invertible(rng, cx.field, cx.dim(n)) for n in cx.degrees()}
    p_inv = {n: _inverse(m) for n, m in p.items()}
    diffs = {n: p[n - 1] @ cx.d(n) @ p_inv[n] for n in range(1, cx.top + 1)}
    return make_complex(cx.field, cx.dims, diffs, Grading.HOMOLOGICAL, cx.name), p, p_inv


def random_chain_map(rng: random.Random, field: Field, max_total: int = 12,
                     quasi_iso: bool = True) -> ChainMap:
    """
    f: M -> N, N = M ⊕ (interval) [⊕ point nếu quasi_iso=False], rồi đổi
    basis ngẫu nhiên ở cả hai phía
    """
    top = rng.randint(1, 3)

    def random_atom():
        n = rng.randint(0, top)
        if n >= 1 and rng.random() < 0.5:
            return ("interval", n)
        return ("point", n)

    def size(atoms):
        return sum(1 if kind == "point" else 2 for kind, _ in atoms)

    extras = [("interval", rng.randint(1, top)) for _ in range(rng.randint(1, 2))]
    if not quasi_iso:
        extras.append(("point", rng.randint(0, top)))
    atoms: List[Tuple[str, int]] = []
    budget = max_total - size(extras)
    while True:
        atom = random_atom()
        if 2 * size(atoms + [atom]) + size(extras) > max_total or len(atoms) >= budget:
            break
        atoms.append(atom)

    m = atom_complex(field, top, atoms, "M")
    n = atom_complex(field, top, atoms + extras, "N")
    maps = {}
    for deg in range(top + 1):
        maps[deg] = Mat.from_dod(field, {i: {i: field.one} for i in range(m.dim(deg))},
                                 (n.dim(deg), m.dim(deg)))
    m2, _, q_inv = _conjugate(rng, m)
    n2, p, _ = _conjugate(rng, n)
    twisted = {deg: p[deg] @ maps[deg] @ q_inv[deg] for deg in maps}
    return validate_chain_map(ChainMap(m2, n2, twisted, name="f"))


# ============ RANDOM MODULES ============

def is_total_order(base: FinCat) -> bool:
    if classify(base) is not CatKind.POSET:
        return False
    objs = base.objects
    return all(base.hom(x, y) or base.hom(y, x) for i, x in enumerate(objs) for y in objs[i + 1:])


def _linear_order(base: FinCat) -> List[str]:
    return sorted(base.objects, key=lambda x: sum(1 for y in base.objects if base.hom(y, x)))


def random_fiber(rng: random.Random, alg: Algebra, max_copies: int = 2) -> LeftModule:
    choices = indecomposable_modules(alg)
    parts = [rng.choice(choices) for _ in range(rng.randint(0, max_copies))]
    return sum_fibers(alg, parts)


def _random_combination(rng: random.Random, field: Field, basis: Mat) -> List:
    coeffs = [rng.randint(-2, 2) for _ in range(basis.ncols)]
    col = Mat.from_rows(field, [[c] for c in coeffs], 1) if coeffs else Mat.zeros(field, 0, 1)
    return (basis @ col).column_values(0)


def random_chain_module(rng: random.Random, diagram: Diagram, max_copies: int = 2,
                        nonzero: bool = True) -> DiagModule:
    """
    Module trên diagram có base là total order: fiber ngẫu nhiên, T của các
    cạnh liên tiếp lấy ngẫu nhiên trong không gian nghiệm của ràng buộc linearity
    """
    base = diagram.base
    if not is_total_order(base):
        raise ValueError(f"{base.name} is not a total order")
    field = diagram.field
    order = _linear_order(base)
    while True:
        fibers = {x: random_fiber(rng, diagram.algebra(x), max_copies) for x in order}
        if not nonzero or any(f.dim for f in fibers.values()):
            break
    steps = {}
    for lo, hi in zip(order, order[1:]):
        v = base.hom(lo, hi)[0]
        src, tgt = fibers[hi], fibers[lo]
        phi = diagram.phi(v)
        images = [tgt.act(phi.column_values(b)) for b in range(src.algebra.dim)]
        k = kernel_of_blocks(intertwiner_blocks(src.left, images), tgt.dim * src.dim, field)
        steps[(lo, hi)] = unvec(field, _random_combination(rng, field, k), tgt.dim, src.dim)
    trans = {}
    for i, lo in enumerate(order):
        for hi_pos in range(i + 1, len(order)):
            hi = order[hi_pos]
            t = reduce(lambda acc, j: acc @ steps[(order[j], order[j + 1])],
                       range(i + 1, hi_pos), steps[(lo, order[i + 1])])
            trans[base.hom(lo, hi)[0]] = t
    return validate_diag_module(diagram, fibers, trans, name="M")


def concentrated_module(diagram: Diagram, obj: str, fiber: LeftModule) -> DiagModule:
    """fiber tại obj, 0 ở mọi chỗ khác"""
    field = diagram.field
    fibers = {x: fiber if x == obj else zero_fiber(diagram.algebra(x)) for x in diagram.base.objects}
    trans = {v: Mat.zeros(field, fibers[diagram.base.dom(v)].dim, fibers[diagram.base.cod(v)].dim)
             for v in diagram.base.non_identity()}
    return validate_diag_module(diagram, fibers, trans, name=f"{obj}:{fiber.name}")


def zero_bimodule(alg: Algebra) -> SABimodule:
    empty = Mat.zeros(alg.field, 0, 0)
    acts = tuple(empty for _ in range(alg.dim))
    return SABimodule(alg, 0, acts, acts, name="0")


def detached_bimodule(diagram: Diagram, support: Optional[Sequence[str]] = None) -> DiagModule:
    """
    A^x tại các object trong support (mặc định: mọi object), 0 ở chỗ khác;
    mọi T^v = 0
    """
    base = diagram.base
    support = base.objects if support is None else tuple(support)
    fibers = {x: regular_bimodule(diagram.algebra(x)) if x in support else zero_bimodule(diagram.algebra(x))
              for x in base.objects}
    trans = {v: Mat.zeros(diagram.field, fibers[base.dom(v)].dim, fibers[base.cod(v)].dim)
             for v in base.non_identity()}
    name = "A/0" if support == base.objects else f"A@{','.join(support)}"
    return validate_diag_module(diagram, fibers, trans, name=name)


def random_base_change(rng: random.Random, module: DiagModule) -> DiagModule:
    field = module.field
    base = module.diagram.base
    p = {x: random_invertible(rng, field, module.dim(x)) for x in base.objects}
    p_inv = {x: _inverse(m) for x, m in p.items()}
    fibers = {}
    for x in base.objects:
        fib = module.fiber(x)
        acts = tuple(p[x] @ a @ p_inv[x] for a in fib.left)
        fibers[x] = LeftModule(fib.algebra, fib.dim, acts, name=fib.name)
    trans = {v: p[base.dom(v)] @ module.T(v) @ p_inv[base.cod(v)] for v in base.non_identity()}
    return validate_diag_module(module.diagram, fibers, trans, name=module.name)


def random_subdivided_module(rng: random.Random, sub: Subdivision, diagram: Diagram,
                             subdivided: Diagram, max_copies: int = 1) -> DiagModule:
    """
    Module trên A′ = d*A: d*M (M ngẫu nhiên trên base total order) cộng các
    module tập trung tại vài simplex, sau đó đổi basis ngẫu nhiên
    """
    parts = [subdivide_module(random_chain_module(rng, diagram, max_copies, nonzero=False), sub, subdivided)]
    objs = list(subdivided.base.objects)
    for obj in rng.sample(objs, rng.randint(1, min(2, len(objs)))):
        fiber = random_fiber(rng, subdivided.algebra(obj), max_copies)
        parts.append(concentrated_module(subdivided, obj, fiber))
    total = reduce(direct_sum, parts)
    return random_base_change(rng, total)


def seeded(seed: int, salt: str = "") -> random.Random:
    """Random độc lập cho từng (seed, suite)"""
    return random.Random(f"{seed}:{salt}")
