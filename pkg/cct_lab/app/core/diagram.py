"""
Diagrams of algebras trên finite category và module/bimodule trên chúng

Quy ước contravariant: mỗi morphism v: dv -> cv cho
    φ^v: A^{cv} -> A^{dv}   (algebra hom, matrix dim A^{dv} x dim A^{cv})
    T^v: M^{cv} -> M^{dv}   (T^v(b·m) = φ^v(b)·T^v(m))
nên φ^{g∘f} = φ^f φ^g và T^{g∘f} = T^f T^g.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .algkit import (
    Algebra, LeftModule, PeirceData, SABimodule, bimodule_to_enveloping_module,
    direct_sum_bimodule, enveloping, hochschild_dims, intertwiner_blocks, is_bimodule_map,
    opposite, regular_bimodule, regular_module, unvec, validate_algebra, validate_algebra_hom,
    validate_bimodule,
)
from .errors import BaseMismatchError, DiagramError, NaturalityError, NotAPosetError
from .exalg import Field, Mat, Quotient, block_diag, hstack, kernel_of_blocks, kron, quotient_of, rank
from .fincat import (
    CatKind, FinCat, Functor, Subdivision, classify, comma_category, comma_object_name, subdivide,
)
from .logbus import get_log_bus

Fiber = Union[LeftModule, SABimodule]


# ============ DIAGRAMS ============

@dataclass(frozen=True, eq=False)
class Diagram:
    base: FinCat
    algebras: Mapping[str, Algebra]
    homs: Mapping[str, Mat]
    name: str = ""

    @property
    def field(self) -> Field:
        return self.algebras[self.base.objects[0]].field

    def algebra(self, x: str) -> Algebra:
        return self.algebras[x]

    def phi(self, v: str) -> Mat:
        return self.homs[v]

    def phi_vector(self, v: str, b: int) -> List:
        """φ^v(e_b)"""
        return self.homs[v].column_values(b)


def validate_diagram(base: FinCat, algebras: Mapping[str, Algebra], homs: Mapping[str, Mat],
                     name: str = "") -> Diagram:
    """
    Mọi φ^v là algebra hom, identity ↦ identity, φ^{g∘f} = φ^f φ^g

    Hom của identity có thể bỏ trống (tự điền).
    """
    missing = [x for x in base.objects if x not in algebras]
    if missing:
        raise DiagramError(f"no algebra for object(s) {', '.join(missing)}")
    fields = {algebras[x].field for x in base.objects}
    if len(fields) != 1:
        raise DiagramError("algebras live over different fields")
    full: Dict[str, Mat] = {}
    for m in base.morphisms:
        src, tgt = algebras[m.cod], algebras[m.dom]
        if base.is_identity(m.name):
            got = homs.get(m.name)
            eye = Mat.identity(src.field, src.dim)
            if got is not None and got != eye:
                raise DiagramError(f"hom of identity {m.name} is not the identity")
            full[m.name] = eye
            continue
        if m.name not in homs:
            raise DiagramError(f"no algebra hom for morphism {m.name}")
        full[m.name] = validate_algebra_hom(src, tgt, homs[m.name], m.name).matrix
    for (g, f), h in base.table.items():
        if full[h] != full[f] @ full[g]:
            raise NaturalityError(f"{g}∘{f}", "functoriality φ^(g∘f) = φ^f φ^g")
    return Diagram(base, dict(algebras), full, name)


def opposite_diagram(diagram: Diagram) -> Diagram:
    algs = {x: opposite(a) for x, a in diagram.algebras.items()}
    return Diagram(diagram.base, algs, dict(diagram.homs), f"{diagram.name}^op")


def enveloping_diagram(diagram: Diagram) -> Diagram:
    algs = {x: enveloping(a) for x, a in diagram.algebras.items()}
    homs = {v: kron(m, m) for v, m in diagram.homs.items()}
    return Diagram(diagram.base, algs, homs, f"{diagram.name}^e")


# ============ MODULES ============

@dataclass(frozen=True, eq=False)
class DiagModule:
    diagram: Diagram
    fibers: Mapping[str, Fiber]
    transitions: Mapping[str, Mat]
    name: str = ""

    @property
    def field(self) -> Field:
        return self.diagram.field

    @property
    def is_bimodule(self) -> bool:
        return all(isinstance(f, SABimodule) for f in self.fibers.values())

    def fiber(self, x: str) -> Fiber:
        return self.fibers[x]

    def dim(self, x: str) -> int:
        return self.fibers[x].dim

    def T(self, v: str) -> Mat:
        return self.transitions[v]


class DiagBimodule(DiagModule):
    """DiagModule mà mọi fiber là SABimodule"""


def _module_class(fibers: Mapping[str, Fiber]):
    kinds = {isinstance(f, SABimodule) for f in fibers.values()}
    if len(kinds) > 1:
        raise DiagramError("fibers mix left modules and bimodules")
    return DiagBimodule if kinds == {True} else DiagModule


def validate_diag_module(diagram: Diagram, fibers: Mapping[str, Fiber],
                         transitions: Mapping[str, Mat], name: str = "") -> DiagModule:
    """
    Fiber là module/bimodule trên A^x, T^v tuyến tính theo φ^v, T functorial
    """
    base = diagram.base
    cls = _module_class(fibers)
    for x in base.objects:
        if x not in fibers:
            raise DiagramError(f"no fiber at object {x}")
        if not fibers[x].algebra.same_as(diagram.algebra(x)):
            raise BaseMismatchError(f"fiber at {x} is not over the algebra A^{x}")
    field = diagram.field
    full: Dict[str, Mat] = {}
    for m in base.morphisms:
        src, tgt = fibers[m.cod], fibers[m.dom]
        if base.is_identity(m.name):
            eye = Mat.identity(field, src.dim)
            got = transitions.get(m.name)
            if got is not None and got != eye:
                raise NaturalityError(m.name, "identity acts as identity")
            full[m.name] = eye
            continue
        t = transitions.get(m.name)
        if t is None:
            raise DiagramError(f"no transition map for morphism {m.name}")
        if t.shape != (tgt.dim, src.dim):
            raise DiagramError(f"transition {m.name} has shape {t.shape}, expected {(tgt.dim, src.dim)}")
        phi = diagram.phi(m.name)
        for b in range(src.algebra.dim):
            image = phi.column_values(b)
            if t @ src.left[b] != tgt.act(image) @ t:
                raise NaturalityError(m.name, "linearity T(b·m) = φ(b)·T(m)")
            if cls is DiagBimodule and t @ src.right[b] != tgt.act_right(image) @ t:
                raise NaturalityError(m.name, "linearity T(m·b) = T(m)·φ(b)")
        full[m.name] = t
    for (g, f), h in base.table.items():
        if full[h] != full[f] @ full[g]:
            raise NaturalityError(h, "functoriality T^(g∘f) = T^f T^g")
    return cls(diagram, dict(fibers), full, name)


def regular_diagram_module(diagram: Diagram) -> DiagModule:
    fibers = {x: regular_module(a) for x, a in diagram.algebras.items()}
    return DiagModule(diagram, fibers, dict(diagram.homs), name=diagram.name)


def regular_diagram_bimodule(diagram: Diagram) -> DiagBimodule:
    fibers = {x: regular_bimodule(a) for x, a in diagram.algebras.items()}
    return DiagBimodule(diagram, fibers, dict(diagram.homs), name=diagram.name)


def direct_sum(m: DiagModule, n: DiagModule) -> DiagModule:
    field = m.field
    bimod = m.is_bimodule and n.is_bimodule
    fibers = {}
    for x in m.diagram.base.objects:
        p, q = m.fiber(x), n.fiber(x)
        if bimod:
            fibers[x] = direct_sum_bimodule(p, q)
        else:
            left = tuple(block_diag(field, [a, b]) for a, b in zip(p.left, q.left))
            fibers[x] = LeftModule(p.algebra, p.dim + q.dim, left, name=f"{p.name}+{q.name}")
    trans = {v: block_diag(field, [m.T(v), n.T(v)]) for v in m.transitions}
    cls = DiagBimodule if bimod else DiagModule
    return cls(m.diagram, fibers, trans, name=f"{m.name}+{n.name}")


def bimodule_as_enveloping_module(m: DiagBimodule, env: Optional[Diagram] = None) -> DiagModule:
    """A-bimodule M như module trái trên A^e"""
    env = env or enveloping_diagram(m.diagram)
    fibers = {x: bimodule_to_enveloping_module(m.fiber(x), env.algebra(x)) for x in m.fibers}
    return DiagModule(env, fibers, dict(m.transitions), name=f"{m.name}^e")


# ============ MAPS ============

@dataclass(frozen=True, eq=False)
class DiagModuleMap:
    source: DiagModule
    target: DiagModule
    components: Mapping[str, Mat]

    def at(self, x: str) -> Mat:
        return self.components[x]


def validate_module_map(source: DiagModule, target: DiagModule,
                        components: Mapping[str, Mat]) -> DiagModuleMap:
    _require_same_diagram(source, target)
    base = source.diagram.base
    bimod = source.is_bimodule and target.is_bimodule
    for x in base.objects:
        eta = components.get(x)
        if eta is None or eta.shape != (target.dim(x), source.dim(x)):
            raise DiagramError(f"component at {x} missing or mis-shaped")
        sf, tf = source.fiber(x), target.fiber(x)
        if any(eta @ p != q @ eta for p, q in zip(sf.left, tf.left)):
            raise NaturalityError(x, "left linearity of component")
        if bimod and any(eta @ p != q @ eta for p, q in zip(sf.right, tf.right)):
            raise NaturalityError(x, "right linearity of component")
    for v in base.non_identity():
        dv, cv = base.dom(v), base.cod(v)
        if components[dv] @ source.T(v) != target.T(v) @ components[cv]:
            raise NaturalityError(v)
    return DiagModuleMap(source, target, dict(components))


def identity_map(m: DiagModule) -> DiagModuleMap:
    return DiagModuleMap(m, m, {x: Mat.identity(m.field, m.dim(x)) for x in m.fibers})


def compose_maps(g: DiagModuleMap, f: DiagModuleMap) -> DiagModuleMap:
    return DiagModuleMap(f.source, g.target, {x: g.at(x) @ f.at(x) for x in f.components})


def _require_same_diagram(m: DiagModule, n: DiagModule):
    """Cùng base category (cùng object), cùng algebra và φ^v từng chỗ"""
    if m.diagram is n.diagram:
        return
    if m.diagram.base is not n.diagram.base:
        raise BaseMismatchError(f"{m.name} and {n.name} live over different base categories")
    for x in m.diagram.base.objects:
        if not m.diagram.algebra(x).same_as(n.diagram.algebra(x)):
            raise BaseMismatchError(f"{m.name} and {n.name} have different algebras at {x}")
    for v in m.diagram.base.non_identity():
        if m.diagram.phi(v) != n.diagram.phi(v):
            raise BaseMismatchError(f"{m.name} and {n.name} have different structure maps at {v}")


def hom_space(m: DiagModule, n: DiagModule) -> List[DiagModuleMap]:
    """
    Basis của Hom(M, N): vec(η^x) nối theo thứ tự object, rồi lấy kernel
    của constraint linearity (từng object) và naturality (từng morphism)
    """
    _require_same_diagram(m, n)
    base = m.diagram.base
    field = m.field
    bimod = m.is_bimodule and n.is_bimodule
    offsets: Dict[str, int] = {}
    total = 0
    for x in base.objects:
        offsets[x] = total
        total += n.dim(x) * m.dim(x)

    def blocks():
        for x in base.objects:
            sf, tf = m.fiber(x), n.fiber(x)
            local = intertwiner_blocks(sf.left, tf.left)
            if bimod:
                local += intertwiner_blocks(sf.right, tf.right)
            for c in local:
                yield _embed(field, c.nrows, total, [(offsets[x], c)])
        for v in base.non_identity():
            dv, cv = base.dom(v), base.cod(v)
            rows = n.dim(dv) * m.dim(cv)
            left = kron(Mat.identity(field, n.dim(dv)), m.T(v).transpose())
            right = -kron(n.T(v), Mat.identity(field, m.dim(cv)))
            yield _embed(field, rows, total, [(offsets[dv], left), (offsets[cv], right)])

    k = kernel_of_blocks(blocks(), total, field)
    result = []
    for j in range(k.ncols):
        col = k.column_values(j)
        comps = {x: unvec(field, col[offsets[x]:offsets[x] + n.dim(x) * m.dim(x)], n.dim(x), m.dim(x))
                 for x in base.objects}
        result.append(DiagModuleMap(m, n, comps))
    get_log_bus().debug(f"[HOM] dim Hom({m.name}, {n.name}) = {len(result)} ({total} unknowns)")
    return result


def hom_space_bimod(m: DiagBimodule, n: DiagBimodule) -> List[DiagModuleMap]:
    if not (m.is_bimodule and n.is_bimodule):
        raise DiagramError("hom_space_bimod needs two diagram bimodules")
    return hom_space(m, n)


def _embed(field: Field, nrows: int, ncols: int, pieces: Sequence[Tuple[int, Mat]]) -> Mat:
    entries: Dict[int, Dict[int, object]] = {}
    for col0, mat in pieces:
        for i, j, v in mat.items():
            row = entries.setdefault(i, {})
            c = col0 + j
            row[c] = row[c] + v if c in row else v
    return Mat.from_dod(field, entries, (nrows, ncols))


def maps_to_matrix(maps: Sequence[DiagModuleMap], objects: Sequence[str], field: Field) -> Mat:
    """Mỗi map thành một cột vec(η) (dùng để đo rank của một họ map)"""
    columns: Dict[int, Dict[int, object]] = {}
    height = 0
    for j, eta in enumerate(maps):
        offset = 0
        for x in objects:
            comp = eta.at(x)
            for r, c, v in comp.items():
                columns.setdefault(offset + r * comp.ncols + c, {})[j] = v
            offset += comp.nrows * comp.ncols
        height = offset
    return Mat.from_dod(field, columns, (height, len(maps)))


# ============ PULLBACK + SUBDIVISION ============

def pullback_diagram(functor: Functor, diagram: Diagram) -> Diagram:
    if functor.target is not diagram.base:
        raise BaseMismatchError("functor target is not the diagram's base")
    algs = {s: diagram.algebra(functor.obj(s)) for s in functor.source.objects}
    homs = {v.name: diagram.phi(functor.mor(v.name)) for v in functor.source.morphisms}
    return Diagram(functor.source, algs, homs, f"{functor.name}*{diagram.name}")


def pullback_module(functor: Functor, module: DiagModule,
                    pulled: Optional[Diagram] = None) -> DiagModule:
    pulled = pulled or pullback_diagram(functor, module.diagram)
    fibers = {s: module.fiber(functor.obj(s)) for s in functor.source.objects}
    trans = {v.name: module.T(functor.mor(v.name)) for v in functor.source.morphisms}
    return type(module)(pulled, fibers, trans, f"{functor.name}*{module.name}")


def pullback_map(functor: Functor, eta: DiagModuleMap, source: DiagModule,
                 target: DiagModule) -> DiagModuleMap:
    return DiagModuleMap(source, target, {s: eta.at(functor.obj(s)) for s in functor.source.objects})


def subdivide_diagram(diagram: Diagram, sub: Optional[Subdivision] = None) -> Diagram:
    """A′ = d*A"""
    sub = sub or subdivide(diagram.base)
    return pullback_diagram(sub.d, diagram)


def subdivide_module(module: DiagModule, sub: Optional[Subdivision] = None,
                     diagram: Optional[Diagram] = None) -> DiagModule:
    """M′ = d*M"""
    sub = sub or subdivide(module.diagram.base)
    return pullback_module(sub.d, module, diagram)


# ============ LEFT ADJOINT f_! ============

@dataclass(frozen=True)
class _Piece:
    """Một thành phần A^i ⊗_w N^σ của colimit"""
    w: str
    sigma: str
    dim_a: int
    dim_n: int
    quotient: Quotient
    offset: int


@dataclass(frozen=True)
class _ColimitFiber:
    pieces: Tuple[_Piece, ...]
    by_name: Mapping[str, int]
    total: int
    quotient: Quotient

    @property
    def dim(self) -> int:
        return self.quotient.dim


class Pushforward:
    """
    f_! N = colim_{(w,σ) ∈ i/f} A^i ⊗_{w} N^σ, lưu kèm presentation của mỗi
    fiber để dựng unit, counit và f_! trên map
    """

    def __init__(self, functor: Functor, module: DiagModule, diagram: Diagram):
        if functor.target is not diagram.base or module.diagram.base is not functor.source:
            raise BaseMismatchError("f_! needs N over f*A with f: D -> C and A over C")
        self.functor = functor
        self.source_module = module
        self.diagram = diagram
        self.field = diagram.field
        self.commas = {i: comma_category(functor, i) for i in diagram.base.objects}
        self.fibers: Dict[str, _ColimitFiber] = {i: self._fiber(i) for i in diagram.base.objects}
        self.module = self._assemble()
        get_log_bus().debug(f"[SHRIEK] {functor.name}_!({module.name}): dims="
                            f"{ {i: f.dim for i, f in self.fibers.items()} }")

    # ---------- presentation ----------

    def _piece_relations(self, i: str, w: str, sigma: str) -> Mat:
        """Cột: a·φ^w(b) ⊗ n - a ⊗ b·n"""
        alg_i = self.diagram.algebra(i)
        fib = self.source_module.fiber(sigma)
        phi = self.diagram.phi(w)
        a_dim, n_dim, b_dim = alg_i.dim, fib.dim, phi.ncols
        field = self.field
        entries: Dict[int, Dict[int, object]] = {}
        col = 0
        for a in range(a_dim):
            for b in range(b_dim):
                image = phi.column_values(b)
                prod = alg_i.mul(alg_i.basis_vector(a), image)
                act = fib.left[b].dod()
                for n in range(n_dim):
                    for k, c in enumerate(prod):
                        if c:
                            entries.setdefault(k * n_dim + n, {})[col] = c
                    for r, row in act.items():
                        v = row.get(n)
                        if v:
                            cell = entries.setdefault(a * n_dim + r, {})
                            cell[col] = cell.get(col, field.zero) - v
                    col += 1
        return Mat.from_dod(field, entries, (a_dim * n_dim, col))

    def _fiber(self, i: str) -> _ColimitFiber:
        field = self.field
        comma = self.commas[i]
        pieces: List[_Piece] = []
        by_name: Dict[str, int] = {}
        offset = 0
        a_dim = self.diagram.algebra(i).dim
        for name, (w, sigma) in comma.pairs.items():
            n_dim = self.source_module.dim(sigma)
            q = quotient_of(a_dim * n_dim, self._piece_relations(i, w, sigma), field)
            by_name[name] = len(pieces)
            pieces.append(_Piece(w, sigma, a_dim, n_dim, q, offset))
            offset += q.dim

        entries: Dict[int, Dict[int, object]] = {}
        col = 0
        cat = comma.category
        for mor in cat.morphisms:
            if cat.is_identity(mor.name):
                continue
            src, tgt = pieces[by_name[mor.dom]], pieces[by_name[mor.cod]]
            t = self.source_module.T(comma.carrier[mor.name])
            moved = src.quotient.projection @ kron(Mat.identity(field, a_dim), t) @ tgt.quotient.lift
            for q in range(tgt.quotient.dim):
                entries.setdefault(tgt.offset + q, {})[col] = field.one
                for r, v in _column_items(moved, q):
                    cell = entries.setdefault(src.offset + r, {})
                    cell[col] = cell.get(col, field.zero) - v
                col += 1
        relations = Mat.from_dod(field, entries, (offset, col))
        return _ColimitFiber(tuple(pieces), by_name, offset, quotient_of(offset, relations, field))

    # ---------- structure ----------

    def _descend(self, i: str, per_piece) -> Mat:
        """Ma trận trên ⊕ pieces (block diag per_piece) rồi chiếu xuống colimit"""
        fib = self.fibers[i]
        blocks = [p.quotient.projection @ per_piece(p) @ p.quotient.lift for p in fib.pieces]
        return fib.quotient.projection @ block_diag(self.field, blocks) @ fib.quotient.lift

    def _assemble(self) -> DiagModule:
        field = self.field
        base = self.diagram.base
        fibers = {}
        for i in base.objects:
            alg = self.diagram.algebra(i)
            acts = tuple(self._descend(i, lambda p, b=b: kron(alg.left_matrices[b], Mat.identity(field, p.dim_n)))
                         for b in range(alg.dim))
            fibers[i] = LeftModule(alg, self.fibers[i].dim, acts, name=f"f_!N@{i}")
        trans = {m.name: self._transition(m.name) for m in base.morphisms}
        name = f"{self.functor.name}_!{self.source_module.name}"
        return validate_diag_module(self.diagram, fibers, trans, name)

    def _transition(self, v: str) -> Mat:
        """T^v: colim^i -> colim^h cho v: h -> i, (w, σ) ↦ (w∘v, σ)"""
        base = self.diagram.base
        field = self.field
        h, i = base.dom(v), base.cod(v)
        src, tgt = self.fibers[i], self.fibers[h]
        reindex = self.commas[i].reindex(v)
        phi = self.diagram.phi(v)
        entries: Dict[int, Dict[int, object]] = {}
        for name, idx in src.by_name.items():
            p = src.pieces[idx]
            q = tgt.pieces[tgt.by_name[reindex[name]]]
            part = q.quotient.projection @ kron(phi, Mat.identity(field, p.dim_n)) @ p.quotient.lift
            for r, c, val in part.items():
                entries.setdefault(q.offset + r, {})[p.offset + c] = val
        middle = Mat.from_dod(field, entries, (tgt.total, src.total))
        return tgt.quotient.projection @ middle @ src.quotient.lift

    # ---------- adjunction ----------

    def unit(self) -> DiagModuleMap:
        """η_N: N -> f*f_!N, n ↦ 1 ⊗ n trong thành phần (id, σ)"""
        field = self.field
        pulled = pullback_module(self.functor, self.module)
        comps = {}
        for sigma in self.functor.source.objects:
            i = self.functor.obj(sigma)
            fib = self.fibers[i]
            p = fib.pieces[fib.by_name[comma_object_name(self.diagram.base.identity(i), sigma)]]
            unit_col = Mat.column(field, list(self.diagram.algebra(i).unit))
            into_piece = p.quotient.projection @ kron(unit_col, Mat.identity(field, p.dim_n))
            embed = _offset_rows(field, into_piece, p.offset, fib.total)
            comps[sigma] = fib.quotient.projection @ embed
        return DiagModuleMap(self.source_module, pulled, comps)

    def counit_for(self, target: DiagModule) -> DiagModuleMap:
        """
        ε_M: f_!f*M -> M khi self là pushforward của f*M; a ⊗ m ↦ a·T^w(m)
        """
        field = self.field
        comps = {}
        for i in self.diagram.base.objects:
            fib = self.fibers[i]
            mod_i = target.fiber(i)
            parts = []
            for p in fib.pieces:
                t_w = target.T(p.w)
                evaluate = hstack(field, [mod_i.left[a] @ t_w for a in range(p.dim_a)], nrows=mod_i.dim)
                parts.append(evaluate @ p.quotient.lift)
            comps[i] = hstack(field, parts, nrows=mod_i.dim) @ fib.quotient.lift
        return DiagModuleMap(self.module, target, comps)

    def pushforward_map(self, other: 'Pushforward', theta: DiagModuleMap) -> DiagModuleMap:
        """f_!θ: self.module -> other.module cho θ: N -> N′"""
        field = self.field
        comps = {}
        for i in self.diagram.base.objects:
            src, tgt = self.fibers[i], other.fibers[i]
            blocks = []
            for name, idx in src.by_name.items():
                p, q = src.pieces[idx], tgt.pieces[tgt.by_name[name]]
                blocks.append(q.quotient.projection
                              @ kron(Mat.identity(field, p.dim_a), theta.at(p.sigma))
                              @ p.quotient.lift)
            comps[i] = tgt.quotient.projection @ block_diag(field, blocks) @ src.quotient.lift
        return DiagModuleMap(self.module, other.module, comps)


def _column_items(mat: Mat, j: int):
    for i, row in mat.dod().items():
        v = row.get(j)
        if v:
            yield i, v


def _offset_rows(field: Field, mat: Mat, row0: int, nrows: int) -> Mat:
    entries = {row0 + i: dict(row) for i, row in mat.dod().items()}
    return Mat.from_dod(field, entries, (nrows, mat.ncols))


def f_shriek(functor: Functor, module: DiagModule, diagram: Diagram) -> DiagModule:
    """f_!N trên A (A là diagram trên target của f, N trên f*A)"""
    return Pushforward(functor, module, diagram).module


@dataclass
class AdjunctionData:
    unit: DiagModuleMap
    counit: DiagModuleMap
    left_triangle: bool    # ε_{f_!N} ∘ f_!(η_N) = id
    right_triangle: bool   # f*(ε_M) ∘ η_{f*M} = id
    hom_dims: Tuple[int, int]
    bijective: bool

    @property
    def ok(self) -> bool:
        return self.left_triangle and self.right_triangle and self.bijective


def _checked(eta: DiagModuleMap) -> DiagModuleMap:
    """unit/counit phải là module map thật sự"""
    return validate_module_map(eta.source, eta.target, eta.components)


def adjunction_data(functor: Functor, n_module: DiagModule, m_module: DiagModule,
                    diagram: Diagram) -> AdjunctionData:
    """
    Unit/counit của f_! ⊣ f*, hai triangle identity và song ánh
    Hom(f_!N, M) -> Hom(N, f*M), g ↦ f*(g) ∘ η_N
    """
    field = diagram.field
    pf_n = Pushforward(functor, n_module, diagram)
    eta_n = _checked(pf_n.unit())

    pulled_shriek = pullback_module(functor, pf_n.module)
    pf_twice = Pushforward(functor, pulled_shriek, diagram)
    eps_shriek = pf_twice.counit_for(pf_n.module)
    shriek_eta = pf_n.pushforward_map(pf_twice, eta_n)
    left_ok = all(eps_shriek.at(i) @ shriek_eta.at(i) == Mat.identity(field, pf_n.module.dim(i))
                  for i in diagram.base.objects)

    pulled_m = pullback_module(functor, m_module)
    pf_m = Pushforward(functor, pulled_m, diagram)
    eps_m = _checked(pf_m.counit_for(m_module))
    eta_pulled = pf_m.unit()
    right_ok = all(eps_m.at(functor.obj(s)) @ eta_pulled.at(s) == Mat.identity(field, pulled_m.dim(s))
                   for s in functor.source.objects)

    left_hom = hom_space(pf_n.module, m_module)
    right_hom = hom_space(n_module, pulled_m)
    images = [DiagModuleMap(n_module, pulled_m,
                            {s: g.at(functor.obj(s)) @ eta_n.at(s) for s in functor.source.objects})
              for g in left_hom]
    image_rank = rank(maps_to_matrix(images, functor.source.objects, field)) if images else 0
    bijective = len(left_hom) == len(right_hom) == image_rank
    return AdjunctionData(eta_n, eps_m, left_ok, right_ok, (len(left_hom), len(right_hom)), bijective)


# ============ THE ! CONSTRUCTION ============

@dataclass(frozen=True, eq=False)
class ShriekAlgebra:
    """
    A! = ⊕_{i ≤ j} A^i, basis (i, j, b); (h,i,b)(i,l,b′) = (h,l, b·φ^{hi}(b′))
    """
    diagram: Diagram
    algebra: Algebra
    labels: Tuple[Tuple[str, str, int], ...]
    index: Mapping[Tuple[str, str, int], int]
    pairs: Tuple[Tuple[str, str], ...]

    def arrow(self, i: str, j: str) -> str:
        return self.diagram.base.hom(i, j)[0]


def _require_poset(base: FinCat):
    kind = classify(base)
    if kind is not CatKind.POSET:
        raise NotAPosetError(kind.value)


def shriek_algebra(diagram: Diagram) -> ShriekAlgebra:
    base = diagram.base
    _require_poset(base)
    field = diagram.field
    objects = base.objects
    obj_pos = {x: k for k, x in enumerate(objects)}
    pairs = tuple((i, j) for i in objects for j in objects if base.hom(i, j))
    labels = tuple((i, j, b) for i, j in pairs for b in range(diagram.algebra(i).dim))
    index = {lab: k for k, lab in enumerate(labels)}

    phis = {(h, i): diagram.phi(base.hom(h, i)[0]) for h, i in pairs}
    rows = []
    for (h, i, b) in labels:
        alg_h = diagram.algebra(h)
        e_b = alg_h.basis_vector(b)
        row = []
        for (i2, l, b2) in labels:
            if i2 != i:
                row.append({})
                continue
            prod = alg_h.mul(e_b, phis[(h, i)].column_values(b2))
            row.append({index[(h, l, k)]: c for k, c in enumerate(prod) if c})
        rows.append(tuple(row))

    dim = len(labels)
    unit = [field.zero] * dim
    idempotents = []
    for x in objects:
        e = [field.zero] * dim
        for k, c in enumerate(diagram.algebra(x).unit):
            if c:
                unit[index[(x, x, k)]] = c
                e[index[(x, x, k)]] = c
        idempotents.append(tuple(e))
    peirce = PeirceData(tuple(idempotents), tuple((obj_pos[i], obj_pos[j]) for i, j, _ in labels))
    alg = validate_algebra(field, dim, tuple(rows), tuple(unit), f"{diagram.name}!", peirce)
    get_log_bus().debug(f"[SHRIEK] {alg!r} from {len(pairs)} comparable pairs")
    return ShriekAlgebra(diagram, alg, labels, index, pairs)


@dataclass(frozen=True, eq=False)
class ShriekBimodule:
    shriek: ShriekAlgebra
    module: SABimodule
    labels: Tuple[Tuple[str, str, int], ...]
    index: Mapping[Tuple[str, str, int], int]


def shriek_bimodule(m: DiagBimodule, sa: Optional[ShriekAlgebra] = None) -> ShriekBimodule:
    """
    M! = ⊕_{i ≤ j} M^i; (h,i,b)·(i,j,m) = (h,j, b·T^{hi}m),
    (h,i,m)·(i,j,b) = (h,j, m·φ^{hi}(b))
    """
    if not m.is_bimodule:
        raise DiagramError("M! needs a diagram bimodule")
    sa = sa or shriek_algebra(m.diagram)
    field = m.field
    base = m.diagram.base
    labels = tuple((i, j, k) for i, j in sa.pairs for k in range(m.dim(i)))
    index = {lab: k for k, lab in enumerate(labels)}
    dim = len(labels)
    by_source: Dict[str, List[Tuple[str, int]]] = {}
    for (i, j, k) in labels:
        by_source.setdefault(i, []).append((j, k))
    by_target: Dict[str, List[Tuple[str, int]]] = {}
    for (h, i, k) in labels:
        by_target.setdefault(i, []).append((h, k))

    left, right = [], []
    for (h, i, b) in sa.labels:
        t = m.T(base.hom(h, i)[0])
        act = m.fiber(h).left[b] @ t
        entries: Dict[int, Dict[int, object]] = {}
        for j, k in by_source.get(i, []):
            col = index[(i, j, k)]
            for r, v in _column_items(act, k):
                entries.setdefault(index[(h, j, r)], {})[col] = v
        left.append(Mat.from_dod(field, entries, (dim, dim)))

    for (i, j, b) in sa.labels:
        entries = {}
        for h, k in by_target.get(i, []):
            image = m.diagram.phi(base.hom(h, i)[0]).column_values(b)
            act = m.fiber(h).act_right(image)
            col = index[(h, i, k)]
            for r, v in _column_items(act, k):
                entries.setdefault(index[(h, j, r)], {})[col] = v
        right.append(Mat.from_dod(field, entries, (dim, dim)))

    bimod = validate_bimodule(sa.algebra, dim, left, right, name=f"{m.name}!")
    return ShriekBimodule(sa, bimod, labels, index)


def shriek_map(eta: DiagModuleMap, source: ShriekBimodule, target: ShriekBimodule) -> Mat:
    """η! = ⊕_{i ≤ j} η^i; kiểm tra là map của A!-bimodule"""
    field = eta.source.field
    entries: Dict[int, Dict[int, object]] = {}
    for (i, j, k) in source.labels:
        col = source.index[(i, j, k)]
        for r, v in _column_items(eta.at(i), k):
            entries.setdefault(target.index[(i, j, r)], {})[col] = v
    mat = Mat.from_dod(field, entries, (target.module.dim, source.module.dim))
    if not is_bimodule_map(source.module, target.module, mat):
        raise NaturalityError("!", "η! is not a bimodule map")
    return mat


def shriek_pushforward_map(functor: Functor, theta: DiagModuleMap, diagram: Diagram) -> DiagModuleMap:
    """f_!θ: f_!N -> f_!N′"""
    source = Pushforward(functor, theta.source, diagram)
    target = Pushforward(functor, theta.target, diagram)
    return source.pushforward_map(target, theta)


def shriek_cohomology(diagram: Diagram, module: DiagBimodule, max_degree: int,
                      cap: int = 20000, reduced: bool = True) -> List[int]:
    """dim H^n(A!, M!) cho n = 0..max_degree"""
    sa = shriek_algebra(diagram)
    mb = shriek_bimodule(module, sa)
    return hochschild_dims(sa.algebra, mb.module, max_degree, reduced=reduced, cap=cap)
