"""
Finite categories - composition tables, nerve, subdivision, comma categories

Quy ước: compose(g, f) = g∘f (f chạy trước). Identity của object x luôn
có tên reserved "id_<x>".
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    CategoryError, CompositionTypeError, DanglingMorphismError, DegenerateImageError,
    FunctorError, IdentityLawError, IncompleteTableError, NonAssociativeError, NotADeltaError,
)
from .logbus import get_log_bus


class CatKind(Enum):
    GENERAL = "general"
    DELTA = "delta"
    POSET = "poset"


@dataclass(frozen=True)
class Morphism:
    name: str
    dom: str
    cod: str


def identity_name(obj: str) -> str:
    return f"id_{obj}"


class FinCat:
    """
    Finite category đã được validate (xem build_category)

    Không tạo trực tiếp: dùng build_category / validate_category / poset_category.
    """

    def __init__(self, objects: Sequence[str], morphisms: Sequence[Morphism],
                 table: Mapping[Tuple[str, str], str], name: str = ""):
        self.name = name
        self._objects = tuple(objects)
        self._morphisms = tuple(morphisms)
        self._by_name = {m.name: m for m in self._morphisms}
        self._table = dict(table)
        self._homs: Dict[Tuple[str, str], List[str]] = {}
        self._out: Dict[str, List[str]] = {x: [] for x in self._objects}
        for m in self._morphisms:
            self._homs.setdefault((m.dom, m.cod), []).append(m.name)
            if not self.is_identity(m.name):
                self._out[m.dom].append(m.name)

    @property
    def objects(self) -> Tuple[str, ...]:
        return self._objects

    @property
    def morphisms(self) -> Tuple[Morphism, ...]:
        return self._morphisms

    @property
    def table(self) -> Mapping[Tuple[str, str], str]:
        return self._table

    def morphism(self, name: str) -> Morphism:
        try:
            return self._by_name[name]
        except KeyError:
            raise DanglingMorphismError(name, name) from None

    def has_morphism(self, name: str) -> bool:
        return name in self._by_name

    def dom(self, name: str) -> str:
        return self.morphism(name).dom

    def cod(self, name: str) -> str:
        return self.morphism(name).cod

    def identity(self, obj: str) -> str:
        return identity_name(obj)

    def is_identity(self, name: str) -> bool:
        m = self._by_name[name]
        return m.dom == m.cod and name == identity_name(m.dom)

    def hom(self, x: str, y: str) -> Tuple[str, ...]:
        return tuple(self._homs.get((x, y), ()))

    def out_morphisms(self, x: str) -> Tuple[str, ...]:
        """Các morphism không phải identity đi ra từ x"""
        return tuple(self._out.get(x, ()))

    def non_identity(self) -> Tuple[str, ...]:
        return tuple(m.name for m in self._morphisms if not self.is_identity(m.name))

    def compose(self, g: str, f: str) -> str:
        try:
            return self._table[(g, f)]
        except KeyError:
            raise CompositionTypeError(g, f, "not composable") from None

    def compose_path(self, path: Sequence[str]) -> str:
        """path = [f1, f2, ...] theo thứ tự chạy; trả về ... ∘ f2 ∘ f1"""
        result = path[0]
        for m in path[1:]:
            result = self.compose(m, result)
        return result

    def __repr__(self) -> str:
        return f"FinCat({self.name or '?'}: {len(self._objects)} objects, {len(self._morphisms)} morphisms)"


# ============ CONSTRUCTION + VALIDATION ============

def build_category(objects: Sequence[str], morphisms: Iterable, compose: Iterable,
                   identity_compose: str = "auto", name: str = "") -> FinCat:
    """
    Dựng và validate FinCat

    Args:
        objects: Tên các object
        morphisms: Morphism hoặc (name, dom, cod), không kể identity
        compose: (g, f, g∘f) entries
        identity_compose: "auto" tự điền các composite có identity;
            "explicit" bắt buộc table liệt kê cả chúng

    Raises:
        DanglingMorphismError, CompositionTypeError, IncompleteTableError,
        IdentityLawError, NonAssociativeError
    """
    objects = list(objects)
    if len(set(objects)) != len(objects):
        raise CategoryError("duplicate object names")
    obj_set = set(objects)

    mors: List[Morphism] = [Morphism(identity_name(x), x, x) for x in objects]
    by_name = {m.name: m for m in mors}
    for entry in morphisms:
        m = entry if isinstance(entry, Morphism) else Morphism(*entry)
        for endpoint in (m.dom, m.cod):
            if endpoint not in obj_set:
                raise DanglingMorphismError(m.name, endpoint)
        if m.name in by_name:
            if by_name[m.name] == m and m.name == identity_name(m.dom):
                continue
            raise CategoryError(f"duplicate or reserved morphism name '{m.name}'")
        if m.name.startswith("id_") and m.name[3:] in obj_set:
            raise CategoryError(f"reserved morphism name '{m.name}'")
        mors.append(m)
        by_name[m.name] = m

    table: Dict[Tuple[str, str], str] = {}
    for g, f, h in compose:
        for n in (g, f, h):
            if n not in by_name:
                raise DanglingMorphismError(f"compose({g}, {f})", n)
        mg, mf, mh = by_name[g], by_name[f], by_name[h]
        if mg.dom != mf.cod:
            raise CompositionTypeError(g, f, "not composable")
        if mh.dom != mf.dom or mh.cod != mg.cod:
            raise CompositionTypeError(g, f, f"result {h} has wrong domain or codomain")
        if table.get((g, f), h) != h:
            raise CompositionTypeError(g, f, "conflicting entries")
        table[(g, f)] = h

    if identity_compose == "auto":
        for m in mors:
            table.setdefault((identity_name(m.cod), m.name), m.name)
            table.setdefault((m.name, identity_name(m.dom)), m.name)
    elif identity_compose != "explicit":
        raise CategoryError(f"identity_compose must be 'auto' or 'explicit', got {identity_compose!r}")

    out: Dict[str, List[str]] = {x: [] for x in objects}
    for m in mors:
        out[m.dom].append(m.name)
    for f in mors:
        for g in out[f.cod]:
            if (g, f.name) not in table:
                raise IncompleteTableError(g, f.name)

    for f in mors:
        left = table[(identity_name(f.cod), f.name)]
        if left != f.name:
            raise IdentityLawError(identity_name(f.cod), f.name, left)
        right = table[(f.name, identity_name(f.dom))]
        if right != f.name:
            raise IdentityLawError(identity_name(f.dom), f.name, right)

    for f in mors:
        for g in out[f.cod]:
            gf = table[(g, f.name)]
            for h in out[by_name[g].cod]:
                if table[(table[(h, g)], f.name)] != table[(h, gf)]:
                    raise NonAssociativeError(h, g, f.name)

    cat = FinCat(objects, mors, table, name)
    get_log_bus().debug(f"[FINCAT] {cat!r}")
    return cat


def poset_category(objects: Sequence[str], relations: Iterable[Tuple[str, str]], name: str = "") -> FinCat:
    """Poset từ các quan hệ a ≤ b (tự lấy bao đóng bắc cầu); morphism tên "a<b" """
    objects = list(objects)
    obj_set = set(objects)
    below: Dict[str, set] = {x: set() for x in objects}
    for a, b in relations:
        for x in (a, b):
            if x not in obj_set:
                raise DanglingMorphismError(f"{a}<{b}", x)
        if a != b:
            below[b].add(a)
    changed = True
    while changed:
        changed = False
        for y in objects:
            extra = set()
            for x in below[y]:
                extra |= below[x] - below[y]
            if extra:
                below[y] |= extra
                changed = True
    for y in objects:
        if y in below[y]:
            raise CategoryError(f"relations are not antisymmetric at '{y}'")

    def leq(a, b):
        return a == b or a in below[b]

    def mor(a, b):
        return identity_name(a) if a == b else f"{a}<{b}"

    morphisms = [(mor(a, b), a, b) for a in objects for b in objects if a != b and leq(a, b)]
    compose = []
    for a in objects:
        for b in objects:
            if a != b and leq(a, b):
                for c in objects:
                    if b != c and leq(b, c):
                        compose.append((mor(b, c), mor(a, b), mor(a, c)))
    return build_category(objects, morphisms, compose, "auto", name)


def validate_category(raw: Mapping) -> FinCat:
    """
    Category từ JSON đã parse

    Format: {"objects": [...], "morphisms": [{"name","dom","cod"}],
             "compose": [{"g","f","result"}], "identity_compose": "auto"|"explicit"}
    hoặc poset shorthand {"objects": [...], "relations": [[a, b], ...]}.
    """
    if "objects" not in raw:
        raise CategoryError("category needs an 'objects' list")
    objects = [str(x) for x in raw["objects"]]
    name = str(raw.get("name", ""))
    if "relations" in raw:
        return poset_category(objects, [(str(a), str(b)) for a, b in raw["relations"]], name)
    try:
        morphisms = [Morphism(str(m["name"]), str(m["dom"]), str(m["cod"])) for m in raw.get("morphisms", [])]
        compose = [(str(e["g"]), str(e["f"]), str(e["result"])) for e in raw.get("compose", [])]
    except (KeyError, TypeError) as e:
        raise CategoryError(f"malformed morphism/compose entry: {e}") from e
    return build_category(objects, morphisms, compose, raw.get("identity_compose", "auto"), name)


def category_to_dict(cat: FinCat) -> dict:
    """Ngược lại của validate_category (identity composites để auto)"""
    non_id = [m for m in cat.morphisms if not cat.is_identity(m.name)]
    compose = []
    for f in non_id:
        for g in cat.out_morphisms(f.cod):
            compose.append({"g": g, "f": f.name, "result": cat.compose(g, f.name)})
    return {
        "name": cat.name,
        "objects": list(cat.objects),
        "morphisms": [{"name": m.name, "dom": m.dom, "cod": m.cod} for m in non_id],
        "compose": compose,
    }


def classify(cat: FinCat) -> CatKind:
    if _general_witness(cat) is not None:
        return CatKind.GENERAL
    for x in cat.objects:
        for y in cat.objects:
            if len(cat.hom(x, y)) > 1:
                return CatKind.DELTA
    return CatKind.POSET


def _general_witness(cat: FinCat) -> Optional[str]:
    for m in cat.non_identity():
        if cat.dom(m) == cat.cod(m):
            return f"non-identity endomorphism {m}"
    for i, x in enumerate(cat.objects):
        for y in cat.objects[i + 1:]:
            if cat.hom(x, y) and cat.hom(y, x):
                return f"morphisms in both directions between {x} and {y}"
    return None


# ============ FUNCTORS ============

@dataclass(frozen=True, eq=False)
class Functor:
    source: FinCat
    target: FinCat
    on_objects: Mapping[str, str]
    on_morphisms: Mapping[str, str]
    name: str = ""

    def obj(self, x: str) -> str:
        return self.on_objects[x]

    def mor(self, m: str) -> str:
        return self.on_morphisms[m]


def validate_functor(functor: Functor) -> Functor:
    src, tgt = functor.source, functor.target
    for x in src.objects:
        if x not in functor.on_objects or functor.on_objects[x] not in tgt.objects:
            raise FunctorError(f"object {x} has no valid image")
    for m in src.morphisms:
        image = functor.on_morphisms.get(m.name)
        if image is None or not tgt.has_morphism(image):
            raise FunctorError(f"morphism {m.name} has no valid image")
        if tgt.dom(image) != functor.obj(m.dom) or tgt.cod(image) != functor.obj(m.cod):
            raise FunctorError(f"image of {m.name} has wrong endpoints")
    for x in src.objects:
        if functor.mor(src.identity(x)) != tgt.identity(functor.obj(x)):
            raise FunctorError(f"identity of {x} not preserved")
    for (g, f), h in src.table.items():
        if tgt.compose(functor.mor(g), functor.mor(f)) != functor.mor(h):
            raise FunctorError(f"composite {g}∘{f} not preserved")
    return functor


def identity_functor(cat: FinCat) -> Functor:
    return Functor(cat, cat, {x: x for x in cat.objects},
                   {m.name: m.name for m in cat.morphisms}, name=f"id[{cat.name}]")


def compose_functors(g: Functor, f: Functor) -> Functor:
    """g∘f"""
    if f.target is not g.source:
        raise FunctorError("functors are not composable")
    return Functor(f.source, g.target,
                   {x: g.obj(f.obj(x)) for x in f.source.objects},
                   {m.name: g.mor(f.mor(m.name)) for m in f.source.morphisms},
                   name=f"{g.name}∘{f.name}")


def inclusion_functor(cat: FinCat, objects: Sequence[str], name: str = "") -> Functor:
    """Full subcategory trên objects cùng inclusion vào cat"""
    keep = set(objects)
    missing = keep - set(cat.objects)
    if missing:
        raise FunctorError(f"unknown object(s) {', '.join(sorted(missing))}")
    ordered = [x for x in cat.objects if x in keep]
    mors = [m for m in cat.morphisms if m.dom in keep and m.cod in keep and not cat.is_identity(m.name)]
    kept = {m.name for m in mors} | {cat.identity(x) for x in ordered}
    compose = [(g, f, h) for (g, f), h in cat.table.items() if g in kept and f in kept]
    sub = build_category(ordered, mors, compose, "explicit", name or f"{cat.name}|{','.join(ordered)}")
    return Functor(sub, cat, {x: x for x in ordered},
                   {m.name: m.name for m in sub.morphisms}, name="incl")


# ============ NERVE + SUBDIVISION ============

@dataclass(frozen=True)
class Simplex:
    """Chain x0 -> x1 -> ... -> xp của morphism không phải identity"""
    vertices: Tuple[str, ...]
    edges: Tuple[str, ...]

    @property
    def dim(self) -> int:
        return len(self.edges)

    @property
    def key(self) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
        return (self.vertices, self.edges)

    def arrow(self, cat: FinCat, s: int, t: int) -> str:
        """Composite từ x_s tới x_t (s ≤ t)"""
        if s == t:
            return cat.identity(self.vertices[s])
        return cat.compose_path(self.edges[s:t])

    def label(self, compact: bool) -> str:
        if compact or not self.edges:
            return "[" + "<".join(self.vertices) + "]"
        parts = [self.vertices[0]]
        for e, v in zip(self.edges, self.vertices[1:]):
            parts.append(f"-{e}->{v}")
        return "[" + "".join(parts) + "]"


def nondegenerate_simplices(cat: FinCat) -> List[Simplex]:
    """Tất cả chain nondegenerate, theo dimension rồi theo thứ tự sinh"""
    witness = _general_witness(cat)
    if witness is not None:
        raise NotADeltaError(witness)
    level = [Simplex((x,), ()) for x in cat.objects]
    result: List[Simplex] = []
    while level:
        result.extend(level)
        level = [Simplex(s.vertices + (cat.cod(m),), s.edges + (m,))
                 for s in level for m in cat.out_morphisms(s.vertices[-1])]
    return result


@dataclass(frozen=True)
class SimplexMap:
    """Morphism [τ, σ, v] của C′ cùng face f: [q] -> [p] chứng kiến nó"""
    tau: str
    sigma: str
    v: str
    face: Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Subdivision:
    """
    Kết quả subdivide(C)

    Unpack được như cặp (category, d).
    """
    source: FinCat
    category: FinCat
    d: Functor
    simplices: Mapping[str, Simplex]
    maps: Mapping[str, SimplexMap]
    triples: Mapping[Tuple[str, str, str], str]
    labels: Mapping[Tuple[Tuple[str, ...], Tuple[str, ...]], str]

    def __iter__(self) -> Iterator:
        yield self.category
        yield self.d


def subdivide(cat: FinCat) -> Subdivision:
    """
    Category C′ của các simplex nondegenerate và functor d: C′ -> C

    d gửi τ về đỉnh đầu τ(0) và [τ, σ, v] về v.
    """
    log = get_log_bus()
    simplices = nondegenerate_simplices(cat)
    compact = classify(cat) is CatKind.POSET
    labels = {s.key: s.label(compact) for s in simplices}
    by_label = {labels[s.key]: s for s in simplices}

    morphisms: List[Tuple[str, str, str]] = []
    maps: Dict[str, SimplexMap] = {}
    triples: Dict[Tuple[str, str, str], str] = {}
    used = set()
    for tau in simplices:
        t_label = labels[tau.key]
        p = tau.dim
        for q in range(p + 1):
            for face in combinations(range(p + 1), q + 1):
                sigma_key = (tuple(tau.vertices[k] for k in face),
                             tuple(tau.arrow(cat, face[k - 1], face[k]) for k in range(1, q + 1)))
                s_label = labels[sigma_key]
                v = tau.arrow(cat, 0, face[0])
                triple = (t_label, s_label, v)
                if triple in triples:
                    continue
                if q == p:
                    name = identity_name(t_label)
                else:
                    name = f"{t_label}->{s_label}"
                    if name in used:
                        name = f"{name}@{v}"
                    morphisms.append((name, t_label, s_label))
                used.add(name)
                triples[triple] = name
                maps[name] = SimplexMap(t_label, s_label, v, face)

    compose = []
    by_dom: Dict[str, List[str]] = {}
    for name, sm in maps.items():
        by_dom.setdefault(sm.tau, []).append(name)
    for f_name, f_map in maps.items():
        for g_name in by_dom.get(f_map.sigma, []):
            g_map = maps[g_name]
            triple = (f_map.tau, g_map.sigma, cat.compose(g_map.v, f_map.v))
            compose.append((g_name, f_name, triples[triple]))

    prime_name = f"{cat.name}'" if cat.name else ""
    prime = build_category([labels[s.key] for s in simplices], morphisms, compose, "explicit", prime_name)
    d = Functor(prime, cat,
                {label: s.vertices[0] for label, s in by_label.items()},
                {name: sm.v for name, sm in maps.items()}, name="d")
    log.debug(f"[SUBDIVIDE] {cat.name or '?'}: {len(prime.objects)} objects, "
              f"{len(prime.morphisms)} morphisms")
    return Subdivision(cat, prime, d, by_label, maps, triples, labels)


def subdivide_functor(functor: Functor, source_sub: Optional[Subdivision] = None,
                      target_sub: Optional[Subdivision] = None) -> Functor:
    """
    f′: D′ -> C′, τ ↦ f∘τ

    Raises:
        DegenerateImageError: f gửi một cạnh của simplex về identity
    """
    src = source_sub or subdivide(functor.source)
    tgt = target_sub or subdivide(functor.target)
    on_objects = {}
    for label, tau in src.simplices.items():
        for e in tau.edges:
            if functor.target.is_identity(functor.mor(e)):
                raise DegenerateImageError(label, e)
        key = (tuple(functor.obj(x) for x in tau.vertices), tuple(functor.mor(e) for e in tau.edges))
        on_objects[label] = tgt.labels[key]
    on_morphisms = {}
    for name, sm in src.maps.items():
        triple = (on_objects[sm.tau], on_objects[sm.sigma], functor.mor(sm.v))
        on_morphisms[name] = tgt.triples[triple]
    return Functor(src.category, tgt.category, on_objects, on_morphisms,
                   name=f"{functor.name}'")


# ============ COMMA CATEGORIES ============

def comma_object_name(w: str, sigma: str) -> str:
    return f"({w},{sigma})"


@dataclass(frozen=True, eq=False)
class CommaCategory:
    """
    i/f: object (w, σ) với w: i -> f(σ); morphism (u,τ) -> (w,σ) là v: τ -> σ
    trong D với f(v)∘u = w
    """
    functor: Functor
    anchor: str
    category: FinCat
    pairs: Mapping[str, Tuple[str, str]]
    carrier: Mapping[str, str]

    def reindex(self, v: str) -> Dict[str, str]:
        """v: h -> i cảm sinh i/f -> h/f, (w, σ) ↦ (w∘v, σ)"""
        c = self.functor.target
        if c.cod(v) != self.anchor:
            raise FunctorError(f"{v} does not end at {self.anchor}")
        return {name: comma_object_name(c.compose(w, v), sigma)
                for name, (w, sigma) in self.pairs.items()}


def comma_category(functor: Functor, anchor: str) -> CommaCategory:
    c, d = functor.target, functor.source
    pairs: Dict[str, Tuple[str, str]] = {}
    for sigma in d.objects:
        for w in c.hom(anchor, functor.obj(sigma)):
            pairs[comma_object_name(w, sigma)] = (w, sigma)

    morphisms = []
    carrier: Dict[str, str] = {}
    lookup: Dict[Tuple[str, str, str], str] = {}
    for src, (u, tau) in pairs.items():
        for tgt, (w, sigma) in pairs.items():
            for v in d.hom(tau, sigma):
                if c.compose(functor.mor(v), u) != w:
                    continue
                if src == tgt and d.is_identity(v):
                    name = identity_name(src)
                else:
                    name = f"{v}:{src}->{tgt}"
                    morphisms.append((name, src, tgt))
                carrier[name] = v
                lookup[(src, tgt, v)] = name

    ends = {name: (src, tgt) for (src, tgt, _), name in lookup.items()}
    compose = []
    for f_name, (a, b) in ends.items():
        for g_name, (b2, target) in ends.items():
            if b2 != b:
                continue
            v = d.compose(carrier[g_name], carrier[f_name])
            compose.append((g_name, f_name, lookup[(a, target, v)]))

    cat = build_category(list(pairs), morphisms, compose, "explicit", f"{anchor}/{functor.name}")
    return CommaCategory(functor, anchor, cat, pairs, carrier)
