"""
Homological algebra trên exalg.Mat

Complex homological: d_n: X_n -> X_{n-1}, degree 0..top.
Homotopy lưu s_n: X_{n-1} -> Y_n (cùng chỉ số với degree đích).
Ngoài range mọi differential/map đều là ma trận 0 đúng shape.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import ChainMapError, ComplexError, DoubleComplexError, HomotopyError
from .exalg import (
    Field, Mat, Quotient, block, kernel_basis, quotient_basis, rank, solve_matrix,
)
from .logbus import get_log_bus


class Grading(Enum):
    HOMOLOGICAL = "homological"      # d: X_n -> X_{n-1}
    COHOMOLOGICAL = "cohomological"  # d: X^n -> X^{n+1}


class Complex:
    """
    Bounded complex tập trung ở degree 0..top

    valid_top: degree cao nhất có cohomology đúng. Một complex bị cắt (ví dụ
    bar cochain complex dựng tới N+1) không có differential đi ra từ top nên
    H ở top không tin được; None = top.
    """

    def __init__(self, field: Field, dims: Sequence[int], diffs: Mapping[int, Mat],
                 grading: Grading = Grading.HOMOLOGICAL, name: str = "",
                 valid_top: Optional[int] = None):
        self.field = field
        self.dims = tuple(int(x) for x in dims)
        self.diffs = dict(diffs)
        self.grading = grading
        self.name = name
        self.valid_top = self.top if valid_top is None else valid_top

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def degrees(self) -> range:
        return range(len(self.dims))

    def valid_degrees(self) -> range:
        return range(self.valid_top + 1)

    def dim(self, n: int) -> int:
        return self.dims[n] if 0 <= n < len(self.dims) else 0

    def step(self) -> int:
        return -1 if self.grading is Grading.HOMOLOGICAL else 1

    def d(self, n: int) -> Mat:
        """Differential đi ra từ degree n"""
        m = self.diffs.get(n)
        if m is not None:
            return m
        return Mat.zeros(self.field, self.dim(n + self.step()), self.dim(n))

    def d_into(self, n: int) -> Mat:
        """Differential đi vào degree n"""
        return self.d(n - self.step())

    def identity(self, n: int) -> Mat:
        return Mat.identity(self.field, self.dim(n))

    def __repr__(self) -> str:
        return f"Complex({self.name or '?'}, {self.grading.value}, dims={list(self.dims)})"


def make_complex(field: Field, dims: Sequence[int], diffs: Mapping[int, Mat],
                 grading: Grading = Grading.HOMOLOGICAL, name: str = "",
                 valid_top: Optional[int] = None) -> Complex:
    """Dựng Complex, kiểm tra shape và d∘d = 0"""
    cx = Complex(field, dims, diffs, grading, name, valid_top)
    if not -1 <= cx.valid_top <= cx.top:
        raise ComplexError(f"valid_top {cx.valid_top} outside 0..{cx.top}")
    for n, m in cx.diffs.items():
        expected = (cx.dim(n + cx.step()), cx.dim(n))
        if m.shape != expected:
            raise ComplexError(f"d_{n} has shape {m.shape}, expected {expected}")
    for n in cx.degrees():
        if not (cx.d(n + cx.step()) @ cx.d(n)).is_zero():
            raise ComplexError(f"d∘d != 0 starting in degree {n}")
    return cx


def cohomology_dims(cx: Complex, degrees: Optional[Iterable[int]] = None) -> List[int]:
    """
    dim H_n (hoặc H^n) = dim X_n - rank d_out - rank d_in

    Raises:
        ComplexError: degree nằm ngoài cx.valid_degrees()
    """
    valid = cx.valid_degrees()
    degrees = valid if degrees is None else list(degrees)
    for n in degrees:
        if n not in valid:
            raise ComplexError(f"degree {n} beyond constructed range 0..{cx.valid_top} of {cx.name or 'complex'}")
    return [cx.dim(n) - rank(cx.d(n)) - rank(cx.d_into(n)) for n in degrees]


class ChainMap:
    """f_n: X_n -> Y_n"""

    def __init__(self, source: Complex, target: Complex, maps: Mapping[int, Mat], name: str = ""):
        self.source = source
        self.target = target
        self.maps = dict(maps)
        self.name = name

    @property
    def field(self) -> Field:
        return self.source.field

    def at(self, n: int) -> Mat:
        m = self.maps.get(n)
        if m is not None:
            return m
        return Mat.zeros(self.field, self.target.dim(n), self.source.dim(n))

    def degrees(self) -> range:
        return range(max(self.source.top, self.target.top) + 1)


def validate_chain_map(f: ChainMap) -> ChainMap:
    src, tgt = f.source, f.target
    step = src.step()
    for n in f.degrees():
        if f.at(n).shape != (tgt.dim(n), src.dim(n)):
            raise ChainMapError(n, f"shape {f.at(n).shape}")
        if tgt.d(n) @ f.at(n) != f.at(n + step) @ src.d(n):
            raise ChainMapError(n)
    return f


def identity_chain_map(cx: Complex) -> ChainMap:
    return ChainMap(cx, cx, {n: cx.identity(n) for n in cx.degrees()}, name="id")


def compose_chain_maps(g: ChainMap, f: ChainMap) -> ChainMap:
    """g∘f"""
    return ChainMap(f.source, g.target, {n: g.at(n) @ f.at(n) for n in f.degrees()},
                    name=f"{g.name}∘{f.name}")


class Homotopy:
    """s_n: X_{n-1} -> Y_n (homological)"""

    def __init__(self, source: Complex, target: Complex, maps: Mapping[int, Mat]):
        self.source = source
        self.target = target
        self.maps = dict(maps)

    def at(self, n: int) -> Mat:
        m = self.maps.get(n)
        if m is not None:
            return m
        return Mat.zeros(self.source.field, self.target.dim(n), self.source.dim(n - 1))

    def negated(self) -> 'Homotopy':
        return Homotopy(self.source, self.target, {n: -m for n, m in self.maps.items()})


def contraction_defect(cx: Complex, s: Homotopy) -> Optional[int]:
    """Degree đầu tiên mà s d + d s != id, hoặc None"""
    for n in cx.degrees():
        if s.at(n) @ cx.d(n) + cx.d(n + 1) @ s.at(n + 1) != cx.identity(n):
            return n
    return None


# ============ CONES + CONTRACTIONS ============

def cone(f: ChainMap) -> Complex:
    """
    C_n = M_{n-1} ⊕ N_n, d = [[-d^M_{n-1}, 0], [f_{n-1}, d^N_n]]
    """
    m, n_cx = f.source, f.target
    field = f.field
    top = max(m.top + 1, n_cx.top)
    dims = [m.dim(k - 1) + n_cx.dim(k) for k in range(top + 1)]
    diffs = {}
    for k in range(1, top + 1):
        diffs[k] = block(field, [
            [-m.d(k - 1), Mat.zeros(field, m.dim(k - 2), n_cx.dim(k))],
            [f.at(k - 1), n_cx.d(k)],
        ])
    return Complex(field, dims, diffs, Grading.HOMOLOGICAL, name=f"cone({f.name})")


@dataclass(frozen=True)
class ContractionResult:
    homotopy: Optional[Homotopy]
    failing_degree: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.homotopy is not None


def contraction(cx: Complex) -> ContractionResult:
    """
    Contracting homotopy s (s d + d s = id) dựng từng degree:
    s_0 = 0, rồi giải d_{n+1} s_{n+1} = id - s_n d_n.

    Hệ vô nghiệm ở degree n đúng khi H_n != 0; khi đó trả về degree đó.
    """
    if cx.grading is not Grading.HOMOLOGICAL:
        raise ComplexError("contraction expects a homological complex")
    field = cx.field
    maps: Dict[int, Mat] = {0: Mat.zeros(field, cx.dim(0), 0)}
    for n in cx.degrees():
        rhs = cx.identity(n) - maps[n] @ cx.d(n)
        s_next = solve_matrix(cx.d(n + 1), rhs)
        if s_next is None:
            get_log_bus().debug(f"[CONTRACT] {cx.name}: H_{n} != 0")
            return ContractionResult(None, n)
        maps[n + 1] = s_next
    return ContractionResult(Homotopy(cx, cx, maps))


@dataclass
class QisoReport:
    ok: bool
    failing: Dict[str, Optional[int]] = field(default_factory=dict)
    contractions: Dict[str, Homotopy] = field(default_factory=dict)


def is_relative_qiso(family: Mapping[str, ChainMap]) -> QisoReport:
    """f là relative quasi-isomorphism khi mọi cone(f_x) có contraction"""
    report = QisoReport(ok=True)
    for name in sorted(family):
        result = contraction(cone(family[name]))
        report.failing[name] = result.failing_degree
        if result.ok:
            report.contractions[name] = result.homotopy
        else:
            report.ok = False
    return report


def two_out_of_three(f: Mapping[str, ChainMap], g: Mapping[str, ChainMap]) -> Dict[str, bool]:
    """Relative-qiso status của f, g và g∘f (objectwise)"""
    gf = {x: compose_chain_maps(g[x], f[x]) for x in f}
    return {
        "f": is_relative_qiso(f).ok,
        "g": is_relative_qiso(g).ok,
        "gf": is_relative_qiso(gf).ok,
    }


@dataclass
class HomotopyEquivalence:
    """
    Dữ liệu đọc ra từ contraction của cone(f): f: M -> N, γ: N -> M

    alpha (trên M) và delta (trên N) thỏa
        -α d + γ f - d α = id_M,   δ d + f γ + d δ = id_N
    """
    f: ChainMap
    gamma: ChainMap
    alpha: Homotopy
    delta: Homotopy
    beta: Dict[int, Mat]

    @property
    def source_homotopy(self) -> Homotopy:
        """sM với γf - id = sM d + d sM"""
        return self.alpha

    @property
    def target_homotopy(self) -> Homotopy:
        """sN với fγ - id = sN d + d sN"""
        return self.delta.negated()


def extract_homotopy_equivalence(f: ChainMap, s: Homotopy) -> HomotopyEquivalence:
    m, n_cx = f.source, f.target
    c = cone(f)
    bad = contraction_defect(c, s)
    if bad is not None:
        raise HomotopyError(bad, "s d + d s = id on the cone")

    alpha, gamma, beta, delta = {}, {}, {}, {}
    for k in range(c.top + 1):
        sk = s.at(k + 1)
        rm, rn = m.dim(k), n_cx.dim(k + 1)
        cm, cn = m.dim(k - 1), n_cx.dim(k)
        alpha[k] = sk.block_at(0, rm, 0, cm)
        gamma[k] = sk.block_at(0, rm, cm, cn)
        beta[k + 1] = sk.block_at(rm, rn, 0, cm)
        delta[k + 1] = sk.block_at(rm, rn, cm, cn)

    result = HomotopyEquivalence(
        f=f,
        gamma=ChainMap(n_cx, m, gamma, name=f"inv({f.name})"),
        alpha=Homotopy(m, m, alpha),
        delta=Homotopy(n_cx, n_cx, delta),
        beta=beta,
    )
    _check_equivalence_relations(result)
    return result


def _check_equivalence_relations(eq: HomotopyEquivalence):
    f, g, a, dl = eq.f, eq.gamma, eq.alpha, eq.delta
    m, n_cx = f.source, f.target
    field = f.field

    def b(k):
        got = eq.beta.get(k)
        return got if got is not None else Mat.zeros(field, n_cx.dim(k), m.dim(k - 2))

    for k in range(max(m.top, n_cx.top) + 1):
        if m.d(k) @ g.at(k) != g.at(k - 1) @ n_cx.d(k):
            raise HomotopyError(k, "gamma is a chain map")
        lhs = -(a.at(k) @ m.d(k)) + g.at(k) @ f.at(k) - m.d(k + 1) @ a.at(k + 1)
        if lhs != m.identity(k):
            raise HomotopyError(k, "-alpha d + gamma f - d alpha = id")
        rhs = dl.at(k) @ n_cx.d(k) + f.at(k) @ g.at(k) + n_cx.d(k + 1) @ dl.at(k + 1)
        if rhs != n_cx.identity(k):
            raise HomotopyError(k, "delta d + f gamma + d delta = id")
        mixed = (-(b(k) @ m.d(k - 1)) + dl.at(k) @ f.at(k - 1)
                 + f.at(k) @ a.at(k) + n_cx.d(k + 1) @ b(k + 1))
        if not mixed.is_zero():
            raise HomotopyError(k, "off-diagonal block vanishes")


def build_cone_contraction(f: ChainMap, gamma: ChainMap, s_m: Homotopy, s_n: Homotopy) -> Homotopy:
    """
    Contraction của cone(f) từ homotopy inverse γ và sM, sN với
    γf - id = sM d + d sM, fγ - id = sN d + d sN
    """
    m, n_cx = f.source, f.target
    field = f.field
    for k in range(max(m.top, n_cx.top) + 1):
        if m.d(k) @ gamma.at(k) != gamma.at(k - 1) @ n_cx.d(k):
            raise ChainMapError(k, "gamma is not a chain map")
        if gamma.at(k) @ f.at(k) - m.identity(k) != s_m.at(k) @ m.d(k) + m.d(k + 1) @ s_m.at(k + 1):
            raise HomotopyError(k, "gamma f - id = sM d + d sM")
        if f.at(k) @ gamma.at(k) - n_cx.identity(k) != s_n.at(k) @ n_cx.d(k) + n_cx.d(k + 1) @ s_n.at(k + 1):
            raise HomotopyError(k, "f gamma - id = sN d + d sN")

    c = cone(f)
    maps = {}
    for k in range(c.top + 2):
        sm, sn, sn_prev = s_m.at(k - 1), s_n.at(k), s_n.at(k - 1)
        g_prev = gamma.at(k - 1)
        twist = f.at(k - 1) @ sm - sn_prev @ f.at(k - 2)
        maps[k] = block(field, [
            [sm - g_prev @ twist, g_prev],
            [sn @ twist, -sn],
        ])
    s = Homotopy(c, c, maps)
    bad = contraction_defect(c, s)
    if bad is not None:
        raise HomotopyError(bad, "assembled cone contraction")
    return s


# ============ HOMOLOGY ============

@dataclass(frozen=True)
class HomologyBasis:
    cycles: Mat          # cột = basis của ker d_n
    quotient: Quotient   # ker / im, tọa độ theo cycles


def homology_basis(cx: Complex, n: int) -> HomologyBasis:
    z = kernel_basis(cx.d(n))
    return HomologyBasis(z, quotient_basis(z, cx.d_into(n)))


def induced_homology_map(f: ChainMap, n: int) -> Mat:
    """H_n(f) theo các basis của homology_basis"""
    hs, ht = homology_basis(f.source, n), homology_basis(f.target, n)
    images = f.at(n) @ hs.cycles @ hs.quotient.lift
    coords = solve_matrix(ht.cycles, images)
    if coords is None:
        raise ChainMapError(n, "image of a cycle is not a cycle")
    return ht.quotient.projection @ coords


def is_quasi_isomorphism(f: ChainMap) -> bool:
    for n in f.degrees():
        h = induced_homology_map(f, n)
        if h.nrows != h.ncols or rank(h) != h.nrows:
            return False
    return True


# ============ DOUBLE COMPLEXES ============

@dataclass(frozen=True, eq=False)
class DoubleComplex:
    """
    X_{h,i}, h = 0..width, i = 0..height, với các hàng được augment về M_i

    horizontal[(h, i)]: X_{h,i} -> X_{h-1,i} (h ≥ 1)
    vertical[(h, i)]:   X_{h,i} -> X_{h,i-1} (i ≥ 1)
    epsilon[i]:         X_{0,i} -> M_i
    contraction[(h, i)]: t_i^h: X_{h-1,i} -> X_{h,i}; (0, i) đi từ M_i
    truncated: cột h = width bị cắt nên hàng chỉ exact dưới width
    """
    field: Field
    width: int
    height: int
    dims: Mapping[Tuple[int, int], int]
    horizontal: Mapping[Tuple[int, int], Mat]
    vertical: Mapping[Tuple[int, int], Mat]
    augmentation: Complex
    epsilon: Mapping[int, Mat]
    contraction: Mapping[Tuple[int, int], Mat]
    truncated: bool = False

    def dim(self, h: int, i: int) -> int:
        if h == -1:
            return self.augmentation.dim(i)
        return self.dims.get((h, i), 0)

    def hor(self, h: int, i: int) -> Mat:
        """X_{h,i} -> X_{h-1,i}; với h = 0 là epsilon"""
        if h == 0:
            got = self.epsilon.get(i)
        else:
            got = self.horizontal.get((h, i))
        if got is not None:
            return got
        return Mat.zeros(self.field, self.dim(h - 1, i), self.dim(h, i))

    def vert(self, h: int, i: int) -> Mat:
        """X_{h,i} -> X_{h,i-1}; với h = -1 là d^M"""
        if h == -1:
            return self.augmentation.d(i)
        got = self.vertical.get((h, i))
        if got is not None:
            return got
        return Mat.zeros(self.field, self.dim(h, i - 1), self.dim(h, i))

    def t(self, h: int, i: int) -> Mat:
        """t_i^h: X_{h-1,i} -> X_{h,i}"""
        got = self.contraction.get((h, i))
        if got is not None:
            return got
        return Mat.zeros(self.field, self.dim(h, i), self.dim(h - 1, i))


def validate_double_complex(dc: DoubleComplex) -> DoubleComplex:
    """
    Kiểm tra mọi square; raise DoubleComplexError với tên square hỏng
    """
    w, ht = dc.width, dc.height
    for i in range(ht + 1):
        for h in range(1, w + 1):
            if not (dc.hor(h - 1, i) @ dc.hor(h, i)).is_zero():
                raise DoubleComplexError("horizontal d∘d", (h, i))
        for h in range(-1, w + 1):
            if i >= 1 and not (dc.vert(h, i - 1) @ dc.vert(h, i)).is_zero():
                raise DoubleComplexError("vertical d∘d", (h, i))
            if i >= 1 and h >= 0 and dc.vert(h - 1, i) @ dc.hor(h, i) != dc.hor(h, i - 1) @ dc.vert(h, i):
                raise DoubleComplexError("commuting square", (h, i))
        if dc.hor(0, i) @ dc.t(0, i) != Mat.identity(dc.field, dc.dim(-1, i)):
            raise DoubleComplexError("epsilon t = id", (-1, i))
        last = w - 1 if dc.truncated else w
        for h in range(0, last + 1):
            lhs = dc.hor(h + 1, i) @ dc.t(h + 1, i) + dc.t(h, i) @ dc.hor(h, i)
            if lhs != Mat.identity(dc.field, dc.dim(h, i)):
                raise DoubleComplexError("row contraction d t + t d = id", (h, i))
        if i >= 1:
            for h in range(0, w + 1):
                if dc.vert(h, i) @ dc.t(h, i) != dc.t(h, i - 1) @ dc.vert(h - 1, i):
                    raise DoubleComplexError("contraction commutes with vertical d", (h, i))
    return dc


@dataclass
class TotalComplex:
    complex: Complex
    epsilon: ChainMap    # Tot -> M
    t0: ChainMap         # M -> Tot
    homotopy: Homotopy   # h: Tot_{n-1} -> Tot_n
    verified_degrees: range
    components: Dict[int, List[Tuple[int, int]]]


def total_complex(dc: DoubleComplex) -> TotalComplex:
    """
    Tot_n = ⊕_{h+i=n} X_{h,i}, d = d_i + (-1)^h d^h; ε, t0 và h với
    ε t0 = id, h d + d h = id - t0 ε
    """
    validate_double_complex(dc)
    field = dc.field
    top = dc.width + dc.height
    comps: Dict[int, List[Tuple[int, int]]] = {}
    offsets: Dict[Tuple[int, int], int] = {}
    dims = []
    for n in range(top + 1):
        comps[n] = [(h, n - h) for h in range(0, min(n, dc.width) + 1) if n - h <= dc.height]
        off = 0
        for c in comps[n]:
            offsets[c] = off
            off += dc.dim(*c)
        dims.append(off)

    def dim_tot(n):
        return dims[n] if 0 <= n <= top else 0

    diffs = {}
    for n in range(1, top + 1):
        entries: Dict[int, Dict[int, object]] = {}
        for (h, i) in comps[n]:
            c0 = offsets[(h, i)]
            if h >= 1:
                _place(entries, dc.hor(h, i), offsets[(h - 1, i)], c0)
            if i >= 1:
                part = dc.vert(h, i)
                _place(entries, part if h % 2 == 0 else -part, offsets[(h, i - 1)], c0)
        diffs[n] = Mat.from_dod(field, entries, (dims[n - 1], dims[n]))
    tot = make_complex(field, dims, diffs, Grading.HOMOLOGICAL, name="Tot")

    m = dc.augmentation
    eps_maps, t0_maps, h_maps = {}, {}, {}
    for n in range(top + 1):
        e: Dict[int, Dict[int, object]] = {}
        t: Dict[int, Dict[int, object]] = {}
        if (0, n) in offsets and n <= dc.height:
            _place(e, dc.hor(0, n), 0, offsets[(0, n)])
            _place(t, dc.t(0, n), offsets[(0, n)], 0)
        eps_maps[n] = Mat.from_dod(field, e, (m.dim(n), dims[n]))
        t0_maps[n] = Mat.from_dod(field, t, (dims[n], m.dim(n)))
        hm: Dict[int, Dict[int, object]] = {}
        for (h, i) in comps[n]:
            if h + 1 <= dc.width:
                _place(hm, dc.t(h + 1, i), offsets[(h + 1, i)], offsets[(h, i)])
        h_maps[n + 1] = Mat.from_dod(field, hm, (dim_tot(n + 1), dims[n]))

    eps = ChainMap(tot, m, eps_maps, name="epsilon")
    t0 = ChainMap(m, tot, t0_maps, name="t0")
    hom = Homotopy(tot, tot, h_maps)
    validate_chain_map(eps)
    validate_chain_map(t0)

    verified = range(dc.width) if dc.truncated else range(top + 1)
    for n in range(m.top + 1):
        if eps.at(n) @ t0.at(n) != m.identity(n):
            raise HomotopyError(n, "epsilon t0 = id")
    for n in verified:
        lhs = hom.at(n) @ tot.d(n) + tot.d(n + 1) @ hom.at(n + 1)
        if lhs != tot.identity(n) - t0.at(n) @ eps.at(n):
            raise HomotopyError(n, "h d + d h = id - t0 epsilon")
    get_log_bus().debug(f"[TOT] dims={dims}, verified degrees < {verified.stop}")
    return TotalComplex(tot, eps, t0, hom, verified, comps)


def _place(entries: Dict[int, Dict[int, object]], mat: Mat, row0: int, col0: int):
    for i, j, v in mat.items():
        row = entries.setdefault(row0 + i, {})
        col = col0 + j
        row[col] = row[col] + v if col in row else v


# ============ DUMP FORMAT ============

def complex_to_dict(cx: Complex) -> dict:
    return {
        "field": cx.field.name,
        "grading": cx.grading.value,
        "dims": list(cx.dims),
        "diffs": {str(n): m.export_rows() for n, m in sorted(cx.diffs.items())},
        "valid_top": cx.valid_top,
    }


def complex_from_dict(data: Mapping) -> Complex:
    field = Field.parse(data.get("field"))
    grading = Grading(data.get("grading", "homological"))
    dims = [int(x) for x in data["dims"]]
    step = -1 if grading is Grading.HOMOLOGICAL else 1
    diffs = {}
    for key, rows in data.get("diffs", {}).items():
        n = int(key)
        target = dims[n + step] if 0 <= n + step < len(dims) else 0
        diffs[n] = Mat.from_rows(field, rows, dims[n]) if rows else Mat.zeros(field, target, dims[n])
    return make_complex(field, dims, diffs, grading, data.get("name", ""), data.get("valid_top"))
