"""
Exact Linear Algebra - ma trận trên QQ hoặc GF(p)

Mat là wrapper mỏng quanh sympy DomainMatrix ở dạng sparse (SDM: dict-of-dicts,
không lưu số 0). Mọi phép khử đều đi qua rref của sympy; kernel, solve và
quotient được dựng lại từ pivots nên kết quả hoàn toàn tất định.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from sympy import GF, QQ
from sympy.ntheory import isprime
from sympy.polys.matrices import DomainMatrix

from .errors import DimensionError, FieldError, SubspaceError


@lru_cache(maxsize=None)
def _domain_for(modulus: Optional[int]):
    return QQ if modulus is None else GF(modulus)


@dataclass(frozen=True)
class Field:
    """QQ khi modulus là None, ngược lại GF(modulus)"""
    modulus: Optional[int] = None

    def __post_init__(self):
        p = self.modulus
        if p is None:
            return
        if isinstance(p, bool) or not isinstance(p, int) or p < 2 or not isprime(p):
            raise FieldError(f"modulus must be a prime, got {p!r}")

    @property
    def domain(self):
        return _domain_for(self.modulus)

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    @property
    def name(self) -> str:
        return "QQ" if self.modulus is None else f"GF({self.modulus})"

    @classmethod
    def parse(cls, raw) -> 'Field':
        """
        Đọc field từ JSON/CLI: None, "QQ", "Q", 0 -> QQ; 5, "5", "GF(5)" -> GF(5)
        """
        if raw is None or raw in ("QQ", "Q", 0, "0"):
            return cls(None)
        if isinstance(raw, int):
            return cls(raw)
        if isinstance(raw, str):
            text = raw.strip()
            if text.upper().startswith("GF(") and text.endswith(")"):
                text = text[3:-1]
            if text.isdigit():
                return cls(int(text))
        raise FieldError(f"unrecognised field {raw!r}")

    def scalar(self, value):
        """int, Fraction, chuỗi "a/b" hoặc phần tử domain -> phần tử domain"""
        K = self.domain
        if isinstance(value, bool):
            raise FieldError(f"boolean is not a scalar: {value!r}")
        if isinstance(value, int):
            return K(value)
        if isinstance(value, str):
            try:
                value = Fraction(value.strip())
            except (ValueError, ZeroDivisionError) as e:
                raise FieldError(f"bad scalar {value!r}: {e}") from e
        if isinstance(value, Fraction):
            num, den = K(value.numerator), K(value.denominator)
            if not den:
                raise FieldError(f"{value} is undefined over {self.name}")
            return K.quo(num, den)
        if K.of_type(value):
            return value
        raise FieldError(f"cannot read {value!r} as a scalar of {self.name}")

    def export(self, element):
        """Phần tử domain -> int hoặc "a/b" cho JSON"""
        s = self.domain.to_sympy(element)
        if self.modulus is not None:
            return int(s) % self.modulus
        if s.is_Integer:
            return int(s)
        return str(s)


def _clean(entries: Dict[int, Dict[int, object]]) -> Dict[int, Dict[int, object]]:
    out = {}
    for i, row in entries.items():
        kept = {j: v for j, v in row.items() if v}
        if kept:
            out[i] = kept
    return out


class Mat:
    """
    Ma trận m x n trên một Field

    Immutable theo quy ước: mọi phép toán trả về Mat mới.
    """
    __slots__ = ("field", "_dm")

    def __init__(self, field: Field, dm: DomainMatrix):
        self.field = field
        self._dm = dm.to_sparse()

    # ---------- constructors ----------

    @classmethod
    def from_dod(cls, field: Field, entries: Dict[int, Dict[int, object]], shape: Tuple[int, int]) -> 'Mat':
        """Từ dict-of-dicts các phần tử domain (đã convert)"""
        return cls(field, DomainMatrix(_clean(entries), tuple(shape), field.domain))

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], ncols: Optional[int] = None) -> 'Mat':
        """Từ list-of-lists scalar tùy ý (int, Fraction, "a/b")"""
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if nrows else 0
        entries: Dict[int, Dict[int, object]] = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise DimensionError("from_rows", (nrows, ncols), (i, len(row)))
            for j, value in enumerate(row):
                v = field.scalar(value)
                if v:
                    entries.setdefault(i, {})[j] = v
        return cls.from_dod(field, entries, (nrows, ncols))

    @classmethod
    def column(cls, field: Field, values: Sequence) -> 'Mat':
        return cls.from_rows(field, [[v] for v in values], 1)

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> 'Mat':
        return cls.from_dod(field, {}, (nrows, ncols))

    @classmethod
    def identity(cls, field: Field, n: int) -> 'Mat':
        one = field.one
        return cls.from_dod(field, {i: {i: one} for i in range(n)}, (n, n))

    @classmethod
    def unit_vector(cls, field: Field, n: int, k: int) -> 'Mat':
        return cls.from_dod(field, {k: {0: field.one}}, (n, 1))

    # ---------- access ----------

    @property
    def shape(self) -> Tuple[int, int]:
        return self._dm.shape

    @property
    def nrows(self) -> int:
        return self._dm.shape[0]

    @property
    def ncols(self) -> int:
        return self._dm.shape[1]

    @property
    def dm(self) -> DomainMatrix:
        return self._dm

    def dod(self) -> Dict[int, Dict[int, object]]:
        """Dict-of-dicts các entry khác 0 (không được sửa)"""
        return self._dm.rep

    def items(self) -> Iterator[Tuple[int, int, object]]:
        for i, row in self._dm.rep.items():
            for j, v in row.items():
                yield i, j, v

    def entry(self, i: int, j: int):
        return self._dm.rep.get(i, {}).get(j, self.field.zero)

    def row(self, i: int) -> Dict[int, object]:
        return dict(self._dm.rep.get(i, {}))

    def column_values(self, j: int) -> List:
        zero = self.field.zero
        rep = self._dm.rep
        return [rep.get(i, {}).get(j, zero) for i in range(self.nrows)]

    def col(self, j: int) -> 'Mat':
        return self.submatrix(range(self.nrows), [j])

    def to_rows(self) -> List[List]:
        zero = self.field.zero
        rep = self._dm.rep
        return [[rep.get(i, {}).get(j, zero) for j in range(self.ncols)] for i in range(self.nrows)]

    def export_rows(self) -> List[List]:
        return [[self.field.export(v) for v in row] for row in self.to_rows()]

    def is_zero(self) -> bool:
        return not self._dm.rep

    def nnz(self) -> int:
        return sum(len(r) for r in self._dm.rep.values())

    # ---------- arithmetic ----------

    def _check_same(self, other: 'Mat', op: str):
        if self.field != other.field:
            raise FieldError(f"[{op}] field mismatch: {self.field.name} vs {other.field.name}")
        if self.shape != other.shape:
            raise DimensionError(op, self.shape, other.shape)

    def __add__(self, other: 'Mat') -> 'Mat':
        self._check_same(other, "add")
        return Mat(self.field, self._dm.add(other._dm))

    def __sub__(self, other: 'Mat') -> 'Mat':
        self._check_same(other, "sub")
        return Mat(self.field, self._dm.sub(other._dm))

    def __neg__(self) -> 'Mat':
        return Mat(self.field, self._dm.neg())

    def __matmul__(self, other: 'Mat') -> 'Mat':
        if self.field != other.field:
            raise FieldError(f"[matmul] field mismatch: {self.field.name} vs {other.field.name}")
        if self.ncols != other.nrows:
            raise DimensionError("matmul", self.shape, other.shape)
        m, n = self.nrows, other.ncols
        if self.ncols == 0 or m == 0 or n == 0:
            return Mat.zeros(self.field, m, n)
        return Mat(self.field, self._dm.matmul(other._dm))

    def scale(self, c) -> 'Mat':
        c = self.field.scalar(c)
        if not c:
            return Mat.zeros(self.field, *self.shape)
        entries = {i: {j: v * c for j, v in row.items()} for i, row in self._dm.rep.items()}
        return Mat.from_dod(self.field, entries, self.shape)

    def transpose(self) -> 'Mat':
        entries: Dict[int, Dict[int, object]] = {}
        for i, j, v in self.items():
            entries.setdefault(j, {})[i] = v
        return Mat.from_dod(self.field, entries, (self.ncols, self.nrows))

    @property
    def T(self) -> 'Mat':
        return self.transpose()

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> 'Mat':
        rows, cols = list(rows), list(cols)
        col_pos = {c: k for k, c in enumerate(cols)}
        rep = self._dm.rep
        entries: Dict[int, Dict[int, object]] = {}
        for r, i in enumerate(rows):
            src = rep.get(i)
            if not src:
                continue
            for j, v in src.items():
                k = col_pos.get(j)
                if k is not None:
                    entries.setdefault(r, {})[k] = v
        return Mat.from_dod(self.field, entries, (len(rows), len(cols)))

    def block_at(self, row0: int, nrows: int, col0: int, ncols: int) -> 'Mat':
        return self.submatrix(range(row0, row0 + nrows), range(col0, col0 + ncols))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self._dm.rep == other._dm.rep

    def __hash__(self):
        return hash((self.field, self.shape, self.nnz()))

    def __repr__(self) -> str:
        return f"Mat({self.field.name}, {self.shape}, {self.export_rows()})"


# ============ ASSEMBLY ============

def hstack(field: Field, mats: Sequence[Mat], nrows: Optional[int] = None) -> Mat:
    if nrows is None:
        if not mats:
            raise DimensionError("hstack", (), ())
        nrows = mats[0].nrows
    entries: Dict[int, Dict[int, object]] = {}
    offset = 0
    for m in mats:
        if m.nrows != nrows:
            raise DimensionError("hstack", (nrows, offset), m.shape)
        for i, j, v in m.items():
            entries.setdefault(i, {})[offset + j] = v
        offset += m.ncols
    return Mat.from_dod(field, entries, (nrows, offset))


def vstack(field: Field, mats: Sequence[Mat], ncols: Optional[int] = None) -> Mat:
    if ncols is None:
        if not mats:
            raise DimensionError("vstack", (), ())
        ncols = mats[0].ncols
    entries: Dict[int, Dict[int, object]] = {}
    offset = 0
    for m in mats:
        if m.ncols != ncols:
            raise DimensionError("vstack", (offset, ncols), m.shape)
        for i, j, v in m.items():
            entries.setdefault(offset + i, {})[j] = v
        offset += m.nrows
    return Mat.from_dod(field, entries, (offset, ncols))


def block(field: Field, rows: Sequence[Sequence[Mat]]) -> Mat:
    """Ghép ma trận khối; mọi khối trong một hàng cùng số rows, một cột cùng số cols"""
    return vstack(field, [hstack(field, list(r)) for r in rows])


def block_diag(field: Field, mats: Sequence[Mat]) -> Mat:
    entries: Dict[int, Dict[int, object]] = {}
    r0 = c0 = 0
    for m in mats:
        for i, j, v in m.items():
            entries.setdefault(r0 + i, {})[c0 + j] = v
        r0 += m.nrows
        c0 += m.ncols
    return Mat.from_dod(field, entries, (r0, c0))


def kron(a: Mat, b: Mat) -> Mat:
    """Kronecker product, chỉ số của factor trái chạy chậm: (i*p + k, j*q + l)"""
    if a.field != b.field:
        raise FieldError("kron: field mismatch")
    p, q = b.shape
    entries: Dict[int, Dict[int, object]] = {}
    b_items = list(b.items())
    for i, j, x in a.items():
        for k, l, y in b_items:
            entries.setdefault(i * p + k, {})[j * q + l] = x * y
    return Mat.from_dod(a.field, entries, (a.nrows * p, a.ncols * q))


# ============ ELIMINATION ============

def rref(a: Mat) -> Tuple[Mat, Tuple[int, ...]]:
    """Reduced row echelon form và pivot columns"""
    m, n = a.shape
    if m == 0 or n == 0 or a.is_zero():
        return Mat.zeros(a.field, m, n), ()
    r, pivots = a.dm.rref()
    return Mat(a.field, r.to_sparse()), tuple(pivots)


def rank(a: Mat) -> int:
    return len(rref(a)[1])


def kernel_basis(a: Mat) -> Mat:
    """Cột của kết quả là basis của ker(A); free column f cho v[f] = 1"""
    m, n = a.shape
    field = a.field
    r, pivots = rref(a)
    pivot_set = set(pivots)
    free = [j for j in range(n) if j not in pivot_set]
    one = field.one
    rows = r.dod()
    entries: Dict[int, Dict[int, object]] = {}
    for k, f in enumerate(free):
        entries.setdefault(f, {})[k] = one
        for row_idx, p in enumerate(pivots):
            v = rows.get(row_idx, {}).get(f)
            if v:
                entries.setdefault(p, {})[k] = -v
    return Mat.from_dod(field, entries, (n, len(free)))


def solve_matrix(a: Mat, b: Mat) -> Optional[Mat]:
    """
    Giải AX = B

    Returns:
        X (free variables = 0) hoặc None nếu hệ vô nghiệm
    """
    if a.nrows != b.nrows:
        raise DimensionError("solve", a.shape, b.shape)
    n, k = a.ncols, b.ncols
    field = a.field
    aug = hstack(field, [a, b])
    r, pivots = rref(aug)
    if pivots and pivots[-1] >= n:
        return None
    rows = r.dod()
    entries: Dict[int, Dict[int, object]] = {}
    for row_idx, p in enumerate(pivots):
        for j, v in rows.get(row_idx, {}).items():
            if j >= n:
                entries.setdefault(p, {})[j - n] = v
    return Mat.from_dod(field, entries, (n, k))


def solve(a: Mat, b: Mat) -> Optional[Mat]:
    """Giải Ax = b cho một vector cột b; None nếu inconsistent"""
    if b.ncols != 1:
        raise DimensionError("solve", a.shape, b.shape)
    return solve_matrix(a, b)


def inverse(a: Mat) -> Mat:
    n, m = a.shape
    if n != m:
        raise DimensionError("inverse", a.shape, a.shape[::-1])
    x = solve_matrix(a, Mat.identity(a.field, n))
    if x is None or rank(a) != n:
        raise SubspaceError("matrix is singular")
    return x


def image_basis(a: Mat) -> Mat:
    """Các pivot column của A: basis của column space"""
    _, pivots = rref(a)
    return a.submatrix(range(a.nrows), pivots)


def kernel_of_blocks(blocks: Iterable[Mat], n: int, field: Field) -> Mat:
    """
    Kernel của các block xếp chồng, tính dần: K <- K · ker(C · K)

    Mỗi block chỉ cần có n cột; block rỗng bị bỏ qua.
    """
    k = Mat.identity(field, n)
    for c in blocks:
        if k.ncols == 0:
            break
        if c.ncols != n:
            raise DimensionError("kernel_of_blocks", (c.nrows, n), c.shape)
        y = c @ k
        if y.is_zero():
            continue
        k = k @ kernel_basis(y)
    return k


@dataclass(frozen=True)
class Quotient:
    """
    V/W dưới dạng tọa độ

    Attributes:
        dim: dim V/W
        projection: (dim x dimV) tọa độ trong V -> tọa độ trong V/W
        lift: (dimV x dim) representative của mỗi basis vector của V/W
    """
    dim: int
    projection: Mat
    lift: Mat


def quotient_basis(v_basis: Mat, w_vectors: Mat) -> Quotient:
    """
    Quotient span(V)/span(W); V phải có các cột độc lập

    Tọa độ được tính theo basis V. Khi V = I thì đó chính là tọa độ ambient.
    """
    field = v_basis.field
    k = v_basis.ncols
    if w_vectors.nrows != v_basis.nrows:
        raise DimensionError("quotient_basis", v_basis.shape, w_vectors.shape)
    if w_vectors.ncols == 0 or w_vectors.is_zero():
        eye = Mat.identity(field, k)
        return Quotient(k, eye, eye)
    coords = solve_matrix(v_basis, w_vectors)
    if coords is None:
        raise SubspaceError("W is not contained in span(V)")
    w = coords.ncols
    aug = hstack(field, [coords, Mat.identity(field, k)])
    _, pivots = rref(aug)
    kept = [p for p in pivots if p < w]
    complement = [p - w for p in pivots if p >= w]
    lift = Mat.identity(field, k).submatrix(range(k), complement)
    basis = hstack(field, [coords.submatrix(range(k), kept), lift], nrows=k)
    inv = inverse(basis)
    projection = inv.submatrix(range(len(kept), k), range(k))
    return Quotient(len(complement), projection, lift)


def quotient_of(ambient_dim: int, w_vectors: Mat, field: Field) -> Quotient:
    """Quotient k^n / span(W) với tọa độ ambient"""
    return quotient_basis(Mat.identity(field, ambient_dim), w_vectors)
