"""
Định nghĩa các exception class cho CCT Lab
Mỗi lỗi giữ lại dữ liệu cấu trúc (triple, square, degree...) để report dùng lại
"""


class CctError(Exception):
    """Base exception cho tất cả lỗi trong CCT Lab"""
    pass


# ============ EXACT LINEAR ALGEBRA ============

class FieldError(CctError):
    """Field không hợp lệ hoặc scalar không thuộc field"""
    pass


class DimensionError(CctError):
    """Kích thước ma trận không khớp"""
    def __init__(self, operation: str, left: tuple, right: tuple):
        self.operation = operation
        self.left = left
        self.right = right
        super().__init__(f"[{operation}] dimension mismatch: {left} vs {right}")


class SubspaceError(CctError):
    """W không nằm trong span(V)"""
    pass


# ============ FINITE CATEGORIES ============

class CategoryError(CctError):
    """Lỗi liên quan đến finite category"""
    pass


class IncompleteTableError(CategoryError):
    """Composition table thiếu entry cho một cặp composable"""
    def __init__(self, g: str, f: str):
        self.pair = (g, f)
        super().__init__(f"incomplete table: compose({g}, {f}) missing")


class IdentityLawError(CategoryError):
    """Identity law bị vi phạm"""
    def __init__(self, identity: str, morphism: str, got: str):
        self.identity = identity
        self.morphism = morphism
        self.got = got
        super().__init__(f"missing identity: {identity} composed with {morphism} gives {got}")


class NonAssociativeError(CategoryError):
    """Composition không kết hợp trên một triple"""
    def __init__(self, h: str, g: str, f: str):
        self.triple = (h, g, f)
        super().__init__(f"non-associative composition at ({h}, {g}, {f})")


class DanglingMorphismError(CategoryError):
    """Morphism tham chiếu object/morphism không tồn tại"""
    def __init__(self, name: str, missing: str):
        self.name = name
        self.missing = missing
        super().__init__(f"dangling morphism '{name}': unknown '{missing}'")


class CompositionTypeError(CategoryError):
    """Entry của composition table sai dom/cod"""
    def __init__(self, g: str, f: str, reason: str):
        self.pair = (g, f)
        super().__init__(f"ill-typed composite compose({g}, {f}): {reason}")


class NotADeltaError(CategoryError):
    """Category không phải delta (có endomorphism hoặc cycle)"""
    def __init__(self, witness: str):
        self.witness = witness
        super().__init__(f"not a delta category: {witness}")


class DegenerateImageError(CategoryError):
    """Functor đưa simplex nondegenerate về simplex degenerate"""
    def __init__(self, simplex: str, morphism: str):
        self.simplex = simplex
        self.morphism = morphism
        super().__init__(f"degenerate image: {simplex} has edge {morphism} sent to an identity")


class FunctorError(CategoryError):
    """Functor không hợp lệ"""
    pass


# ============ ALGEBRAS / MODULES ============

class AlgebraError(CctError):
    """Lỗi cấu trúc đại số"""
    pass


class NonAssociativeAlgebraError(AlgebraError):
    def __init__(self, triple: tuple):
        self.triple = tuple(triple)
        super().__init__(f"non-associative product at basis triple {self.triple}")


class UnitLawError(AlgebraError):
    def __init__(self, basis_index: int, side: str):
        self.basis_index = basis_index
        self.side = side
        super().__init__(f"unit law fails on the {side} for basis element {basis_index}")


class ModuleAxiomError(AlgebraError):
    """Action không thỏa tiên đề module/bimodule"""
    def __init__(self, axiom: str, detail: str = ""):
        self.axiom = axiom
        msg = f"module axiom violated: {axiom}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class HomomorphismError(AlgebraError):
    def __init__(self, reason: str, name: str = ""):
        self.reason = reason
        self.name = name
        prefix = f"hom '{name}'" if name else "hom"
        super().__init__(f"{prefix} is not an algebra homomorphism: {reason}")


class NotHomogeneousError(AlgebraError):
    """Basis không thuần nhất theo Peirce decomposition"""
    def __init__(self, where: str, index: int):
        self.where = where
        self.index = index
        super().__init__(f"{where} basis element {index} is not Peirce-homogeneous")


class BudgetExceededError(AlgebraError):
    """Cochain space vượt quá size cap"""
    def __init__(self, degree: int, size: int, cap: int):
        self.degree = degree
        self.size = size
        self.cap = cap
        super().__init__(f"cochain space C^{degree} has dimension {size} > cap {cap}")


# ============ HOMOLOGICAL ALGEBRA ============

class ComplexError(CctError):
    """Differential sai shape hoặc d∘d ≠ 0"""
    pass


class ChainMapError(CctError):
    def __init__(self, degree: int, reason: str = "square does not commute"):
        self.degree = degree
        super().__init__(f"chain map fails in degree {degree}: {reason}")


class HomotopyError(CctError):
    def __init__(self, degree: int, relation: str):
        self.degree = degree
        self.relation = relation
        super().__init__(f"homotopy identity '{relation}' fails in degree {degree}")


class DoubleComplexError(CctError):
    def __init__(self, square: str, position: tuple):
        self.square = square
        self.position = tuple(position)
        super().__init__(f"double complex: {square} fails at {self.position}")


# ============ DIAGRAMS ============

class DiagramError(CctError):
    pass


class NaturalityError(DiagramError):
    def __init__(self, morphism: str, what: str = "naturality square"):
        self.morphism = morphism
        super().__init__(f"{what} fails at morphism '{morphism}'")


class NotAPosetError(DiagramError):
    def __init__(self, kind: str):
        self.kind = kind
        super().__init__(f"base category is {kind}, not a poset; subdivide it first")


class BaseMismatchError(DiagramError):
    """Hai module (hoặc module và algebra) không nằm trên cùng diagram/algebra"""
    pass


# ============ I/O + CLI ============

class BundleFormatError(CctError):
    """File bundle không đọc được"""
    def __init__(self, path: str, detail: str):
        self.path = str(path)
        self.detail = detail
        super().__init__(f"{self.path}: {detail}")


class UnknownCheckError(CctError):
    def __init__(self, name: str, known: list):
        self.name = name
        super().__init__(f"unknown check '{name}' (known: {', '.join(known)})")


class ConfigError(CctError):
    pass
