"""
Test exact linear algebra over QQ and GF(p)
"""
import unittest
from fractions import Fraction

from app.core.errors import DimensionError, FieldError, SubspaceError
from app.core.exalg import (
    Field, Mat, block_diag, hstack, image_basis, inverse, kernel_basis, kernel_of_blocks, kron,
    quotient_basis, quotient_of, rank, solve, solve_matrix,
)

QQ = Field()
GF5 = Field(5)


def m(rows, field=QQ, ncols=None):
    return Mat.from_rows(field, rows, ncols)


class TestField(unittest.TestCase):

    def test_parse_variants(self):
        self.assertEqual(Field.parse(None), QQ)
        self.assertEqual(Field.parse("QQ"), QQ)
        self.assertEqual(Field.parse(0), QQ)
        self.assertEqual(Field.parse(5), GF5)
        self.assertEqual(Field.parse("GF(5)"), GF5)

    def test_non_prime_modulus_rejected(self):
        with self.assertRaises(FieldError):
            Field(4)

    def test_fraction_over_gf_p(self):
        # 1/2 = 3 trong GF(5)
        self.assertEqual(GF5.export(GF5.scalar("1/2")), 3)

    def test_fraction_with_vanishing_denominator(self):
        with self.assertRaises(FieldError):
            GF5.scalar(Fraction(1, 5))

    def test_export_rational(self):
        self.assertEqual(QQ.export(QQ.scalar("3/4")), "3/4")
        self.assertEqual(QQ.export(QQ.scalar(6)), 6)


class TestRankKernel(unittest.TestCase):

    def test_rank_of_singular_matrix(self):
        a = m([[1, 2], [2, 4]])
        self.assertEqual(rank(a), 1)

    def test_rank_differs_mod_p(self):
        rows = [[1, 2], [3, 1]]  # det = -5
        self.assertEqual(rank(m(rows)), 2)
        self.assertEqual(rank(m(rows, GF5)), 1)

    def test_kernel_basis(self):
        a = m([[1, 1, 0], [0, 0, 1]])
        k = kernel_basis(a)
        self.assertEqual(k.shape, (3, 1))
        self.assertTrue((a @ k).is_zero())

    def test_kernel_of_zero_width(self):
        a = Mat.zeros(QQ, 2, 0)
        self.assertEqual(kernel_basis(a).shape, (0, 0))
        self.assertEqual(rank(a), 0)

    def test_kernel_of_empty_matrix_is_whole_space(self):
        a = Mat.zeros(QQ, 0, 3)
        self.assertEqual(kernel_basis(a).ncols, 3)

    def test_kernel_of_blocks_matches_stacked_kernel(self):
        c1 = m([[1, -1, 0]])
        c2 = m([[0, 1, -1]])
        k = kernel_of_blocks([c1, c2], 3, QQ)
        self.assertEqual(k.ncols, 1)
        self.assertTrue((c1 @ k).is_zero())
        self.assertTrue((c2 @ k).is_zero())


class TestSolve(unittest.TestCase):

    def test_solve_consistent(self):
        a = m([[1, 1], [0, 1]])
        b = m([[3], [1]])
        x = solve(a, b)
        self.assertEqual(a @ x, b)

    def test_solve_inconsistent(self):
        a = m([[1, 1], [1, 1]])
        b = m([[1], [2]])
        self.assertIsNone(solve(a, b))

    def test_solve_many_rhs(self):
        a = m([[2, 0], [0, 3]])
        x = solve_matrix(a, Mat.identity(QQ, 2))
        self.assertEqual(x, m([["1/2", 0], [0, "1/3"]]))

    def test_solve_shape_mismatch(self):
        with self.assertRaises(DimensionError):
            solve(m([[1, 0]]), m([[1], [2]]))

    def test_inverse_of_singular(self):
        with self.assertRaises(SubspaceError):
            inverse(m([[1, 2], [2, 4]]))


class TestQuotient(unittest.TestCase):

    def test_quotient_dimension(self):
        w = m([[1], [1], [0]])
        q = quotient_of(3, w, QQ)
        self.assertEqual(q.dim, 2)
        self.assertTrue((q.projection @ w).is_zero())
        self.assertEqual(q.projection @ q.lift, Mat.identity(QQ, 2))

    def test_quotient_by_nothing(self):
        q = quotient_of(2, Mat.zeros(QQ, 2, 0), QQ)
        self.assertEqual(q.dim, 2)

    def test_w_outside_v_rejected(self):
        v = m([[1], [0]])
        w = m([[0], [1]])
        with self.assertRaises(SubspaceError):
            quotient_basis(v, w)

    def test_span_equal_gives_zero(self):
        v = m([[1, 0], [0, 1]])
        q = quotient_basis(v, m([[1, 1], [1, -1]]))
        self.assertEqual(q.dim, 0)


class TestAssembly(unittest.TestCase):

    def test_image_basis_keeps_pivot_columns(self):
        a = m([[1, 2, 0], [2, 4, 1]])
        self.assertEqual(image_basis(a), m([[1, 0], [2, 1]]))
        self.assertEqual(image_basis(Mat.zeros(QQ, 2, 3)).ncols, 0)

    def test_kron_identity(self):
        a = m([[1, 2], [3, 4]])
        k = kron(Mat.identity(QQ, 2), a)
        self.assertEqual(k, block_diag(QQ, [a, a]))

    def test_kron_index_order(self):
        a = m([[0, 1], [0, 0]])
        b = m([[5]])
        self.assertEqual(kron(a, b).entry(0, 1), QQ.scalar(5))

    def test_kron_field_mismatch(self):
        with self.assertRaises(FieldError):
            kron(m([[1]]), m([[1]], GF5))

    def test_hstack_row_mismatch(self):
        with self.assertRaises(DimensionError):
            hstack(QQ, [Mat.zeros(QQ, 2, 1), Mat.zeros(QQ, 3, 1)])

    def test_matmul_shape_mismatch(self):
        with self.assertRaises(DimensionError):
            m([[1, 2]]) @ m([[1, 2]])


if __name__ == "__main__":
    unittest.main()
