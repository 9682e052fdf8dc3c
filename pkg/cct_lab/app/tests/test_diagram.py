"""
Test diagrams, modules trên diagram, pullback/pushforward và cấu trúc A!
"""
import unittest
from unittest.mock import patch

from app.core.algkit import (
    bimodule_hom_space, center_dim, is_bimodule_map, regular_bimodule, regular_module,
)
from app.core.curated import (
    chain, concentrated_module, constant_diagram, curated_diagrams, dual_numbers, gcct_diagram,
    ground_algebra, p2,
)
from app.core.errors import (
    BaseMismatchError, DiagramError, HomomorphismError, NaturalityError, NotAPosetError,
)
from app.core.exalg import Field, Mat, rank
from app.core.diagram import (
    DiagModuleMap, Pushforward, adjunction_data, compose_maps, direct_sum, f_shriek, hom_space,
    hom_space_bimod, identity_map, maps_to_matrix, opposite_diagram, pullback_map, regular_diagram_bimodule,
    regular_diagram_module, shriek_algebra, shriek_bimodule, shriek_cohomology, shriek_map, shriek_pushforward_map,
    subdivide_diagram, subdivide_module, validate_diag_module, validate_diagram, validate_module_map,
)
from app.core.fincat import subdivide

QQ = Field()


def const_k_p2():
    return constant_diagram(p2(), ground_algebra(QQ), "const-k/P2")


def diag(*entries):
    return Mat.from_rows(QQ, [[entries[i] if i == j else 0 for j in range(len(entries))]
                              for i in range(len(entries))])


class TestValidateDiagram(unittest.TestCase):

    def test_identities_filled_in(self):
        d = const_k_p2()
        self.assertEqual(d.phi("id_0"), Mat.identity(QQ, 1))

    def test_missing_hom(self):
        k = ground_algebra(QQ)
        with self.assertRaises(DiagramError):
            validate_diagram(p2(), {"0": k, "1": k}, {})

    def test_missing_algebra(self):
        with self.assertRaises(DiagramError):
            validate_diagram(p2(), {"0": ground_algebra(QQ)}, {})

    def test_hom_must_preserve_unit(self):
        dual, k = dual_numbers(QQ), ground_algebra(QQ)
        with self.assertRaises(HomomorphismError):
            validate_diagram(p2(), {"0": dual, "1": k}, {"u": Mat.from_rows(QQ, [[0], [1]])})

    def test_functoriality(self):
        # x ↦ c x là algebra hom của k[x]/x^2; φ^{0<2} phải bằng φ^{0<1} φ^{1<2}
        dual = dual_numbers(QQ)
        base = chain(3)
        algs = {x: dual for x in base.objects}
        with self.assertRaises(NaturalityError):
            validate_diagram(base, algs, {"0<1": diag(1, 2), "1<2": diag(1, 3), "0<2": diag(1, 1)})
        good = validate_diagram(base, algs, {"0<1": diag(1, 2), "1<2": diag(1, 3), "0<2": diag(1, 6)})
        self.assertEqual(good.phi("0<2"), diag(1, 6))


class TestModules(unittest.TestCase):

    def test_transition_shape(self):
        d = const_k_p2()
        k = regular_module(ground_algebra(QQ))
        with self.assertRaises(DiagramError):
            validate_diag_module(d, {"0": k, "1": k}, {"u": Mat.zeros(QQ, 1, 2)})

    def test_transition_not_linear(self):
        d = constant_diagram(p2(), dual_numbers(QQ), "const-dual/P2")
        dual = regular_module(d.algebra("0"))
        # chiếu lên 1 không giao hoán với phép nhân x
        with self.assertRaises(NaturalityError):
            validate_diag_module(d, {"0": dual, "1": dual}, {"u": diag(1, 0)})

    def test_regular_module_validates(self):
        d = curated_diagrams(QQ)["dual-k/P2"]
        m = regular_diagram_module(d)
        validate_diag_module(d, m.fibers, m.transitions)

    def test_hom_of_regular(self):
        m = regular_diagram_module(const_k_p2())
        self.assertEqual(len(hom_space(m, m)), 1)

    def test_hom_into_sum(self):
        m = regular_diagram_module(const_k_p2())
        self.assertEqual(len(hom_space(m, direct_sum(m, m))), 2)

    def test_concentrated_modules(self):
        d = const_k_p2()
        k = regular_module(ground_algebra(QQ))
        s0 = concentrated_module(d, "0", k)
        s1 = concentrated_module(d, "1", k)
        self.assertEqual(len(hom_space(s0, s0)), 1)
        self.assertEqual(len(hom_space(s1, s0)), 0)

    def test_map_naturality(self):
        m = regular_diagram_module(const_k_p2())
        with self.assertRaises(NaturalityError):
            validate_module_map(m, m, {"0": Mat.identity(QQ, 1), "1": Mat.from_rows(QQ, [[2]])})

    def test_hom_across_diagrams_rejected(self):
        with self.assertRaises(BaseMismatchError):
            hom_space(regular_diagram_module(const_k_p2()),
                      regular_diagram_module(curated_diagrams(QQ)["dual-k/P2"]))
        base = p2()
        dual = dual_numbers(QQ)
        flat = constant_diagram(base, ground_algebra(QQ))
        bent = validate_diagram(base, {"0": dual, "1": ground_algebra(QQ)},
                                {"u": Mat.column(QQ, list(dual.unit))})
        m, n = regular_diagram_module(flat), regular_diagram_module(bent)
        with self.assertRaises(BaseMismatchError) as ctx:
            hom_space(m, n)
        self.assertIn("different algebras at 0", str(ctx.exception))
        with self.assertRaises(BaseMismatchError):
            validate_module_map(n, m, {"0": Mat.zeros(QQ, 1, 2), "1": Mat.zeros(QQ, 1, 1)})

    def test_hom_over_equal_but_separate_diagrams(self):
        base = p2()
        m = regular_diagram_module(constant_diagram(base, ground_algebra(QQ)))
        n = regular_diagram_module(constant_diagram(base, ground_algebra(QQ)))
        self.assertEqual(len(hom_space(m, n)), 1)

    def test_maps_to_matrix(self):
        m = regular_diagram_module(const_k_p2())
        mat = maps_to_matrix(hom_space(m, m), ["0", "1"], QQ)
        self.assertEqual(mat.shape, (2, 1))
        self.assertEqual(rank(mat), 1)


class TestPullback(unittest.TestCase):

    def test_subdivided_diagram(self):
        d = const_k_p2()
        sub = subdivide(d.base)
        prime = subdivide_diagram(d, sub)
        self.assertIs(prime.base, sub.category)
        self.assertEqual(len(prime.algebras), 3)

    def test_pullback_is_fully_faithful(self):
        d = curated_diagrams(QQ)["dual-k/P2"]
        sub = subdivide(d.base)
        prime = subdivide_diagram(d, sub)
        m = regular_diagram_module(d)
        n = direct_sum(m, m)
        m2, n2 = subdivide_module(m, sub, prime), subdivide_module(n, sub, prime)
        below, above = hom_space(m, n), hom_space(m2, n2)
        self.assertEqual(len(below), len(above))
        images = [pullback_map(sub.d, eta, m2, n2) for eta in below]
        self.assertEqual(rank(maps_to_matrix(images, sub.category.objects, QQ)), len(below))


class TestPushforward(unittest.TestCase):

    def test_base_mismatch(self):
        d = const_k_p2()
        sub = subdivide(d.base)
        m = regular_diagram_module(d)
        with self.assertRaises(BaseMismatchError):
            Pushforward(sub.d, m, d)

    def test_shriek_of_pullback_recovers_dims(self):
        for d in (const_k_p2(), curated_diagrams(QQ)["dual-k/P2"]):
            sub = subdivide(d.base)
            prime = subdivide_diagram(d, sub)
            m = regular_diagram_module(d)
            pushed = f_shriek(sub.d, subdivide_module(m, sub, prime), d)
            self.assertEqual({x: pushed.dim(x) for x in d.base.objects},
                             {x: m.dim(x) for x in d.base.objects})

    def test_adjunction_regular(self):
        d = curated_diagrams(QQ)["dual-k/P2"]
        sub = subdivide(d.base)
        prime = subdivide_diagram(d, sub)
        m = regular_diagram_module(d)
        data = adjunction_data(sub.d, subdivide_module(m, sub, prime), m, d)
        self.assertTrue(data.left_triangle)
        self.assertTrue(data.right_triangle)
        self.assertTrue(data.ok)
        self.assertEqual(data.hom_dims[0], data.hom_dims[1])
        for eps in data.counit.components.values():
            self.assertEqual(rank(eps), eps.nrows)

    def test_pushforward_of_identity(self):
        d = curated_diagrams(QQ)["dual-k/P2"]
        sub = subdivide(d.base)
        n = subdivide_module(regular_diagram_module(d), sub, subdivide_diagram(d, sub))
        pushed = shriek_pushforward_map(sub.d, identity_map(n), d)
        for x, comp in pushed.components.items():
            self.assertEqual(comp, Mat.identity(QQ, pushed.source.dim(x)))

    def test_pushforward_respects_composition(self):
        d = curated_diagrams(QQ)["dual-k/P2"]
        sub = subdivide(d.base)
        n = subdivide_module(regular_diagram_module(d), sub, subdivide_diagram(d, sub))
        n2 = direct_sum(n, n)
        into, back = hom_space(n, n2)[:2], hom_space(n2, n)[:2]
        self.assertTrue(into and back)
        for theta in into:
            pushed_theta = shriek_pushforward_map(sub.d, theta, d)
            validate_module_map(pushed_theta.source, pushed_theta.target, pushed_theta.components)
            for rho in back:
                pushed_rho = shriek_pushforward_map(sub.d, rho, d)
                both = shriek_pushforward_map(sub.d, compose_maps(rho, theta), d)
                for x in d.base.objects:
                    self.assertEqual(both.at(x), pushed_rho.at(x) @ pushed_theta.at(x), x)

    def test_pushforward_of_scalar_map(self):
        d = curated_diagrams(QQ)["dual-k/P2"]
        sub = subdivide(d.base)
        n = subdivide_module(regular_diagram_module(d), sub, subdivide_diagram(d, sub))
        twice = DiagModuleMap(n, n, {s: Mat.identity(QQ, n.dim(s)).scale(2) for s in n.fibers})
        pushed = shriek_pushforward_map(sub.d, twice, d)
        for x, comp in pushed.components.items():
            self.assertEqual(comp, Mat.identity(QQ, pushed.source.dim(x)).scale(2))

    def test_adjunction_rejects_unnatural_unit(self):
        d = curated_diagrams(QQ)["dual-k/P2"]
        sub = subdivide(d.base)
        prime = subdivide_diagram(d, sub)
        m = regular_diagram_module(d)
        real_unit = Pushforward.unit
        first = sub.category.objects[0]

        def skewed_unit(pf):
            eta = real_unit(pf)
            comps = {s: c.scale(2) if s == first else c for s, c in eta.components.items()}
            return DiagModuleMap(eta.source, eta.target, comps)

        with patch.object(Pushforward, "unit", skewed_unit):
            with self.assertRaises(NaturalityError):
                adjunction_data(sub.d, subdivide_module(m, sub, prime), m, d)


class TestShriek(unittest.TestCase):

    def test_opposite_diagram_is_a_diagram(self):
        d = curated_diagrams(QQ)["kxk-k/P2"]
        op = opposite_diagram(d)
        validate_diagram(op.base, op.algebras, op.homs)
        self.assertEqual(shriek_algebra(op).algebra.dim, shriek_algebra(d).algebra.dim)

    def test_const_k_p2_is_triangular(self):
        sa = shriek_algebra(const_k_p2())
        self.assertEqual(sa.algebra.dim, 3)
        self.assertEqual(center_dim(sa.algebra), 1)
        self.assertEqual(sa.pairs, (("0", "0"), ("0", "1"), ("1", "1")))

    def test_dual_k_p2(self):
        sa = shriek_algebra(curated_diagrams(QQ)["dual-k/P2"])
        self.assertEqual(sa.algebra.dim, 5)

    def test_not_a_poset(self):
        with self.assertRaises(NotAPosetError):
            shriek_algebra(gcct_diagram(QQ))

    def test_cohomology(self):
        d = const_k_p2()
        self.assertEqual(shriek_cohomology(d, regular_diagram_bimodule(d), 3), [1, 0, 0, 0])

    def test_regular_bimodule_matches(self):
        d = const_k_p2()
        sa = shriek_algebra(d)
        mb = shriek_bimodule(regular_diagram_bimodule(d), sa)
        self.assertEqual(mb.module.dim, sa.algebra.dim)
        regular = regular_bimodule(sa.algebra)
        self.assertTrue(is_bimodule_map(regular, mb.module, Mat.identity(QQ, mb.module.dim)))

    def test_hom_spaces_agree(self):
        for name in ("const-k/P2", "dual-k/P2"):
            d = curated_diagrams(QQ)[name]
            m = regular_diagram_bimodule(d)
            mb = shriek_bimodule(m)
            maps = hom_space_bimod(m, m)
            self.assertEqual(len(maps), len(bimodule_hom_space(mb.module, mb.module)), name)
            images = [shriek_map(eta, mb, mb) for eta in maps]
            self.assertTrue(all(img.shape == (mb.module.dim, mb.module.dim) for img in images))

    def test_identity_shriek_map(self):
        d = const_k_p2()
        m = regular_diagram_bimodule(d)
        mb = shriek_bimodule(m)
        eta = validate_module_map(m, m, {x: Mat.identity(QQ, m.dim(x)) for x in d.base.objects})
        self.assertEqual(shriek_map(eta, mb, mb), Mat.identity(QQ, mb.module.dim))

    def test_hom_space_bimod_needs_bimodules(self):
        d = const_k_p2()
        with self.assertRaises(DiagramError):
            hom_space_bimod(regular_diagram_module(d), regular_diagram_module(d))

    def test_shriek_respects_composition(self):
        d = curated_diagrams(QQ)["dual-k/P2"]
        sa = shriek_algebra(d)
        m = regular_diagram_bimodule(d)
        n = direct_sum(m, m)
        m_s, n_s = shriek_bimodule(m, sa), shriek_bimodule(n, sa)
        into, back = hom_space_bimod(m, n), hom_space_bimod(n, m)
        self.assertTrue(into and back)
        for eta in into:
            for theta in back:
                self.assertEqual(shriek_map(compose_maps(theta, eta), m_s, m_s),
                                 shriek_map(theta, n_s, m_s) @ shriek_map(eta, m_s, n_s))

    def test_shriek_of_zero_map(self):
        d = curated_diagrams(QQ)["kxk-k/P2"]
        m = regular_diagram_bimodule(d)
        n = direct_sum(m, m)
        sa = shriek_algebra(d)
        m_s, n_s = shriek_bimodule(m, sa), shriek_bimodule(n, sa)
        zero = DiagModuleMap(m, n, {x: Mat.zeros(QQ, n.dim(x), m.dim(x)) for x in d.base.objects})
        image = shriek_map(zero, m_s, n_s)
        self.assertEqual(image.shape, (n_s.module.dim, m_s.module.dim))
        self.assertTrue(image.is_zero())

    def test_left_action_goes_through_transition(self):
        d = const_k_p2()
        k = regular_bimodule(d.algebra("0"))
        m = validate_diag_module(d, {"0": k, "1": k}, {"u": Mat.from_rows(QQ, [[3]])}, name="M3")
        sa = shriek_algebra(d)
        mb = shriek_bimodule(m, sa)
        self.assertEqual(mb.module.dim, 3)
        act = mb.module.left[sa.index[("0", "1", 0)]]
        # φ^{01} · (m ở thành phần (1,1)) = T^{01}(m) ở thành phần (0,1)
        landed = act.column_values(mb.index[("1", "1", 0)])
        expected = [QQ.zero] * mb.module.dim
        expected[mb.index[("0", "1", 0)]] = QQ.scalar(3)
        self.assertEqual(landed, expected)
        # không tác động lên thành phần (0,0)
        self.assertTrue(act.col(mb.index[("0", "0", 0)]).is_zero())


if __name__ == "__main__":
    unittest.main()
