"""
Test finite categories: validation, classification, nerve, subdivision, comma categories
"""
import unittest
from collections import Counter
from itertools import combinations
from math import comb

from app.core.curated import chain, cyclic_group, discrete, p2, parallel_pair, square_poset
from app.core.errors import (
    CompositionTypeError, DanglingMorphismError, DegenerateImageError, IdentityLawError,
    IncompleteTableError, NonAssociativeError, NotADeltaError,
)
from app.core.fincat import (
    CatKind, Functor, build_category, category_to_dict, classify, comma_category,
    compose_functors, identity_functor, inclusion_functor, nondegenerate_simplices, subdivide,
    subdivide_functor, validate_category, validate_functor,
)


class TestValidateCategory(unittest.TestCase):

    def test_p2_from_json(self):
        cat = validate_category({"objects": ["0", "1"], "morphisms": [{"name": "u", "dom": "0", "cod": "1"}]})
        self.assertEqual(len(cat.morphisms), 3)
        self.assertEqual(cat.compose("u", "id_0"), "u")

    def test_poset_shorthand(self):
        cat = validate_category({"objects": ["a", "b", "c"], "relations": [["a", "b"], ["b", "c"]]})
        self.assertEqual(cat.hom("a", "c"), ("a<c",))

    def test_missing_composite(self):
        raw = {
            "objects": ["a", "b", "c"],
            "morphisms": [{"name": "f", "dom": "a", "cod": "b"}, {"name": "g", "dom": "b", "cod": "c"}],
        }
        with self.assertRaises(IncompleteTableError) as ctx:
            validate_category(raw)
        self.assertIn("incomplete table", str(ctx.exception))
        self.assertEqual(ctx.exception.pair, ("g", "f"))

    def test_dangling_endpoint(self):
        with self.assertRaises(DanglingMorphismError):
            validate_category({"objects": ["a"], "morphisms": [{"name": "f", "dom": "a", "cod": "z"}]})

    def test_wrong_typed_composite(self):
        raw = {
            "objects": ["a", "b"],
            "morphisms": [{"name": "f", "dom": "a", "cod": "b"}],
            "compose": [{"g": "id_b", "f": "f", "result": "id_a"}],
        }
        with self.assertRaises(CompositionTypeError):
            validate_category(raw)

    def test_explicit_mode_requires_identity_entries(self):
        raw = {"objects": ["a"], "identity_compose": "explicit"}
        with self.assertRaises(IncompleteTableError):
            validate_category(raw)

    def test_explicit_mode_wrong_identity(self):
        # e∘e = e nhưng id∘e được khai báo là id
        raw = {
            "objects": ["*"],
            "identity_compose": "explicit",
            "morphisms": [{"name": "e", "dom": "*", "cod": "*"}],
            "compose": [
                {"g": "id_*", "f": "id_*", "result": "id_*"},
                {"g": "id_*", "f": "e", "result": "id_*"},
                {"g": "e", "f": "id_*", "result": "e"},
                {"g": "e", "f": "e", "result": "e"},
            ],
        }
        with self.assertRaises(IdentityLawError) as ctx:
            validate_category(raw)
        self.assertIn("missing identity", str(ctx.exception))

    def test_non_associative_monoid(self):
        # a∘a = b, a∘b = a, b∘a = b, b∘b = b: (a∘a)∘a = b∘a = b nhưng a∘(a∘a) = a∘b = a
        raw = {
            "objects": ["*"],
            "morphisms": [{"name": "a", "dom": "*", "cod": "*"}, {"name": "b", "dom": "*", "cod": "*"}],
            "compose": [
                {"g": "a", "f": "a", "result": "b"},
                {"g": "a", "f": "b", "result": "a"},
                {"g": "b", "f": "a", "result": "b"},
                {"g": "b", "f": "b", "result": "b"},
            ],
        }
        with self.assertRaises(NonAssociativeError):
            validate_category(raw)

    def test_round_trip_through_dict(self):
        cat = square_poset()
        again = validate_category(category_to_dict(cat))
        self.assertEqual(again.objects, cat.objects)
        self.assertEqual(dict(again.table), dict(cat.table))


class TestClassify(unittest.TestCase):

    def test_kinds(self):
        self.assertIs(classify(p2()), CatKind.POSET)
        self.assertIs(classify(parallel_pair()), CatKind.DELTA)
        self.assertIs(classify(cyclic_group()), CatKind.GENERAL)
        self.assertIs(classify(discrete(3)), CatKind.POSET)


class TestSimplices(unittest.TestCase):

    def test_p2_simplices(self):
        simplices = nondegenerate_simplices(p2())
        self.assertEqual(len(simplices), 3)
        self.assertEqual(sorted(s.dim for s in simplices), [0, 0, 1])

    def test_chain3_simplices(self):
        self.assertEqual(len(nondegenerate_simplices(chain(3))), 7)

    def test_chain_simplex_counts(self):
        for n in range(1, 6):
            counts = Counter(s.dim for s in nondegenerate_simplices(chain(n)))
            # p-simplex = tập con p+1 phần tử của total order
            expected = Counter({p: len(list(combinations(range(n), p + 1))) for p in range(n)})
            self.assertEqual(counts, expected, n)
            self.assertEqual(dict(counts), {p: comb(n, p + 1) for p in range(n)}, n)

    def test_general_rejected(self):
        with self.assertRaises(NotADeltaError):
            nondegenerate_simplices(cyclic_group())


class TestSubdivide(unittest.TestCase):

    def test_p2(self):
        sub = subdivide(p2())
        cat, d = sub
        self.assertEqual(len(cat.objects), 3)
        self.assertEqual(len(cat.non_identity()), 2)
        self.assertIs(classify(cat), CatKind.POSET)
        self.assertEqual(d.obj("[0<1]"), "0")
        self.assertEqual(d.mor("[0<1]->[1]"), "u")
        self.assertEqual(d.mor("[0<1]->[0]"), "id_0")
        validate_functor(d)

    def test_chain3_has_seven_objects(self):
        sub = subdivide(chain(3))
        self.assertEqual(len(sub.category.objects), 7)
        self.assertIs(classify(sub.category), CatKind.POSET)

    def test_parallel_pair(self):
        sub = subdivide(parallel_pair())
        self.assertEqual(len(sub.category.objects), 4)
        self.assertEqual(len(sub.category.non_identity()), 4)
        self.assertIs(classify(sub.category), CatKind.POSET)
        twice = subdivide(sub.category)
        self.assertIs(classify(twice.category), CatKind.POSET)

    def test_morphisms_go_to_faces(self):
        for cat in (chain(4), parallel_pair(), square_poset()):
            sub = subdivide(cat)
            prime = sub.category
            for m in prime.non_identity():
                tau, sigma = sub.simplices[prime.dom(m)], sub.simplices[prime.cod(m)]
                self.assertGreater(tau.dim, sigma.dim, m)

    def test_discrete_is_unchanged(self):
        sub = subdivide(discrete(2))
        self.assertEqual(len(sub.category.objects), 2)
        self.assertEqual(sub.category.non_identity(), ())

    def test_general_rejected(self):
        with self.assertRaises(NotADeltaError):
            subdivide(cyclic_group())


class TestFunctors(unittest.TestCase):

    def test_identity_and_compose(self):
        cat = p2()
        ident = identity_functor(cat)
        validate_functor(compose_functors(ident, ident))

    def test_subdivide_functor_of_inclusion(self):
        incl = inclusion_functor(chain(3), ["0", "2"])
        validate_functor(incl)
        sub_f = subdivide_functor(incl)
        validate_functor(sub_f)
        self.assertEqual(sub_f.obj("[0<2]"), "[0<2]")

    def test_degenerate_image(self):
        # P2 -> point gửi u về identity
        point = discrete(1)
        x = point.objects[0]
        collapse = Functor(p2(), point, {"0": x, "1": x},
                           {"u": point.identity(x), "id_0": point.identity(x), "id_1": point.identity(x)},
                           name="c")
        validate_functor(collapse)
        with self.assertRaises(DegenerateImageError) as ctx:
            subdivide_functor(collapse)
        self.assertIn("degenerate image", str(ctx.exception))


class TestComma(unittest.TestCase):

    def test_comma_of_d_at_vertex(self):
        sub = subdivide(p2())
        comma = comma_category(sub.d, "0")
        # mọi simplex có đỉnh đầu nhận morphism từ 0
        self.assertEqual(len(comma.category.objects), 3)

    def test_comma_at_top_vertex(self):
        sub = subdivide(p2())
        comma = comma_category(sub.d, "1")
        self.assertEqual(len(comma.category.objects), 1)

    def test_comma_size_on_larger_bases(self):
        for cat in (chain(4), parallel_pair(), square_poset()):
            sub = subdivide(cat)
            for i in cat.objects:
                expected = sum(len(cat.hom(i, sub.d.obj(s))) for s in sub.category.objects)
                self.assertEqual(len(comma_category(sub.d, i).category.objects), expected, (cat.name, i))
        # parallel pair tại 0: ba simplex bắt đầu ở 0, cộng hai arrow 0 -> 1 tới [1]
        self.assertEqual(len(comma_category(subdivide(parallel_pair()).d, "0").category.objects), 5)

    def test_reindex(self):
        sub = subdivide(p2())
        comma = comma_category(sub.d, "1")
        moved = comma.reindex("u")
        self.assertEqual(set(moved.values()), {"(u,[1])"})


if __name__ == "__main__":
    unittest.main()
