"""
Test check suites: config parsing, registry, negative controls, corrupt mode
"""
import unittest

from app.core.checks import (
    SUITES, SuiteConfig, _subdivided_twice, _with_parallel_arrow, run_check, validate_config,
)
from app.core.curated import parallel_pair
from app.core.errors import CctError, ConfigError, UnknownCheckError
from app.core.fincat import CatKind, classify
from app.core.logbus import get_log_bus
from app.core.task_defs import CheckOutcome


def small(**kwargs) -> SuiteConfig:
    base = {"seed": 3, "instances": 3, "max_degree": 1, "diagrams": ("const-k/P2",)}
    base.update(kwargs)
    return SuiteConfig(**base)


class TestSuiteConfig(unittest.TestCase):

    def test_from_dict(self):
        cfg = SuiteConfig.from_dict({"seed": 7, "instances": 10, "diagrams": ["const-k/P2"]})
        self.assertEqual(cfg.seed, 7)
        self.assertEqual(cfg.count(100), 10)
        self.assertEqual(cfg.diagrams, ("const-k/P2",))

    def test_defaults(self):
        cfg = SuiteConfig()
        self.assertEqual(cfg.count(50), 50)
        self.assertEqual(cfg.field.name, "QQ")

    def test_unknown_key(self):
        with self.assertRaises(ConfigError) as ctx:
            SuiteConfig.from_dict({"seeds": 1})
        self.assertIn("seeds", str(ctx.exception))

    def test_bad_types(self):
        for bad in ({"seed": "1"}, {"seed": True}, {"instances": -1}, {"corrupt": 1},
                    {"diagrams": "const-k/P2"}):
            with self.assertRaises(ConfigError, msg=str(bad)):
                SuiteConfig.from_dict(bad)

    def test_non_prime_modulus(self):
        with self.assertRaises(ConfigError):
            SuiteConfig.from_dict({"modulus": 4})

    def test_unknown_diagram(self):
        with self.assertRaises(ConfigError):
            validate_config(SuiteConfig(diagrams=("nope",)))

    def test_params_are_json_friendly(self):
        params = small().params()
        self.assertEqual(params["diagrams"], ["const-k/P2"])
        self.assertNotIn("size_cap", params)

    def test_cache_params_track_size_cap(self):
        self.assertEqual(small(size_cap=500).cache_params()["size_cap"], 500)
        self.assertNotEqual(small(size_cap=500).cache_params(), small().cache_params())
        self.assertEqual(small(size_cap=500).params(), small().params())


class TestRunCheck(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        get_log_bus().set_echo(False)

    def test_registry(self):
        self.assertEqual(list(SUITES), ["prop21", "prop32", "prop37", "adjunction", "dstar-ff",
                                        "scct", "invariance", "gcct"])

    def test_unknown_check(self):
        with self.assertRaises(UnknownCheckError):
            run_check("prop99", small())

    def assert_passes(self, name, cfg=None):
        report = run_check(name, cfg or small())
        self.assertIs(report.outcome, CheckOutcome.PASS, f"{name}: {report.message} {report.witness}")
        self.assertTrue(report.controls)
        self.assertTrue(all(report.controls.values()))
        return report

    def test_prop21(self):
        report = self.assert_passes("prop21")
        self.assertEqual(report.witness["parallel"]["objects"], 4)
        self.assertEqual(report.witness["parallel"]["kind"], "poset")
        self.assertEqual(report.witness["parallel"]["twice_objects"], 8)
        self.assertEqual(report.witness["parallel"]["twice_kind"], "poset")

    def test_prop21_doubled_arrow_is_caught(self):
        _, twice = _subdivided_twice(parallel_pair())
        doubled = _with_parallel_arrow(twice)
        self.assertEqual(len(doubled.morphisms), len(twice.morphisms) + 1)
        self.assertIs(classify(doubled), CatKind.DELTA)
        controls = SUITES["prop21"].controls(small())
        with self.assertRaises(CctError):
            controls["doubled arrow in C″"]()

    def test_prop32(self):
        self.assert_passes("prop32")

    def test_prop32_char_two(self):
        self.assert_passes("prop32", small(modulus=2))

    def test_prop37(self):
        self.assert_passes("prop37")

    def test_adjunction(self):
        self.assert_passes("adjunction")

    def test_dstar_ff(self):
        self.assert_passes("dstar-ff")

    def test_scct(self):
        report = self.assert_passes("scct")
        self.assertEqual(report.witness["const-k/P2 A,A"]["hom"], 1)
        self.assertEqual(report.witness["const-k/P2 A/0,A"]["hom"], 1)

    def test_scct_transitions_differ_from_structure_maps(self):
        report = self.assert_passes("scct", small(diagrams=("dual-k/P2", "kxk-k/P2")))
        w = report.witness
        for name in ("dual-k/P2", "kxk-k/P2"):
            self.assertEqual(w[f"{name} A/0,A"]["hom"], 2, name)
            self.assertEqual(w[f"{name} A,A/0"]["hom"], 1, name)
            self.assertEqual(w[f"{name} A@0,A"]["hom_shriek"], 2, name)
            self.assertEqual(w[f"{name} A,A@0+A"]["hom"], w[f"{name} A,A@0+A"]["hom_shriek"], name)

    def test_invariance(self):
        report = self.assert_passes("invariance")
        self.assertEqual(report.witness["const-k/P2"]["A"], [1, 0])

    def test_gcct(self):
        report = self.assert_passes("gcct")
        self.assertEqual(report.witness["C'"], {"objects": 4, "kind": "poset"})

    def test_same_seed_same_report(self):
        a = run_check("prop21", small())
        b = run_check("prop21", small())
        self.assertEqual(a.to_json(), b.to_json())

    def test_instance_id_tracks_params(self):
        self.assertNotEqual(run_check("prop21", small()).instance_id,
                            run_check("prop21", small(seed=4)).instance_id)


class TestCorruptMode(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        get_log_bus().set_echo(False)

    def test_every_suite_detects_its_mutation(self):
        for name in SUITES:
            report = run_check(name, small(corrupt=True))
            self.assertIs(report.outcome, CheckOutcome.FAIL, name)
            self.assertIn("violated", report.witness, name)
            self.assertTrue(report.witness["mutation"])


if __name__ == "__main__":
    unittest.main()
