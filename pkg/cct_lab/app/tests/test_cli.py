"""
Test CLI end-to-end: exit codes, report files, cache
"""
import io
import json
import os
import shutil
import sys
import tempfile
import threading
import unittest
from contextlib import redirect_stdout
from pathlib import Path
from unittest.mock import patch

from app.core import settings_store
from app.core.logbus import LogBus
from app.core.task_manager import TaskManager
from app.main import main

BUNDLES = Path(__file__).resolve().parents[2] / "bundles"


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp(prefix="cct_cli_"))
        self.cache = self.tmp / "cache"
        self.out = self.tmp / "out"
        self.env_patcher = patch.dict(os.environ, {
            "APPDATA": str(self.tmp / "appdata"),
            settings_store.CACHE_ENV: str(self.cache),
        })
        self.env_patcher.start()
        self.orig_excepthook = sys.excepthook
        self.orig_thread_hook = threading.excepthook
        settings_store.SettingsStore._instance = None
        LogBus._instance = None
        TaskManager._instance = None

    def tearDown(self):
        sys.excepthook = self.orig_excepthook
        threading.excepthook = self.orig_thread_hook
        self.env_patcher.stop()
        settings_store.SettingsStore._instance = None
        LogBus._instance = None
        TaskManager._instance = None
        shutil.rmtree(self.tmp, ignore_errors=True)

    def run_cli(self, *argv):
        LogBus().set_echo(False)
        buf = io.StringIO()
        with redirect_stdout(buf):
            code = main(list(argv))
        return code, buf.getvalue()

    def report(self, name):
        return json.loads((self.out / f"{name}.json").read_text(encoding="utf-8"))


class TestValidate(CliTestCase):

    def test_valid_bundles(self):
        code, text = self.run_cli("validate", str(BUNDLES / "p2.json"), str(BUNDLES / "dual_k_p2.json"),
                                  "--out", str(self.out))
        self.assertEqual(code, 0)
        self.assertIn("2/2", text)
        self.assertEqual(self.report("validate_p2.json")["witness"]["classification"], "poset")

    def test_axiom_violation_fails(self):
        code, _ = self.run_cli("validate", str(BUNDLES / "nonassociative.json"), "--out", str(self.out))
        self.assertEqual(code, 1)
        report = self.report("validate_nonassociative.json")
        self.assertEqual(report["outcome"], "fail")
        self.assertEqual(report["witness"]["error"], "NonAssociativeAlgebraError")

    def test_malformed_json(self):
        bad = self.tmp / "bad.json"
        bad.write_text('{"objects": [', encoding="utf-8")
        code, _ = self.run_cli("validate", str(bad))
        self.assertEqual(code, 2)

    def test_missing_file(self):
        code, _ = self.run_cli("validate", str(self.tmp / "missing.json"))
        self.assertEqual(code, 2)

    def test_usage_error(self):
        with self.assertRaises(SystemExit) as ctx:
            self.run_cli("validate")
        self.assertEqual(ctx.exception.code, 2)


class TestSubdivide(CliTestCase):

    def test_p2(self):
        code, _ = self.run_cli("subdivide", str(BUNDLES / "p2.json"), "--out", str(self.out))
        self.assertEqual(code, 0)
        written = json.loads((self.out / "p2.sub.json").read_text(encoding="utf-8"))
        self.assertEqual(len(written["objects"]), 3)
        self.assertEqual(self.report("subdivide")["witness"]["C'"]["kind"], "poset")

    def test_twice(self):
        code, _ = self.run_cli("subdivide", str(BUNDLES / "parallel_pair.json"), "--twice",
                               "--out", str(self.out))
        self.assertEqual(code, 0)
        self.assertTrue((self.out / "parallel_pair.sub2.json").exists())
        witness = self.report("subdivide")["witness"]
        self.assertEqual(witness["C'"]["objects"], 4)
        self.assertEqual(witness["C''"]["kind"], "poset")

    def test_general_category_rejected(self):
        code, _ = self.run_cli("subdivide", str(BUNDLES / "cyclic2.json"), "--out", str(self.out))
        self.assertEqual(code, 2)


class TestHochschild(CliTestCase):

    def dims(self):
        return self.report("hh")["witness"]["htable"]["dims"]

    def test_dual_numbers(self):
        code, text = self.run_cli("hh", str(BUNDLES / "dual_numbers.json"), "--max-degree", "2",
                                  "--out", str(self.out))
        self.assertEqual(code, 0)
        self.assertEqual(self.dims(), {"0": 2, "1": 1, "2": 1})
        self.assertIn("n = 1: 1", text)

    def test_dual_numbers_char_two(self):
        code, _ = self.run_cli("hh", str(BUNDLES / "dual_numbers.json"), "--max-degree", "2",
                               "--mod", "2", "--out", str(self.out))
        self.assertEqual(code, 0)
        self.assertEqual(self.dims(), {"0": 2, "1": 2, "2": 2})

    def test_full_bar_complex_agrees(self):
        code, _ = self.run_cli("hh", str(BUNDLES / "upper_triangular.json"), "--max-degree", "2",
                               "--full", "--out", str(self.out))
        self.assertEqual(code, 0)
        self.assertEqual(self.dims(), {"0": 1, "1": 0, "2": 0})

    def test_diagram_over_p2(self):
        code, _ = self.run_cli("hh", str(BUNDLES / "const_k_p2.json"), "--max-degree", "3",
                               "--out", str(self.out))
        self.assertEqual(code, 0)
        self.assertEqual(self.dims(), {"0": 1, "1": 0, "2": 0, "3": 0})

    def test_explicit_bimodule(self):
        code, _ = self.run_cli("hh", str(BUNDLES / "const_k_p2.json"), str(BUNDLES / "regular_const_k_p2.json"),
                               "--max-degree", "1", "--out", str(self.out))
        self.assertEqual(code, 0)
        self.assertEqual(self.dims(), {"0": 1, "1": 0})

    def test_non_poset_base(self):
        code, _ = self.run_cli("hh", str(BUNDLES / "const_k_parallel.json"))
        self.assertEqual(code, 2)

    def test_bad_modulus(self):
        code, _ = self.run_cli("hh", str(BUNDLES / "dual_numbers.json"), "--mod", "4")
        self.assertEqual(code, 2)

    def test_cache_is_byte_identical(self):
        args = ("hh", str(BUNDLES / "dual_numbers.json"), "--max-degree", "2", "--out", str(self.out))
        self.run_cli(*args)
        first = (self.out / "hh.json").read_bytes()
        entries = list((self.cache / "results").rglob("*.json"))
        self.assertEqual(len(entries), 1)

        code, text = self.run_cli(*args)
        self.assertEqual(code, 0)
        self.assertEqual((self.out / "hh.json").read_bytes(), first)
        self.assertEqual(entries[0].read_bytes(), first)

    def test_cache_dir_flag_wins(self):
        other = self.tmp / "other"
        self.run_cli("hh", str(BUNDLES / "dual_numbers.json"), "--max-degree", "1", "--cache-dir", str(other))
        self.assertEqual(len(list((other / "results").rglob("*.json"))), 1)
        self.assertFalse((self.cache / "results").exists())

    def test_no_cache(self):
        self.run_cli("hh", str(BUNDLES / "dual_numbers.json"), "--max-degree", "1", "--no-cache")
        self.assertFalse((self.cache / "results").exists())


class TestCheck(CliTestCase):

    def test_config_file(self):
        code, text = self.run_cli("check", "prop21", "gcct", "--config", str(BUNDLES / "quick_checks.json"),
                                  "--out", str(self.out))
        self.assertEqual(code, 0)
        self.assertEqual(self.report("prop21")["params"]["seed"], 7)
        self.assertTrue((self.out / "summary.txt").exists())

    def test_seed_flag_wins(self):
        code, _ = self.run_cli("check", "prop21", "--config", str(BUNDLES / "quick_checks.json"),
                               "--seed", "11", "--out", str(self.out))
        self.assertEqual(code, 0)
        self.assertEqual(self.report("prop21")["params"]["seed"], 11)

    def test_corrupt(self):
        code, _ = self.run_cli("check", "prop21", "scct", "--corrupt", "--config",
                               str(BUNDLES / "quick_checks.json"), "--out", str(self.out))
        self.assertEqual(code, 1)
        self.assertIn("violated", self.report("scct")["witness"])

    def test_unknown_check(self):
        code, _ = self.run_cli("check", "prop99")
        self.assertEqual(code, 2)

    def test_bad_config(self):
        cfg = self.tmp / "cfg.json"
        cfg.write_text('{"seeds": 3}', encoding="utf-8")
        code, _ = self.run_cli("check", "prop21", "--config", str(cfg))
        self.assertEqual(code, 2)

    def test_size_cap_is_part_of_cache_key(self):
        for cap in (5000, 6000):
            cfg = self.tmp / f"cfg{cap}.json"
            cfg.write_text(json.dumps({"seed": 3, "instances": 2, "size_cap": cap}), encoding="utf-8")
            code, _ = self.run_cli("check", "prop21", "--config", str(cfg))
            self.assertEqual(code, 0)
        self.assertEqual(len(list((self.cache / "results").rglob("*.json"))), 2)

    def test_unknown_diagram_in_config(self):
        cfg = self.tmp / "cfg.json"
        cfg.write_text('{"diagrams": ["nope"]}', encoding="utf-8")
        code, _ = self.run_cli("check", "scct", "--config", str(cfg))
        self.assertEqual(code, 2)


if __name__ == "__main__":
    unittest.main()
