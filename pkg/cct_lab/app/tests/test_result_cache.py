"""
Test result cache, atomic write và report serialization
"""
import shutil
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from app.core.result_cache import ResultCache
from app.core.task_defs import CheckOutcome, CheckReport, HTable, canonical_json
from app.core.utils import atomic_write_text, content_hash


class TestContentHash(unittest.TestCase):

    def test_key_order_irrelevant(self):
        self.assertEqual(content_hash({"a": 1, "b": [1, 2]}), content_hash({"b": [1, 2], "a": 1}))

    def test_params_change_key(self):
        k1 = ResultCache.make_key("hh", {"x": 1}, {"max_degree": 2}, "1.0.0")
        k2 = ResultCache.make_key("hh", {"x": 1}, {"max_degree": 3}, "1.0.0")
        k3 = ResultCache.make_key("hh", {"x": 1}, {"max_degree": 2}, "1.0.1")
        self.assertEqual(len({k1, k2, k3}), 3)


class TestAtomicWrite(unittest.TestCase):

    def setUp(self):
        self.dir = Path(tempfile.mkdtemp(prefix="cct_atomic_"))

    def tearDown(self):
        shutil.rmtree(self.dir, ignore_errors=True)

    def test_creates_parents(self):
        path = atomic_write_text(self.dir / "a" / "b.json", "{}\n")
        self.assertEqual(path.read_text(encoding="utf-8"), "{}\n")

    def test_failed_replace_keeps_old_content(self):
        target = self.dir / "r.json"
        target.write_text("old", encoding="utf-8")
        with patch("app.core.utils.os.replace", side_effect=OSError("disk full")):
            with self.assertRaises(OSError):
                atomic_write_text(target, "new")
        self.assertEqual(target.read_text(encoding="utf-8"), "old")
        self.assertEqual(list(self.dir.glob(".r.json.*")), [])


class TestResultCache(unittest.TestCase):

    def setUp(self):
        self.dir = Path(tempfile.mkdtemp(prefix="cct_cache_"))

    def tearDown(self):
        shutil.rmtree(self.dir, ignore_errors=True)

    def test_store_then_load(self):
        cache = ResultCache(self.dir)
        key = ResultCache.make_key("check", "prop21", {"seed": 1}, "1.0.0")
        self.assertIsNone(cache.load(key))
        text = CheckReport.passed("prop21", "ok").to_json()
        path = cache.store(key, text)
        self.assertEqual(path.parent.name, key[:2])
        self.assertEqual(cache.load(key), text)

    def test_disabled(self):
        cache = ResultCache(self.dir, enabled=False)
        self.assertIsNone(cache.store("ab" * 32, "{}"))
        self.assertIsNone(cache.load("ab" * 32))
        self.assertEqual(list(self.dir.iterdir()), [])

    def test_corrupt_entry_is_a_miss(self):
        cache = ResultCache(self.dir)
        key = "cd" * 32
        cache.path_for(key).parent.mkdir(parents=True)
        cache.path_for(key).write_text("{broken", encoding="utf-8")
        self.assertIsNone(cache.load(key))


class TestReports(unittest.TestCase):

    def test_report_round_trip(self):
        report = CheckReport.failed("scct", "rank 1 < 2", instance_id="abc",
                                    params={"seed": 1}, controls={"broken action": True})
        again = CheckReport.from_dict(report.to_dict())
        self.assertIs(again.outcome, CheckOutcome.FAIL)
        self.assertEqual(again.controls, {"broken action": True})
        self.assertEqual(again.to_json(), report.to_json())

    def test_elapsed_not_serialized(self):
        report = CheckReport.passed("prop21")
        report.elapsed_ms = 1234
        self.assertNotIn("elapsed_ms", report.to_json())

    def test_canonical_json_is_stable(self):
        self.assertEqual(canonical_json({"b": 1, "a": 2}), '{\n  "a": 2,\n  "b": 1\n}\n')

    def test_htable(self):
        table = HTable("abc", None, [1, 0, 0, 0])
        self.assertEqual(table.max_degree, 3)
        data = table.to_dict()
        self.assertEqual(data["dims"], {"0": 1, "1": 0, "2": 0, "3": 0})
        self.assertEqual(HTable.from_dict(data).dims, [1, 0, 0, 0])


if __name__ == "__main__":
    unittest.main()
