"""
Test LogBus filtering và TaskManager ordering
"""
import shutil
import tempfile
import time
import unittest
from pathlib import Path

from app.core.errors import ConfigError
from app.core.logbus import LogBus, LogLevel, get_log_bus
from app.core.task_defs import CheckReport
from app.core.task_manager import Job, TaskManager, get_task_manager


class TestLogBus(unittest.TestCase):

    def setUp(self):
        LogBus._instance = None
        self.bus = get_log_bus()
        self.bus.set_echo(False)
        self.seen = []
        self.bus.add_handler(self.seen.append)

    def tearDown(self):
        LogBus._instance = None

    def test_singleton(self):
        self.assertIs(get_log_bus(), self.bus)

    def test_threshold(self):
        self.bus.set_level("WARNING")
        self.bus.info("hidden")
        self.bus.success("[CHECK] prop21: pass")
        self.bus.error("shown")
        self.assertEqual([e.message for e in self.seen], ["shown"])

    def test_success_above_info(self):
        self.bus.set_level(LogLevel.INFO)
        self.bus.debug("hidden")
        self.bus.success("[CHECK] prop21: pass")
        self.assertEqual([e.level for e in self.seen], [LogLevel.SUCCESS])

    def test_unknown_level_name(self):
        self.bus.set_level("chatty")
        self.bus.debug("hidden")
        self.bus.info("shown")
        self.assertEqual(len(self.seen), 1)

    def test_tag(self):
        self.bus.info("[HH] dims 2,1,1")
        self.bus.info("no tag here")
        self.assertEqual([e.tag for e in self.seen], ["HH", None])

    def test_log_file(self):
        tmp = Path(tempfile.mkdtemp(prefix="cct_log_"))
        try:
            self.bus.set_log_file(tmp / "logs" / "run.log")
            self.bus.info("[HH] done")
            text = (tmp / "logs" / "run.log").read_text(encoding="utf-8")
            self.assertIn("[INFO] [HH] done", text)
        finally:
            shutil.rmtree(tmp, ignore_errors=True)

    def test_broken_handler_does_not_break_logging(self):
        def boom(entry):
            raise RuntimeError("handler failed")

        self.bus.add_handler(boom)
        self.bus.info("still delivered")
        self.bus.remove_handler(boom)
        self.assertEqual(self.seen[-1].message, "still delivered")


class TestTaskManager(unittest.TestCase):

    def setUp(self):
        TaskManager._instance = None
        LogBus._instance = None
        get_log_bus().set_echo(False)
        self.tm = get_task_manager()

    def tearDown(self):
        TaskManager._instance = None
        LogBus._instance = None

    @staticmethod
    def slow(name, delay):
        time.sleep(delay)
        return CheckReport.passed(name)

    def test_order_follows_submission(self):
        self.tm.set_max_workers(3)
        jobs = [Job(n, self.slow, {"name": n, "delay": d})
                for n, d in (("a", 0.05), ("b", 0.0), ("c", 0.02))]
        reports = self.tm.run_all(jobs)
        self.assertEqual([r.name for r in reports], ["a", "b", "c"])
        self.assertTrue(all(r.ok for r in reports))

    def test_errors_become_failed_reports(self):
        def config_error():
            raise ConfigError("bad key 'seeds'")

        def crash():
            raise ZeroDivisionError("oops")

        reports = self.tm.run_all([Job("cfg", config_error), Job("crash", crash)])
        self.assertFalse(reports[0].ok)
        self.assertEqual(reports[0].witness["error"], "ConfigError")
        self.assertIn("internal error", reports[1].message)

    def test_single_worker_runs_inline(self):
        self.tm.set_max_workers(0)
        reports = self.tm.run_all([Job("a", self.slow, {"name": "a", "delay": 0})])
        self.assertEqual(reports[0].name, "a")
        self.assertEqual(self.tm.run_all([]), [])


if __name__ == "__main__":
    unittest.main()
