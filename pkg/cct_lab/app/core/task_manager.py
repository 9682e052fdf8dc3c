"""
Task Manager - ThreadPoolExecutor wrapper để chạy các check độc lập song song
Report luôn trả về theo thứ tự submit, không phụ thuộc thread nào xong trước
"""
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List

from .errors import CctError
from .logbus import get_log_bus
from .task_defs import CheckReport
from .utils import elapsed_ms


@dataclass
class Job:
    """Một đơn vị công việc: fn(**kwargs) -> CheckReport"""
    name: str
    fn: Callable[..., CheckReport]
    kwargs: Dict[str, Any] = field(default_factory=dict)


class TaskManager:
    """
    Singleton Task Manager
    Quản lý thread pool và gom kết quả
    """
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if self._initialized:
            return
        self._initialized = True
        self._max_workers = 4

    def set_max_workers(self, n: int):
        self._max_workers = max(1, int(n))

    @staticmethod
    def _run_one(job: Job) -> CheckReport:
        log = get_log_bus()
        start = time.time()
        try:
            report = job.fn(**job.kwargs)
        except CctError as e:
            report = CheckReport.failed(job.name, str(e), witness={"error": type(e).__name__})
        except Exception as e:
            log.error(f"Task error: {e}\n{traceback.format_exc()}")
            report = CheckReport.failed(job.name, f"internal error: {e}",
                                        witness={"error": type(e).__name__})
        report.elapsed_ms = elapsed_ms(start)
        return report

    def run_all(self, jobs: List[Job]) -> List[CheckReport]:
        """Chạy jobs song song, trả về reports theo thứ tự jobs"""
        log = get_log_bus()
        if not jobs:
            return []
        if self._max_workers == 1 or len(jobs) == 1:
            return [self._run_one(job) for job in jobs]
        log.debug(f"[TASK] {len(jobs)} jobs trên {self._max_workers} workers")
        with ThreadPoolExecutor(max_workers=self._max_workers, thread_name_prefix="cctlab") as pool:
            futures = [pool.submit(self._run_one, job) for job in jobs]
            return [f.result() for f in futures]


def get_task_manager() -> TaskManager:
    """Lấy singleton TaskManager instance"""
    return TaskManager()
