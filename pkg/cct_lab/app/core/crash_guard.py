"""
Crash Guard - Global Exception Handler
Lỗi không bắt được (kể cả trong worker thread của check suites) được ghi ra
CRASH_<timestamp>.log trong log dir kèm version và command line
"""
import sys
import threading
import traceback
from pathlib import Path
from typing import Optional

from .utils import ensure_dir, timestamp

_log_dir: Optional[Path] = None


def setup_global_exception_hooks(log_dir: Path):
    """Install global exception hooks for sys and threading"""
    global _log_dir
    _log_dir = ensure_dir(log_dir)

    def handle_exception(exc_type, exc_value, exc_traceback):
        if issubclass(exc_type, KeyboardInterrupt):
            sys.__excepthook__(exc_type, exc_value, exc_traceback)
            return
        log_crash(exc_type, exc_value, exc_traceback, thread_name="MainThread")

    def handle_thread_exception(args):
        name = args.thread.name if args.thread is not None else "Unknown"
        log_crash(args.exc_type, args.exc_value, args.exc_traceback, thread_name=name)

    sys.excepthook = handle_exception
    threading.excepthook = handle_thread_exception


def crash_report(exc_type, exc_value, tb, thread_name: str) -> str:
    from app import __version__

    sep = "-" * 40
    return "\n".join([
        f"cctlab {__version__} crash report",
        f"Time: {timestamp('%Y-%m-%d %H:%M:%S')}",
        f"Thread: {thread_name}",
        f"Argv: {' '.join(sys.argv)}",
        sep,
        "".join(traceback.format_exception(exc_type, exc_value, tb)).rstrip(),
        sep,
        "",
    ])


def log_crash(exc_type, exc_value, tb, thread_name="Unknown") -> Optional[Path]:
    filename = (_log_dir or Path.cwd()) / f"CRASH_{timestamp()}.log"
    try:
        filename.write_text(crash_report(exc_type, exc_value, tb, thread_name), encoding="utf-8")
        print(f"[CRASH] Log saved to: {filename}", file=sys.stderr)
        return filename
    except OSError as e:
        print(f"[CRASH] Failed to write crash log: {e}", file=sys.stderr)
        traceback.print_exception(exc_type, exc_value, tb)
        return None
