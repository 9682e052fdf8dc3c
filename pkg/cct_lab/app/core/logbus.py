"""
Log Bus - Thread-safe logging cho CLI và test runs
Các suite chạy song song đều ghi qua cùng một bus; message theo dạng "[TAG] text"
"""
import re
import sys
import threading
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Callable, List, Optional

_TAG_RE = re.compile(r"^\[([A-Z0-9_-]+)\]\s*")


def safe_print(text: str):
    """Print với handling encoding errors cho Windows console"""
    stream = sys.stderr
    try:
        print(text, file=stream)
    except UnicodeEncodeError:
        enc = stream.encoding or 'utf-8'
        print(text.encode(enc, errors='replace').decode(enc, errors='replace'), file=stream)


class LogLevel(Enum):
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    SUCCESS = "SUCCESS"  # check PASS

    @property
    def rank(self) -> int:
        return _LEVEL_RANK[self]

    @classmethod
    def parse(cls, name: str, default: 'LogLevel' = None) -> 'LogLevel':
        try:
            return cls(name.strip().upper())
        except ValueError:
            return default or cls.INFO


_LEVEL_RANK = {
    LogLevel.DEBUG: 10,
    LogLevel.INFO: 20,
    LogLevel.SUCCESS: 25,
    LogLevel.WARNING: 30,
    LogLevel.ERROR: 40,
}


@dataclass(frozen=True)
class LogEntry:
    level: LogLevel
    message: str
    created: datetime = field(default_factory=datetime.now)

    @property
    def tag(self) -> Optional[str]:
        """"[HH] done" -> "HH"; None nếu message không có tag"""
        m = _TAG_RE.match(self.message)
        return m.group(1) if m else None

    def formatted(self) -> str:
        return f"[{self.created:%H:%M:%S}] [{self.level.value}] {self.message}"

    def __str__(self):
        return self.formatted()


Handler = Callable[[LogEntry], None]


class LogBus:
    """
    Central log bus (singleton)
    Entries dưới threshold bị bỏ qua; handlers nhận mọi entry đã qua filter
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
        self._lock = threading.Lock()
        self._log_file: Optional[Path] = None
        self._threshold = LogLevel.INFO
        self._echo = True
        self._handlers: List[Handler] = []

    # ============ CONFIG ============

    def set_log_file(self, path: Path):
        self._log_file = Path(path)
        self._log_file.parent.mkdir(parents=True, exist_ok=True)

    def set_level(self, level):
        """LogLevel hoặc tên level; tên lạ -> INFO"""
        self._threshold = LogLevel.parse(level) if isinstance(level, str) else level

    def set_echo(self, enabled: bool):
        """Bật/tắt in ra stderr"""
        self._echo = enabled

    def add_handler(self, handler: Handler):
        self._handlers.append(handler)

    def remove_handler(self, handler: Handler):
        if handler in self._handlers:
            self._handlers.remove(handler)

    # ============ EMIT ============

    def log(self, level: LogLevel, message: str):
        if level.rank < self._threshold.rank:
            return
        entry = LogEntry(level, message)
        line = entry.formatted()
        with self._lock:
            for handler in list(self._handlers):
                try:
                    handler(entry)
                except Exception:
                    pass
            if self._log_file:
                try:
                    with open(self._log_file, 'a', encoding='utf-8') as f:
                        f.write(line + '\n')
                except OSError:
                    pass
            if self._echo:
                safe_print(line)

    def debug(self, message: str):
        self.log(LogLevel.DEBUG, message)

    def info(self, message: str):
        self.log(LogLevel.INFO, message)

    def warning(self, message: str):
        self.log(LogLevel.WARNING, message)

    def error(self, message: str):
        self.log(LogLevel.ERROR, message)

    def success(self, message: str):
        self.log(LogLevel.SUCCESS, message)


def get_log_bus() -> LogBus:
    """Lấy singleton LogBus instance"""
    return LogBus()
