"""
Settings Store - Load/save settings từ <APPDATA>/cctlab/settings.json
Thứ tự ưu tiên: CLI flag > env CCTLAB_CACHE_DIR > settings.json > defaults
"""
import json
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional

from .logbus import get_log_bus
from .utils import atomic_write_text

CACHE_ENV = "CCTLAB_CACHE_DIR"


def get_appdata_dir() -> Path:
    """<APPDATA>/cctlab, fallback về home trên Linux/macOS"""
    return Path(os.environ.get('APPDATA', os.path.expanduser('~'))) / 'cctlab'


@dataclass
class Settings:
    language: str = "vi"  # vi | en
    log_level: str = "INFO"
    cache_dir: str = ""  # rỗng = <APPDATA>/cctlab/cache
    max_degree: int = 3
    size_cap: int = 20000  # số tọa độ tối đa của một cochain space
    modulus: int = 0  # 0 = QQ, p = GF(p)
    workers: int = 4
    seed: int = 1

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Settings':
        """
        Key lạ bị bỏ qua; value sai kiểu giữ default và ghi warning
        """
        kept = {}
        for f in fields(cls):
            if f.name not in data:
                continue
            value = data[f.name]
            if type(value) is not type(f.default):
                get_log_bus().warning(f"[SETTINGS] ignoring {f.name}={value!r}: expected {type(f.default).__name__}")
                continue
            kept[f.name] = value
        return cls(**kept)


class SettingsStore:
    """Singleton store cho settings"""
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
        self._path = get_appdata_dir() / 'settings.json'
        self._settings = Settings()
        self.load()

    @property
    def settings(self) -> Settings:
        return self._settings

    def load(self) -> Settings:
        if not self._path.exists():
            return self._settings
        try:
            data = json.loads(self._path.read_text(encoding='utf-8'))
            if not isinstance(data, dict):
                raise ValueError("top level is not an object")
            self._settings = Settings.from_dict(data)
        except (OSError, ValueError) as e:
            get_log_bus().warning(f"[SETTINGS] {self._path} unreadable, using defaults: {e}")
            self._settings = Settings()
        return self._settings

    def save(self) -> bool:
        try:
            atomic_write_text(self._path, json.dumps(asdict(self._settings), indent=2, ensure_ascii=False))
            return True
        except OSError as e:
            get_log_bus().error(f"[SETTINGS] cannot save {self._path}: {e}")
            return False

    def get(self, key: str, default: Any = None) -> Any:
        return getattr(self._settings, key, default)

    def set(self, key: str, value: Any) -> bool:
        """Set và auto-save; False nếu key không tồn tại"""
        if not hasattr(self._settings, key):
            return False
        setattr(self._settings, key, value)
        return self.save()

    def cache_dir(self, override: Optional[str] = None) -> Path:
        """
        Resolve thư mục cache

        Args:
            override: giá trị từ --cache-dir (ưu tiên cao nhất)
        """
        if override:
            return Path(override)
        env = os.environ.get(CACHE_ENV)
        if env:
            return Path(env)
        if self._settings.cache_dir:
            return Path(self._settings.cache_dir)
        return get_appdata_dir() / 'cache'

    def log_dir(self, override: Optional[str] = None) -> Path:
        return self.cache_dir(override) / 'logs'


def get_settings_store() -> SettingsStore:
    return SettingsStore()
