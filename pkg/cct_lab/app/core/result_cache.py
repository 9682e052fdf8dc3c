"""
Result Cache - Lưu report theo content hash
Mục tiêu: chạy lại cùng input + params -> trả về y hệt report cũ, không tính lại
"""
import json
from pathlib import Path
from typing import Any, Dict, Optional

from .logbus import get_log_bus
from .utils import atomic_write_text, content_hash, ensure_dir


class ResultCache:
    """
    Cache dạng <dir>/<key[:2]>/<key>.json

    Args:
        root: Thư mục cache (đã resolve theo settings/env/CLI)
        enabled: False = --no-cache, mọi lookup đều miss và không ghi
    """

    def __init__(self, root: Path, enabled: bool = True):
        self.root = Path(root)
        self.enabled = enabled

    @staticmethod
    def make_key(command: str, inputs: Any, params: Dict[str, Any], version: str) -> str:
        return content_hash({
            "command": command,
            "inputs": inputs,
            "params": params,
            "version": version,
        })

    def path_for(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def load(self, key: str) -> Optional[str]:
        """Trả về text JSON đã cache hoặc None"""
        if not self.enabled:
            return None
        path = self.path_for(key)
        if not path.exists():
            return None
        try:
            text = path.read_text(encoding="utf-8")
            json.loads(text)
        except (OSError, json.JSONDecodeError):
            get_log_bus().warning(f"[CACHE] Bỏ qua entry hỏng: {path.name}")
            return None
        get_log_bus().debug(f"[CACHE] hit {key[:12]}")
        return text

    def store(self, key: str, text: str) -> Optional[Path]:
        if not self.enabled:
            return None
        ensure_dir(self.root)
        path = atomic_write_text(self.path_for(key), text)
        get_log_bus().debug(f"[CACHE] stored {key[:12]}")
        return path
