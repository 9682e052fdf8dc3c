"""
Utility functions cho CCT Lab
"""
import hashlib
import json
import os
import tempfile
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Union


def ensure_dir(path: Union[str, Path]) -> Path:
    """Tạo thư mục nếu chưa tồn tại, trả về Path object"""
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def timestamp(fmt: str = "%Y%m%d_%H%M%S") -> str:
    """Trả về timestamp string hiện tại"""
    return datetime.now().strftime(fmt)


def elapsed_ms(start_time: float) -> int:
    """Tính thời gian đã trôi qua tính bằng milliseconds"""
    return int((time.time() - start_time) * 1000)


def sanitize_filename(name: str) -> str:
    """Loại bỏ các ký tự không hợp lệ trong tên file"""
    invalid_chars = '<>:"/\\|?*'
    for char in invalid_chars:
        name = name.replace(char, '_')
    return name.strip()


def content_hash(payload: Any) -> str:
    """sha256 của canonical JSON (sorted keys, không khoảng trắng)"""
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """
    Ghi file theo kiểu write-then-rename

    Reader không bao giờ thấy file ghi dở: nội dung đi vào file tạm
    cùng thư mục rồi os.replace sang tên đích.
    """
    target = Path(path)
    ensure_dir(target.parent)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return target
