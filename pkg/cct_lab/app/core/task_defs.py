"""
Task Definitions - CheckReport, HTable và exit codes
"""
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional


class CheckOutcome(Enum):
    """Kết quả của một check"""
    PASS = "pass"
    FAIL = "fail"


def canonical_json(payload: Any) -> str:
    """JSON ổn định từng byte (sorted keys, LF cuối)"""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass
class CheckReport:
    """
    Kết quả của một check (validate / subdivide / hh / check suite)

    Attributes:
        name: Tên check
        instance_id: Content hash của input
        params: Tham số đã dùng (seed, max_degree, modulus, ...)
        outcome: PASS/FAIL
        witness: Dữ liệu chứng minh (dims, ranks, failing invariant, ...)
        controls: Negative controls -> True nếu lỗi cài sẵn đã bị phát hiện
        message: Một dòng tóm tắt
        elapsed_ms: Wall time (không ghi vào JSON)
    """
    name: str
    instance_id: str = ""
    params: Dict[str, Any] = field(default_factory=dict)
    outcome: CheckOutcome = CheckOutcome.PASS
    witness: Dict[str, Any] = field(default_factory=dict)
    controls: Dict[str, bool] = field(default_factory=dict)
    message: str = ""
    elapsed_ms: int = 0

    @property
    def ok(self) -> bool:
        return self.outcome is CheckOutcome.PASS

    @classmethod
    def passed(cls, name: str, message: str = "", **kwargs) -> 'CheckReport':
        return cls(name=name, outcome=CheckOutcome.PASS, message=message, **kwargs)

    @classmethod
    def failed(cls, name: str, message: str, **kwargs) -> 'CheckReport':
        return cls(name=name, outcome=CheckOutcome.FAIL, message=message, **kwargs)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "instance_id": self.instance_id,
            "params": self.params,
            "outcome": self.outcome.value,
            "witness": self.witness,
            "controls": self.controls,
            "message": self.message,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'CheckReport':
        return cls(
            name=data["name"],
            instance_id=data.get("instance_id", ""),
            params=data.get("params", {}),
            outcome=CheckOutcome(data.get("outcome", "fail")),
            witness=data.get("witness", {}),
            controls=data.get("controls", {}),
            message=data.get("message", ""),
        )

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


@dataclass
class HTable:
    """Bảng dim HH^n(A!, M!) cho n = 0..max_degree"""
    diagram_id: str
    modulus: Optional[int]
    dims: List[int]
    method: str = "reduced"

    @property
    def max_degree(self) -> int:
        return len(self.dims) - 1

    def to_dict(self) -> dict:
        return {
            "diagram_id": self.diagram_id,
            "modulus": self.modulus,
            "method": self.method,
            "dims": {str(n): d for n, d in enumerate(self.dims)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'HTable':
        dims = data.get("dims", {})
        ordered = [dims[k] for k in sorted(dims, key=int)]
        return cls(data["diagram_id"], data.get("modulus"), ordered, data.get("method", "reduced"))


# Exit codes
class ExitCode:
    """Exit codes của cctlab"""
    SUCCESS = 0
    CHECK_FAILED = 1
    USAGE = 2
