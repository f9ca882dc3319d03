import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Tuple

import numpy as np


def to_jsonable(value: Any) -> Any:
    """Complex as [re, im], non-finite floats as strings, containers recursively"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return to_jsonable(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


@dataclass(frozen=True)
class VerificationReport:
    identity_id: str
    parameters: Dict[str, Any]
    residual: float
    tolerance: float
    tail_estimate: float = 0.0
    message: str = ""
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        # NaN residuals (empty interior blocks, failed builds) never pass
        return bool(self.residual <= self.tolerance)

    def sort_key(self) -> Tuple[str, str]:
        return self.identity_id, json.dumps(to_jsonable(self.parameters), sort_keys=True)

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            'identity_id': self.identity_id,
            'parameters': self.parameters,
            'residual': self.residual,
            'tolerance': self.tolerance,
            'tail_estimate': self.tail_estimate,
            'passed': self.passed,
            'message': self.message,
            'extra': self.extra,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'VerificationReport':
        def number(v):
            return float(v) if not isinstance(v, list) else complex(*v)
        return cls(
            identity_id=data['identity_id'],
            parameters=data.get('parameters', {}),
            residual=number(data['residual']),
            tolerance=number(data['tolerance']),
            tail_estimate=number(data.get('tail_estimate', 0.0)),
            message=data.get('message', ''),
            extra=data.get('extra', {}),
        )


def failed_report(identity_id: str, parameters: Dict[str, Any], tolerance: float,
                  message: str) -> VerificationReport:
    return VerificationReport(identity_id, parameters, float('nan'), tolerance, message=message)


def sort_reports(reports: Iterable[VerificationReport]) -> List[VerificationReport]:
    return sorted(reports, key=VerificationReport.sort_key)


def write_jsonl(reports: Iterable[VerificationReport], path) -> int:
    count = 0
    with open(path, 'w') as f:
        for report in sort_reports(reports):
            f.write(report.to_json() + "\n")
            count += 1
    return count


def read_jsonl(path) -> List[VerificationReport]:
    with open(path, 'r') as f:
        return [VerificationReport.from_dict(json.loads(line)) for line in f if line.strip()]
