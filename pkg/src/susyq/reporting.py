"""Check records shared by the verification suites.

Every structural identity the package verifies is reported as a named check
with its measured residual and the tolerance it was held to, so reports can
be serialized, diffed, and gated on without re-running anything.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

__all__ = ["CheckResult", "all_pass", "report_to_json", "worst"]


@dataclass(frozen=True)
class CheckResult:
    check: str
    residual: float
    tolerance: float
    passed: bool

    @staticmethod
    def from_residual(check: str, residual: float, tolerance: float) -> "CheckResult":
        residual = float(residual)
        ok = math.isfinite(residual) and residual < tolerance
        return CheckResult(check, residual, float(tolerance), ok)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def all_pass(report) -> bool:
    return all(r.passed for r in report)


def worst(report):
    """The check with the largest residual/tolerance ratio, or None."""
    if not report:
        return None
    return max(report, key=lambda r: r.residual / r.tolerance if r.tolerance else 0.0)


def report_to_json(report, **metadata) -> str:
    doc = dict(metadata)
    doc["checks"] = [r.to_dict() for r in report]
    doc["all_pass"] = all_pass(report)
    return json.dumps(doc, indent=2, sort_keys=True)
