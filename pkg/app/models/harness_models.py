"""
Verdict and report models shared by every certified check
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class Verdict(str, Enum):
    """Three-valued outcome of a certified inequality"""
    PASS = "pass"
    FAIL = "fail"
    UNKNOWN = "unknown"

    @classmethod
    def from_certainty(cls, value: Optional[bool]) -> "Verdict":
        """Map True/False/None (undecided) to a verdict"""
        if value is None:
            return cls.UNKNOWN
        return cls.PASS if value else cls.FAIL

    @classmethod
    def combine(cls, verdicts) -> "Verdict":
        """fail dominates unknown, unknown dominates pass"""
        verdicts = list(verdicts)
        if cls.FAIL in verdicts:
            return cls.FAIL
        if cls.UNKNOWN in verdicts:
            return cls.UNKNOWN
        return cls.PASS


class IntervalModel(BaseModel):
    """Decimal-string rendering of a certified enclosure"""

    lo: str = Field(..., description="Lower endpoint, rounded down")
    hi: str = Field(..., description="Upper endpoint, rounded up")
    precision_bits: int = Field(..., description="Binary precision of the endpoints", ge=1)

    @classmethod
    def of(cls, interval) -> "IntervalModel":
        return cls(**interval.to_dict())

    class Config:
        schema_extra = {
            "example": {
                "lo": "1.26185950714291487419905422868552171",
                "hi": "1.26185950714291487419905422868552172",
                "precision_bits": 128
            }
        }


class CheckResult(BaseModel):
    """One certified inequality with its verdict"""

    name: str = Field(..., description="Check identifier")
    verdict: Verdict = Field(..., description="pass, fail or unknown")
    hard: bool = Field(True, description="Whether the verdict gates the exit status")
    conditional: bool = Field(False, description="Verdict relies on a stated, unverified premise")
    details: Dict[str, Any] = Field(default_factory=dict, description="Operands and measured values")


class HarnessReport(BaseModel):
    """Report of one harness run"""

    harness: str = Field(..., description="Harness name")
    checks: List[CheckResult] = Field(default_factory=list, description="Certified checks")
    measurements: Dict[str, Any] = Field(default_factory=dict, description="Measured, non-gating values")

    @property
    def verdict(self) -> Verdict:
        return Verdict.combine(c.verdict for c in self.checks if c.hard)

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    def add(self, name: str, verdict: Verdict, hard: bool = True, conditional: bool = False,
            **details) -> CheckResult:
        check = CheckResult(name=name, verdict=verdict, hard=hard, conditional=conditional, details=details)
        self.checks.append(check)
        return check

    def summary(self) -> Dict[str, Any]:
        return {
            "harness": self.harness,
            "verdict": self.verdict.value,
            "checks": [c.model_dump(mode="json") for c in self.checks],
            "measurements": self.measurements,
        }

    class Config:
        schema_extra = {
            "example": {
                "harness": "tree_vector_bound",
                "checks": [{"name": "norm_at_most_2[length=1]", "verdict": "pass", "hard": True,
                            "conditional": False, "details": {}}],
                "measurements": {}
            }
        }
