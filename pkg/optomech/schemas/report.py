from typing import Dict, List

from pydantic import BaseModel, Field, model_validator


class DeviationReport(BaseModel):
    label: str = Field(..., description="Identity or experiment name")
    max_abs_deviation: float = Field(..., ge=0)
    tolerance: float = Field(..., gt=0)
    buffer: int = Field(default=0, ge=0, description="Mechanical levels excluded at the edge")
    buffer_cav: int = Field(default=0, ge=0, description="Cavity levels excluded at the edge")
    passed: bool
    informational: bool = Field(default=False, description="Recorded, not part of the pass flag")
    candidates: Dict[str, float] = Field(default_factory=dict, description="Deviation of every arbitrated form")
    notes: str = ""

    @model_validator(mode="after")
    def passed_matches_deviation(self):
        if self.passed != (self.max_abs_deviation < self.tolerance):
            raise ValueError("passed must equal max_abs_deviation < tolerance")
        return self

    @classmethod
    def measure(cls, label: str, deviation: float, tolerance: float, **kwargs) -> "DeviationReport":
        deviation = float(deviation)
        return cls(
            label=label,
            max_abs_deviation=deviation,
            tolerance=tolerance,
            passed=deviation < tolerance,
            **kwargs,
        )


class SuiteReport(BaseModel):
    suite: str
    checks: List[DeviationReport]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def to_json_dict(self) -> dict:
        return {
            "suite": self.suite,
            "checks": [c.model_dump() for c in self.checks],
            "passed": self.passed,
        }
