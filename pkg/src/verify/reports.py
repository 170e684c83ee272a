import math
from typing import Literal, Optional, Union

from pydantic import BaseModel, Field, field_serializer, model_validator


class Violation(BaseModel):
    trial: int
    check: str
    digest: str
    lhs: float
    rhs: float
    slack: float
    tolerance: float


class CampaignConfig(BaseModel):
    dims: list[int]
    p_grid: list[float] = Field(default_factory=list)
    seed: int
    tolerance: float
    equality_tolerance: Optional[float] = None

    @field_serializer("p_grid")
    def _serialize_p_grid(self, p_grid: list[float]) -> list[Union[float, str]]:
        # JSON has no infinity literal
        return [p if math.isfinite(p) else "inf" for p in p_grid]


class VerificationReport(BaseModel):
    campaign: str
    trials: int
    checks: int = 0
    violations: list[Violation] = Field(default_factory=list)
    min_slack: float
    config: CampaignConfig
    status: Literal["ok", "violations", "mathematical_violation"] = "ok"
    observations: dict[str, int] = Field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations


class SweepRow(BaseModel):
    swept: float
    N: int
    truncation_term: float
    tail_term: float
    bound: float
    true_error: Optional[float] = None
    p_error: Optional[float] = None


class SweepTable(BaseModel):
    kind: Literal["corollary1", "corollary2"]
    swept_name: Literal["magnitude", "epsilon"]
    p: float
    rows: list[SweepRow]

    @model_validator(mode="after")
    def _strictly_monotone(self) -> "SweepTable":
        values = [row.swept for row in self.rows]
        increasing = all(a < b for a, b in zip(values, values[1:]))
        decreasing = all(a > b for a, b in zip(values, values[1:]))
        if not (increasing or decreasing):
            raise ValueError(f"swept {self.swept_name} must be strictly monotone")
        return self

    @property
    def bounds(self) -> list[float]:
        return [row.bound for row in self.rows]
