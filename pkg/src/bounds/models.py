"""Decay models of eigenvalue moduli and trace-norm certificates."""
import math
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class PowerLaw(BaseModel):
    """Moduli bounded by C (n+1)^{-alpha}."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["powerlaw"] = "powerlaw"
    C: float = Field(gt=0)
    alpha: float = Field(gt=1)

    def envelope(self, n: int) -> float:
        return self.C * (n + 1) ** (-self.alpha)


class Exponential(BaseModel):
    """Moduli bounded by C e^{-beta n}."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["exponential"] = "exponential"
    C: float = Field(gt=0)
    beta: float = Field(gt=0)

    def envelope(self, n: int) -> float:
        return self.C * math.exp(-self.beta * n)

    @property
    def normalizes_state(self) -> bool:
        # a state dominated by this envelope needs C ≥ 1 − e^{-beta}
        return self.C >= -math.expm1(-self.beta)


class Empirical(BaseModel):
    """Explicit moduli, descending; exact zeros are dropped."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["empirical"] = "empirical"
    moduli: tuple[float, ...]

    @field_validator("moduli")
    @classmethod
    def _descending_nonnegative(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(not math.isfinite(x) or x < 0 for x in v):
            raise ValueError("moduli must be finite and non-negative")
        if any(a < b for a, b in zip(v, v[1:])):
            raise ValueError("moduli must be in descending order")
        return tuple(x for x in v if x != 0.0)


DecayModel = Annotated[Union[PowerLaw, Exponential, Empirical], Field(discriminator="kind")]


class Certificate(BaseModel):
    """Evaluated trace-norm bound 3 N^{(p-1)/p} ‖A0 − A‖_p + 2 tail(N)."""

    p: float
    p_error: float = Field(ge=0)
    N: int = Field(ge=0)
    truncation_term: float = Field(ge=0)
    tail_term: float = Field(ge=0)
    bound: float
    tail_source: Optional[DecayModel] = None

    @model_validator(mode="after")
    def _bound_is_sum(self) -> "Certificate":
        if self.bound != self.truncation_term + self.tail_term:
            raise ValueError("bound must equal truncation_term + tail_term")
        return self
