from typing import Optional, Tuple

from pydantic import BaseModel, Field


class SummaryStats(BaseModel):
    n: int = Field(..., ge=2)
    mean: float
    stderr: float = Field(..., ge=0)
    ci_halfwidth: float = Field(..., ge=0, description="multiplier * stderr")
    interval: Optional[Tuple[float, float]] = Field(
        default=None, description="Exact binomial interval when the estimate is a proportion"
    )

    @property
    def upper(self) -> float:
        return self.interval[1] if self.interval else self.mean + self.ci_halfwidth

    @property
    def lower(self) -> float:
        return self.interval[0] if self.interval else self.mean - self.ci_halfwidth


class RateFit(BaseModel):
    slope: float
    intercept: float
    slope_stderr: float
    window: Tuple[float, float]
    n_points: int = Field(..., ge=3)
    dropped: int = Field(default=0, ge=0, description="Nonpositive estimates left out of the fit")

    @property
    def rate(self) -> float:
        return -self.slope
