import math
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .stats import RateFit


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    BOTH = "both"


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    return str(value)


class ExperimentConfig(BaseModel):
    """Resolved configuration of one experiment run.

    The text form is one `key = value` line per set field. Floats are written
    with repr and lists comma-separated, so `from_text(to_text())` is exact.
    """
    model_config = ConfigDict(extra="forbid", ser_json_inf_nan="strings")

    experiment: str
    x: float = Field(default=2.0, ge=0)
    y: float = Field(default=10.0, ge=0)
    lam: Optional[float] = Field(default=None, gt=0)
    alpha: Optional[float] = Field(default=None, gt=0)
    beta: Optional[float] = Field(default=None, gt=0)
    times: List[float] = Field(default_factory=list, description="Observation time grid")
    t: Optional[float] = Field(default=None, ge=0, description="Single time; inf selects stationary values")
    n: int = Field(default=1, ge=1, description="Moment order")
    p: float = Field(default=0.5, gt=0)
    p_grid: List[float] = Field(default_factory=list)
    t0: float = Field(default=1.0, gt=0)
    rounds: int = Field(default=1, ge=1)
    eps: Optional[float] = Field(default=None, gt=0)
    window_min: Optional[float] = None
    window_max: Optional[float] = None
    replicas: int = Field(default=10_000, ge=2)
    seed: int = Field(default=7, ge=0)
    threads: Optional[int] = Field(default=None, ge=1)
    output: Optional[str] = None
    format: OutputFormat = OutputFormat.BOTH
    plot: bool = False
    check: bool = False

    @field_validator("times", "p_grid", mode="before")
    @classmethod
    def _split_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            return parse_grid(value)
        return value

    @field_validator("t", mode="before")
    @classmethod
    def _parse_time(cls, value: Any) -> Any:
        # float() also accepts "inf", the stationary sentinel
        if isinstance(value, str):
            return float(value)
        return value

    @field_validator("times")
    @classmethod
    def _check_times(cls, value: List[float]) -> List[float]:
        if any(not math.isfinite(v) or v < 0 for v in value):
            raise ValueError("time grid values must be finite and nonnegative")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("time grid must be strictly increasing")
        return value

    def to_text(self) -> str:
        lines = []
        for name in type(self).model_fields:
            value = getattr(self, name)
            if value is None:
                continue
            lines.append(f"{name} = {_format_value(value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse_text(cls, text: str) -> Dict[str, str]:
        """Raw key/value pairs of a config file, without validation."""
        values: Dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
        return values

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        return cls(**cls.parse_text(text))


class SeriesRow(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")

    t: float
    estimate: float
    stderr: float
    bound: Optional[float] = None
    lower_bound: Optional[float] = None


class AcceptanceCheck(BaseModel):
    name: str
    passed: bool
    observed: float
    threshold: float
    detail: str = ""


class ExperimentResult(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")

    experiment: str
    version: str
    config: ExperimentConfig
    series: Dict[str, List[SeriesRow]] = {}
    tables: Dict[str, List[Dict[str, float]]] = {}
    scalars: Dict[str, float] = {}
    rates: Dict[str, RateFit] = {}
    checks: List[AcceptanceCheck] = []

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[str]:
        return [f"{c.name}: observed {c.observed!r} vs threshold {c.threshold!r}" for c in self.checks if not c.passed]


def grid(start: float, stop: float, step: float) -> List[float]:
    """Inclusive arithmetic grid, rounded to kill accumulated float drift."""
    if step <= 0 or stop < start:
        raise ValueError(f"bad grid {start}:{stop}:{step}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def parse_grid(text: str) -> List[float]:
    """`start:stop:step` or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:stop:step, got {text!r}")
        return grid(*(float(p) for p in parts))
    return [float(v) for v in text.split(",") if v.strip()]
