"""
Jump-time skeletons of PDMP paths.

A path is stored as its start value plus the ordered jump times and
post-jump values; states in between are rebuilt from the deterministic flow.
"""
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Optional, Tuple

from ..core.errors import UsageError
from ..schemas.models import ModelKind, ModelSpec


def flow(model: ModelSpec, x: float, s: float) -> float:
    """Deterministic motion for a duration s >= 0."""
    if s < 0:
        raise UsageError(f"flow duration must be nonnegative, got {s}")
    if model.kind is ModelKind.STORAGE:
        return x * math.exp(-model.beta * s)
    return x + s


@dataclass(frozen=True)
class Trajectory:
    model: ModelSpec
    x0: float
    horizon: float
    jump_times: Tuple[float, ...] = ()
    post_jump_values: Tuple[float, ...] = ()
    # (time, value) where the path took over a partner's state without jumping
    rejoin: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.horizon <= 0:
            raise UsageError(f"horizon must be positive, got {self.horizon}")
        if self.x0 < 0:
            raise UsageError(f"initial state must be nonnegative, got {self.x0}")
        if len(self.jump_times) != len(self.post_jump_values):
            raise UsageError("jump_times and post_jump_values differ in length")
        if self.rejoin is not None and not (0 <= self.rejoin[0] <= self.horizon and self.rejoin[1] >= 0):
            raise UsageError(f"rejoin point {self.rejoin} outside the path")

    @property
    def n_jumps(self) -> int:
        return len(self.jump_times)

    def _anchor(self, k: int, t: float) -> Tuple[float, float]:
        """Point the flow restarts from, given k jumps at or before t."""
        anchor = (self.jump_times[k - 1], self.post_jump_values[k - 1]) if k else (0.0, self.x0)
        if self.rejoin is not None and anchor[0] < self.rejoin[0] <= t:
            return self.rejoin
        return anchor

    def pre_jump_value(self, k: int) -> float:
        """Left limit at the k-th jump."""
        tk = self.jump_times[k]
        start, value = self._anchor(k, tk)
        return flow(self.model, value, tk - start)

    def evaluate(self, t: float) -> float:
        if not 0 <= t <= self.horizon:
            raise UsageError(f"t={t} outside [0, {self.horizon}]")
        # a jump at exactly t counts as already happened
        start, value = self._anchor(bisect_right(self.jump_times, t), t)
        return flow(self.model, value, t - start)

    def validate(self, rel_tol: float = 0.0) -> None:
        """Check ordering, sign and jump-map consistency of the skeleton.

        rel_tol = 0 demands exact halving.
        """
        previous = -math.inf
        for k, (tk, value) in enumerate(zip(self.jump_times, self.post_jump_values)):
            if not (max(previous, 0.0) <= tk <= self.horizon and tk > previous):
                raise UsageError(f"jump {k} at {tk} breaks strict ordering within (0, {self.horizon}]")
            if value < 0:
                raise UsageError(f"negative post-jump value {value} at jump {k}")
            pre = self.pre_jump_value(k)
            if self.model.is_tcp:
                if abs(value - pre / 2) > rel_tol * abs(pre):
                    raise UsageError(f"jump {k}: post value {value} is not half of {pre}")
            elif value <= pre:
                raise UsageError(f"jump {k}: storage increment must be positive ({pre} -> {value})")
            previous = tk


class PathBuilder:
    """Mutable accumulator for one skeleton; the clock only moves forward."""

    def __init__(self, model: ModelSpec, x0: float):
        self.model = model
        self.x0 = x0
        self.times: list[float] = []
        self.values: list[float] = []
        self.rejoined: Optional[Tuple[float, float]] = None

    def _anchor(self) -> Tuple[float, float]:
        anchor = (self.times[-1], self.values[-1]) if self.times else (0.0, self.x0)
        if self.rejoined is not None and self.rejoined[0] > anchor[0]:
            return self.rejoined
        return anchor

    @property
    def last_time(self) -> float:
        return self._anchor()[0]

    @property
    def last_value(self) -> float:
        return self._anchor()[1]

    def state_at(self, t: float) -> float:
        return flow(self.model, self.last_value, t - self.last_time)

    def jump(self, t: float, post: Optional[float] = None) -> float:
        """Record a jump at time t; TCP kinds halve unless post is given."""
        if post is None:
            if not self.model.is_tcp:
                raise UsageError("storage jumps need an explicit post-jump value")
            post = self.state_at(t) / 2
        self.times.append(t)
        self.values.append(post)
        return post

    def rejoin(self, t: float, value: float) -> None:
        """Take over a partner's state at time t without recording a jump."""
        if t < self.last_time:
            raise UsageError(f"cannot rejoin at {t} before the last event at {self.last_time}")
        self.rejoined = (t, value)

    def build(self, horizon: float) -> Trajectory:
        cut = bisect_right(self.times, horizon)
        rejoin = self.rejoined if self.rejoined is not None and self.rejoined[0] <= horizon else None
        return Trajectory(
            model=self.model,
            x0=self.x0,
            horizon=horizon,
            jump_times=tuple(self.times[:cut]),
            post_jump_values=tuple(self.values[:cut]),
            rejoin=rejoin,
        )


@dataclass(frozen=True)
class CoupledState:
    x: float
    y: float
    t: float = 0.0

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise UsageError(f"coupled state must be nonnegative, got ({self.x}, {self.y})")

    @property
    def gap(self) -> float:
        return abs(self.x - self.y)

    def ordered(self) -> Tuple[float, float]:
        return (self.x, self.y) if self.x >= self.y else (self.y, self.x)


@dataclass(frozen=True)
class CouplingOutcome:
    traj_x: Trajectory
    traj_y: Trajectory
    coalesced: bool
    coalescence_time: Optional[float] = None
    extras: dict = field(default_factory=dict, compare=False)

    def distance(self, t: float) -> float:
        return abs(self.traj_x.evaluate(t) - self.traj_y.evaluate(t))

    def coalesced_by(self, t: float) -> bool:
        return self.coalesced and self.coalescence_time is not None and self.coalescence_time <= t
