"""
Exact event-driven samplers for the three PDMP models.

No time stepping is involved: every jump time is drawn from its exact law
(inverse transform for tcp-variable, exponential clocks for tcp-constant,
Poisson count then uniform order statistics for storage).
"""
import math

from ..core.errors import UsageError
from ..core.rng import RngStream
from ..schemas.models import ModelKind, ModelSpec
from .maximal_coupling import DensitySpec
from .trajectory import PathBuilder, Trajectory, flow

__all__ = [
    "flow",
    "tcp_survival",
    "tcp_jump_time",
    "sample_tcp_jump_time",
    "tcp_jump_density",
    "simulate_path",
    "advance_tcp",
    "evaluate",
]


def tcp_survival(x: float, t: float) -> float:
    """P_x(T_1 > t) = exp(-t^2/2 - x t)."""
    if x < 0 or t < 0:
        raise UsageError(f"tcp_survival needs x, t >= 0, got x={x}, t={t}")
    return math.exp(-t * t / 2 - x * t)


def tcp_jump_time(x: float, e: float) -> float:
    """sqrt(x^2 + 2e) - x, written without cancellation for large x."""
    if e == 0:
        return 0.0
    return 2 * e / (math.sqrt(x * x + 2 * e) + x)


def sample_tcp_jump_time(x: float, rng: RngStream) -> float:
    if x < 0:
        raise UsageError(f"state must be nonnegative, got {x}")
    return tcp_jump_time(x, rng.exponential())


def tcp_jump_density(x: float) -> DensitySpec:
    """Density (x+s) exp(-s^2/2 - x s) of the first jump time from x."""
    return DensitySpec(
        evaluator=lambda s: (x + s) * math.exp(-s * s / 2 - x * s),
        support_left=0.0,
        sampler=lambda rng: sample_tcp_jump_time(x, rng),
        name=f"f_{x!r}",
    )


def advance_tcp(builder: PathBuilder, start: float, end: float, rng: RngStream) -> None:
    """Run tcp-variable dynamics on builder from `start` up to `end`.

    The clock restarts at `start`; a draw overshooting `end` is discarded.
    """
    t = start
    while True:
        waiting = sample_tcp_jump_time(builder.state_at(t), rng)
        if t + waiting > end:
            return
        t += waiting
        builder.jump(t)


def _advance_constant(builder: PathBuilder, lam: float, horizon: float, rng: RngStream) -> None:
    t = 0.0
    while True:
        t += rng.exponential() / lam
        if t > horizon:
            return
        builder.jump(t)


def _advance_storage(builder: PathBuilder, alpha: float, horizon: float, rng: RngStream) -> None:
    count = rng.poisson(alpha * horizon)
    times = rng.sorted_uniforms(count, 0.0, horizon)
    for t in times:
        builder.jump(t, builder.state_at(t) + rng.exponential())


def simulate_path(model: ModelSpec, x0: float, horizon: float, rng: RngStream) -> Trajectory:
    if horizon <= 0:
        raise UsageError(f"horizon must be positive, got {horizon}")
    if x0 < 0:
        raise UsageError(f"initial state must be nonnegative, got {x0}")
    builder = PathBuilder(model, x0)
    if model.kind is ModelKind.TCP_VARIABLE:
        advance_tcp(builder, 0.0, horizon, rng)
    elif model.kind is ModelKind.TCP_CONSTANT:
        _advance_constant(builder, model.lam, horizon, rng)
    else:
        _advance_storage(builder, model.alpha, horizon, rng)
    return builder.build(horizon)


def evaluate(trajectory: Trajectory, t: float) -> float:
    return trajectory.evaluate(t)
