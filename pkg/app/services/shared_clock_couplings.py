"""
Couplings for the constant-rate TCP and storage models.

Both models jump on a Poisson clock that does not depend on the state, so
the two copies can share the clock. Synchronous couplings also share every
jump; the total-variation couplings share all but the last jump before the
horizon and maximally couple that one.
"""
import logging

from ..core.errors import UsageError
from ..core.rng import RngStream
from ..schemas.models import ModelSpec
from .trajectory import CouplingOutcome, PathBuilder

logger = logging.getLogger(__name__)


def _check(rates: dict, x: float, y: float, horizon: float) -> None:
    for name, value in rates.items():
        if value is None or value <= 0:
            raise UsageError(f"{name} must be positive, got {value}")
    if x < 0 or y < 0:
        raise UsageError(f"states must be nonnegative, got ({x}, {y})")
    if horizon <= 0:
        raise UsageError(f"horizon must be positive, got {horizon}")


def _outcome(bx: PathBuilder, by: PathBuilder, horizon: float, coalescence_time=None, **extras) -> CouplingOutcome:
    return CouplingOutcome(
        bx.build(horizon),
        by.build(horizon),
        coalesced=coalescence_time is not None,
        coalescence_time=coalescence_time,
        extras=extras,
    )


def synchronous_coupling_constant(lam: float, x: float, y: float, horizon: float, rng: RngStream) -> CouplingOutcome:
    """Shared Poisson(lam) clock: |X_t - Y_t| = |x - y| 2^(-N_t)."""
    _check({"lambda": lam}, x, y, horizon)
    model = ModelSpec.tcp_constant(lam)
    bx, by = PathBuilder(model, x), PathBuilder(model, y)
    t = 0.0
    while True:
        t += rng.exponential() / lam
        if t > horizon:
            break
        bx.jump(t)
        by.jump(t)
    return _outcome(bx, by, horizon, 0.0 if x == y else None)


def tv_coupling_constant_rate(lam: float, x: float, y: float, t: float, rng: RngStream) -> CouplingOutcome:
    _check({"lambda": lam}, x, y, t)
    model = ModelSpec.tcp_constant(lam)
    bx, by = PathBuilder(model, x), PathBuilder(model, y)
    n = rng.poisson(lam * t)
    times = rng.sorted_uniforms(n, 0.0, t)
    if x == y:
        for s in times:
            by.jump(s, bx.jump(s))
        return _outcome(bx, by, t, 0.0, jumps=n)
    if n == 0:
        return _outcome(bx, by, t, None, jumps=0)

    for s in times[:-1]:
        bx.jump(s)
        by.jump(s)
    # given the first n-1 jumps, the last one is uniform on (penultimate, t)
    penultimate = times[-2] if n >= 2 else 0.0
    gap = bx.state_at(penultimate) - by.state_at(penultimate)
    length = t - penultimate
    overlap = max(length - abs(gap), 0.0)

    matched = rng.uniform() * length <= overlap and overlap > 0
    if matched:
        # X and Y land on the same point iff u_x - u_y equals the gap
        ux = rng.uniform_between(penultimate + max(gap, 0.0), t + min(gap, 0.0))
        uy = ux - gap
    elif overlap == 0.0:
        ux = rng.uniform_between(penultimate, t)
        uy = rng.uniform_between(penultimate, t)
    elif gap > 0:
        ux = rng.uniform_between(penultimate, penultimate + gap)
        uy = rng.uniform_between(t - gap, t)
    else:
        ux = rng.uniform_between(t + gap, t)
        uy = rng.uniform_between(penultimate, penultimate - gap)

    bx.jump(ux)
    by.jump(uy)
    if matched and ux != uy:
        # the earlier jumper takes over the later one's landing point
        later, earlier = (bx, by) if ux > uy else (by, bx)
        earlier.rejoin(max(ux, uy), later.last_value)
    return _outcome(bx, by, t, max(ux, uy) if matched else None, jumps=n, gap=gap)


def synchronous_coupling_storage(alpha: float, beta: float, x: float, y: float, horizon: float,
                                 rng: RngStream) -> CouplingOutcome:
    """Shared clock and marks: X_t - Y_t = (x - y) exp(-beta t)."""
    _check({"alpha": alpha, "beta": beta}, x, y, horizon)
    model = ModelSpec.storage(alpha, beta)
    bx, by = PathBuilder(model, x), PathBuilder(model, y)
    n = rng.poisson(alpha * horizon)
    for s in rng.sorted_uniforms(n, 0.0, horizon):
        mark = rng.exponential()
        bx.jump(s, bx.state_at(s) + mark)
        by.jump(s, by.state_at(s) + mark)
    return _outcome(bx, by, horizon, 0.0 if x == y else None, jumps=n)


def tv_coupling_storage(alpha: float, beta: float, x: float, y: float, t: float, rng: RngStream) -> CouplingOutcome:
    """Shared clock and marks except the last mark before t, which is maximally coupled.

    With a = b + d the two pre-jump values, the smaller path draws E ~ Exp(1).
    If E >= d the larger path takes E - d and both land on b + E, which
    happens with probability exp(-d); otherwise the larger path takes a
    fresh Exp(1), which is exactly its residual law.
    """
    _check({"alpha": alpha, "beta": beta}, x, y, t)
    model = ModelSpec.storage(alpha, beta)
    bx, by = PathBuilder(model, x), PathBuilder(model, y)
    n = rng.poisson(alpha * t)
    times = rng.sorted_uniforms(n, 0.0, t)
    if x == y:
        for s in times:
            by.jump(s, bx.jump(s, bx.state_at(s) + rng.exponential()))
        return _outcome(bx, by, t, 0.0, jumps=n)
    if n == 0:
        return _outcome(bx, by, t, None, jumps=0)

    for s in times[:-1]:
        mark = rng.exponential()
        bx.jump(s, bx.state_at(s) + mark)
        by.jump(s, by.state_at(s) + mark)

    last = times[-1]
    a, b = bx.state_at(last), by.state_at(last)
    larger, smaller = (bx, by) if a > b else (by, bx)
    high, low = max(a, b), min(a, b)
    delta = high - low
    e_small = rng.exponential()
    if e_small >= delta:
        landing = low + e_small
        smaller.jump(last, landing)
        larger.jump(last, landing)
        return _outcome(bx, by, t, last, jumps=n, gap=delta)
    smaller.jump(last, low + e_small)
    larger.jump(last, high + rng.exponential())
    return _outcome(bx, by, t, None, jumps=n, gap=delta)
