"""
Couplings of two variable-rate TCP paths.

- Wasserstein coupling: the lower path never jumps alone; the gap is
  constant between events and halves at simultaneous jumps.
- Coalescence attempt: first jump times are maximally coupled so that the
  upper path jumps exactly `x - y` after the lower one; if the lower path
  then waits at least that long, both paths sit at the same point.
- Hybrid: Wasserstein phases of length t1 alternating with attempts.
"""
import logging
from typing import Tuple

from ..core.errors import UsageError
from ..core.rng import RngStream
from ..schemas.models import ModelSpec
from .maximal_coupling import maximal_coupling_1d, overlap_integral, shifted_density
from .processes import advance_tcp, sample_tcp_jump_time, tcp_jump_density
from .trajectory import CouplingOutcome, PathBuilder

logger = logging.getLogger(__name__)

TCP = ModelSpec.tcp_variable()


def _check_states(x: float, y: float) -> None:
    if x < 0 or y < 0:
        raise UsageError(f"states must be nonnegative, got ({x}, {y})")


def advance_wasserstein(bx: PathBuilder, by: PathBuilder, start: float, end: float, rng: RngStream) -> None:
    """Run the Wasserstein coupling from `start` to `end` (overshooting draw discarded)."""
    t = start
    while True:
        upper = max(bx.state_at(t), by.state_at(t))
        waiting = sample_tcp_jump_time(upper, rng)
        if t + waiting > end:
            return
        t += waiting
        px, py = bx.state_at(t), by.state_at(t)
        lo, hi = (px, py) if px <= py else (py, px)
        # simultaneous with probability lo/hi, else only the larger one halves
        if lo == hi or rng.uniform() * hi < lo:
            bx.jump(t)
            by.jump(t)
        elif px > py:
            bx.jump(t)
        else:
            by.jump(t)


def advance_merged(ref: PathBuilder, other: PathBuilder, start: float, end: float, rng: RngStream) -> None:
    """Drive two merged paths with one set of draws; `ref` supplies the state."""
    t = start
    while True:
        waiting = sample_tcp_jump_time(ref.state_at(t), rng)
        if t + waiting > end:
            return
        t += waiting
        other.jump(t, ref.jump(t))


def attempt_once(bx: PathBuilder, by: PathBuilder, start: float,
                 rng: RngStream) -> Tuple[bool, float, PathBuilder, PathBuilder]:
    """One coalescence attempt from the states at `start`.

    Always resolves completely, whatever horizon the caller has in mind.
    Returns (success, resolution time, reference path, other path); on
    success the two paths are identical from the resolution time on.
    """
    px, py = bx.state_at(start), by.state_at(start)
    if px == py:
        return True, start, bx, by
    upper, lower = (bx, by) if px > py else (by, bx)
    x, y = max(px, py), min(px, py)
    delta = x - y

    d_upper = tcp_jump_density(x)
    d_lower = shifted_density(tcp_jump_density(y), delta)
    overlap = overlap_integral(d_upper, d_lower)
    s1, s2, matched = maximal_coupling_1d(d_upper, d_lower, rng, overlap=overlap)
    tx = start + s1
    ty = start + s2 - delta

    if matched:
        lower.jump(ty)
        second = sample_tcp_jump_time(lower.state_at(ty), rng)
        if second > delta:
            lower.rejoin(tx, upper.jump(tx))
            return True, tx, upper, lower
        lower.jump(ty + second)
        advance_tcp(lower, ty + second, tx, rng)
        upper.jump(tx)
        return False, tx, upper, lower

    # unmatched: whoever jumps first runs on its own until the other jumps
    if tx <= ty:
        upper.jump(tx)
        advance_tcp(upper, tx, ty, rng)
        lower.jump(ty)
    else:
        lower.jump(ty)
        advance_tcp(lower, ty, tx, rng)
        upper.jump(tx)
    return False, max(tx, ty), upper, lower


def _merged_outcome(x: float, horizon: float, rng: RngStream) -> CouplingOutcome:
    bx, by = PathBuilder(TCP, x), PathBuilder(TCP, x)
    advance_merged(bx, by, 0.0, horizon, rng)
    return CouplingOutcome(bx.build(horizon), by.build(horizon), coalesced=True, coalescence_time=0.0)


def simulate_wasserstein_coupling(x: float, y: float, horizon: float, rng: RngStream) -> CouplingOutcome:
    _check_states(x, y)
    if horizon <= 0:
        raise UsageError(f"horizon must be positive, got {horizon}")
    bx, by = PathBuilder(TCP, x), PathBuilder(TCP, y)
    advance_wasserstein(bx, by, 0.0, horizon, rng)
    same = x == y
    return CouplingOutcome(
        bx.build(horizon), by.build(horizon), coalesced=same, coalescence_time=0.0 if same else None
    )


def attempt_coalescence_tcp(x: float, y: float, t: float, rng: RngStream) -> CouplingOutcome:
    """Single coalescence attempt observed on [0, t].

    After a failed attempt the pair follows the Wasserstein coupling.
    """
    _check_states(x, y)
    if x == y:
        if t <= 0:
            raise UsageError(f"window must be positive, got {t}")
        return _merged_outcome(x, t, rng)
    if t < abs(x - y):
        raise UsageError(f"window t={t} shorter than the gap {abs(x - y)}")

    bx, by = PathBuilder(TCP, x), PathBuilder(TCP, y)
    success, resolved, ref, other = attempt_once(bx, by, 0.0, rng)
    if success:
        advance_merged(ref, other, resolved, t, rng)
    else:
        advance_wasserstein(bx, by, resolved, t, rng)
    coalesced = success and resolved <= t
    return CouplingOutcome(
        bx.build(t),
        by.build(t),
        coalesced=coalesced,
        coalescence_time=resolved if coalesced else None,
        extras={"attempts": 1, "resolved_at": resolved},
    )


def hybrid_tv_coupling(x: float, y: float, t1: float, t2: float, rounds: int, rng: RngStream) -> CouplingOutcome:
    """Wasserstein coupling for t1, then a coalescence attempt, up to `rounds` times.

    The horizon is rounds * (t1 + t2). Each later round waits t1 after the
    previous attempt resolved. Round one consumes the same draws whatever
    `rounds` is, so extra rounds can only turn failures into successes.
    """
    _check_states(x, y)
    if t1 <= 0 or t2 <= 0:
        raise UsageError(f"t1 and t2 must be positive, got t1={t1}, t2={t2}")
    if rounds < 1:
        raise UsageError(f"rounds must be a positive integer, got {rounds}")
    horizon = rounds * (t1 + t2)
    if x == y:
        return _merged_outcome(x, horizon, rng)

    bx, by = PathBuilder(TCP, x), PathBuilder(TCP, y)
    start = 0.0
    attempts = 0
    for _ in range(rounds):
        attempt_at = start + t1
        if attempt_at > horizon:
            break
        advance_wasserstein(bx, by, start, attempt_at, rng)
        success, resolved, ref, other = attempt_once(bx, by, attempt_at, rng)
        attempts += 1
        if success:
            advance_merged(ref, other, resolved, horizon, rng)
            coalesced = resolved <= horizon
            return CouplingOutcome(
                bx.build(horizon),
                by.build(horizon),
                coalesced=coalesced,
                coalescence_time=resolved if coalesced else None,
                extras={"attempts": attempts},
            )
        start = resolved

    advance_wasserstein(bx, by, start, horizon, rng)
    return CouplingOutcome(
        bx.build(horizon), by.build(horizon), coalesced=False, extras={"attempts": attempts}
    )
