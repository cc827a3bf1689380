"""
Replication engine and estimators.

Replica i always runs on RngStream(seed, i) and results are reduced in
stream-id order, so estimates are bit-identical for any worker count.
"""
import logging
import math
from typing import Any, Callable, Iterable, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from opentelemetry import trace
from scipy import stats

from ..core.config import get_settings
from ..core.errors import NumericalFailureError, UsageError
from ..core.rng import RngStream
from ..core.worker_pool import WorkerPool, get_worker_pool
from ..schemas.stats import RateFit, SummaryStats
from .trajectory import CouplingOutcome

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

T = TypeVar("T")
Functional = Callable[[Any], Union[float, Sequence[float]]]


def mc_samples(functional: Functional, generator: Callable[[RngStream], T], n: int, seed: int,
               pool: Optional[WorkerPool] = None) -> np.ndarray:
    """Per-replica functional values as an (n, k) array in stream-id order."""
    if n < 1:
        raise UsageError(f"replica count must be positive, got {n}")
    pool = pool or get_worker_pool()
    with tracer.start_as_current_span("mc_samples") as span:
        span.set_attribute("replicas", n)
        span.set_attribute("seed", seed)
        rows = pool.map_replicas(lambda i: functional(generator(RngStream(seed, i))), n)
    values = np.asarray(rows, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    finite = np.isfinite(values).all(axis=1)
    if not finite.all():
        bad = int(np.argmin(finite))
        raise NumericalFailureError(f"non-finite functional value {values[bad].tolist()}", replica=bad)
    return values


def summarize(values: Iterable[float], multiplier: Optional[float] = None,
              interval: Optional[Tuple[float, float]] = None) -> SummaryStats:
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    multiplier = get_settings().CONFIDENCE_MULTIPLIER if multiplier is None else multiplier
    n = int(arr.size)
    if n < 2:
        raise UsageError(f"need at least two values to summarize, got {n}")
    mean = float(np.mean(arr))
    stderr = float(np.std(arr, ddof=1) / math.sqrt(n))
    return SummaryStats(n=n, mean=mean, stderr=stderr, ci_halfwidth=multiplier * stderr, interval=interval)


def mc_expectation(functional: Functional, generator: Callable[[RngStream], T], n: int, seed: int,
                   pool: Optional[WorkerPool] = None, multiplier: Optional[float] = None) -> list[SummaryStats]:
    """Monte Carlo means of a (possibly vector-valued) functional, one SummaryStats per component."""
    if n < 2:
        raise UsageError(f"need at least 2 replicas, got {n}")
    values = mc_samples(functional, generator, n, seed, pool=pool)
    result = [summarize(values[:, k], multiplier) for k in range(values.shape[1])]
    logger.info(f"Estimated {values.shape[1]} expectation(s) from {n} replicas (seed {seed})")
    return result


def _paired(samples_a: Sequence[float], samples_b: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    a = np.sort(np.asarray(samples_a, dtype=float))
    b = np.sort(np.asarray(samples_b, dtype=float))
    if a.size != b.size:
        raise UsageError(f"empirical distances need equal sample counts, got {a.size} and {b.size}")
    if a.size == 0:
        raise UsageError("empirical distances need at least one sample")
    return a, b


def empirical_w1(samples_a: Sequence[float], samples_b: Sequence[float]) -> float:
    """Exact W1 between two equal-size empirical measures (order statistics)."""
    a, b = _paired(samples_a, samples_b)
    return float(np.mean(np.abs(a - b)))


def empirical_wp(samples_a: Sequence[float], samples_b: Sequence[float], p: float = 1.0) -> float:
    if p < 1:
        raise UsageError(f"p must be >= 1, got {p}")
    if p == 1:
        return empirical_w1(samples_a, samples_b)
    a, b = _paired(samples_a, samples_b)
    return float(np.mean(np.abs(a - b) ** p) ** (1.0 / p))


def confidence_level(multiplier: float) -> float:
    """Two-sided normal coverage of +/- multiplier standard errors."""
    return float(2 * stats.norm.cdf(multiplier) - 1)


def clopper_pearson(k: int, n: int, level: float) -> Tuple[float, float]:
    if n < 1 or not 0 <= k <= n:
        raise UsageError(f"need 0 <= k <= n and n >= 1, got k={k}, n={n}")
    tail = (1 - level) / 2
    lower = 0.0 if k == 0 else float(stats.beta.ppf(tail, k, n - k + 1))
    upper = 1.0 if k == n else float(stats.beta.ppf(1 - tail, k + 1, n - k))
    return lower, upper


def coalescence_fraction(outcomes: Sequence[CouplingOutcome], at: Optional[float] = None,
                         multiplier: Optional[float] = None) -> SummaryStats:
    """Estimate of P(not coalesced by `at`) (default: each outcome's horizon).

    The interval is exact (Clopper-Pearson) at the coverage matching the
    confidence multiplier; its upper end bounds TV for the coupling used.
    """
    if len(outcomes) < 2:
        raise UsageError(f"coalescence_fraction needs at least two outcomes, got {len(outcomes)}")
    multiplier = get_settings().CONFIDENCE_MULTIPLIER if multiplier is None else multiplier
    failed = [
        0.0 if o.coalesced_by(o.traj_x.horizon if at is None else at) else 1.0
        for o in outcomes
    ]
    k = int(sum(failed))
    interval = clopper_pearson(k, len(failed), confidence_level(multiplier))
    return summarize(failed, multiplier, interval=interval)


def fit_exponential_rate(points: Iterable[Tuple[float, float]], window: Tuple[float, float]) -> RateFit:
    """OLS of log(estimate) on t inside the window; slope is minus the decay rate."""
    t_min, t_max = window
    if t_max <= t_min:
        raise UsageError(f"empty fit window {window}")
    inside = [(t, v) for t, v in points if t_min <= t <= t_max]
    kept = [(t, v) for t, v in inside if v > 0 and math.isfinite(v)]
    dropped = len(inside) - len(kept)
    if dropped:
        logger.warning(f"Dropped {dropped} nonpositive estimate(s) from the rate fit on {window}")
    if len(kept) < 3:
        raise NumericalFailureError(f"rate fit on {window} needs 3 positive points, got {len(kept)}")
    ts = np.array([t for t, _ in kept])
    logs = np.log([v for _, v in kept])
    fit = stats.linregress(ts, logs)
    return RateFit(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        slope_stderr=float(fit.stderr),
        window=(float(t_min), float(t_max)),
        n_points=len(kept),
        dropped=dropped,
    )
