"""
Maximal coupling of two one-dimensional densities.

The overlap mass is computed by adaptive quadrature; the common part and
the two residual parts are then sampled by rejection against the parent
densities, so only exact samplers of d1 and d2 are needed.
"""
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from opentelemetry import trace
from scipy import integrate

from ..core.config import get_settings
from ..core.errors import NumericalFailureError, UsageError
from ..core.rng import RngStream

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

# Semi-infinite integrals are split this far right of the left end.
TAIL_SPLIT = 12.0
QUAD_LIMIT = 500
# Overlaps this close to 1 are quadrature noise around identical laws.
OVERLAP_SNAP = 1e-9


@dataclass(frozen=True)
class DensitySpec:
    evaluator: Callable[[float], float]
    support_left: float
    sampler: Callable[[RngStream], float]
    support_right: float = math.inf
    name: str = "density"

    def pdf(self, s: float) -> float:
        if s < self.support_left or s > self.support_right:
            return 0.0
        return self.evaluator(s)

    def sample(self, rng: RngStream) -> float:
        return self.sampler(rng)

    def validate(self, tol: float = 1e-8) -> "DensitySpec":
        mass = integrate_on(self.pdf, self.support_left, self.support_right, tol=tol * 1e-2)
        if abs(mass - 1.0) > tol:
            raise NumericalFailureError(f"{self.name} integrates to {mass!r}, not 1 within {tol}")
        return self


def shifted_density(d: DensitySpec, delta: float) -> DensitySpec:
    """Law of S + delta for S ~ d."""
    return DensitySpec(
        evaluator=lambda s: d.evaluator(s - delta),
        support_left=d.support_left + delta,
        support_right=d.support_right + delta,
        sampler=lambda rng: d.sampler(rng) + delta,
        name=f"{d.name} shifted by {delta!r}",
    )


def integrate_on(fn: Callable[[float], float], a: float, b: float, tol: Optional[float] = None) -> float:
    """Adaptive Gauss-Kronrod quadrature; any IntegrationWarning is fatal."""
    if b <= a:
        return 0.0
    tol = tol if tol is not None else get_settings().QUADRATURE_TOL
    pieces = [(a, b)]
    if math.isinf(b):
        pieces = [(a, a + TAIL_SPLIT), (a + TAIL_SPLIT, b)]
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for lo, hi in pieces:
            try:
                value, _ = integrate.quad(fn, lo, hi, epsabs=tol, epsrel=1e-10, limit=QUAD_LIMIT)
            except integrate.IntegrationWarning as e:
                raise NumericalFailureError(f"quadrature on [{lo}, {hi}] did not converge: {e}") from e
            total += value
    if not math.isfinite(total):
        raise NumericalFailureError(f"quadrature on [{a}, {b}] returned {total}")
    return total


def overlap_integral(d1: DensitySpec, d2: DensitySpec, lower: Optional[float] = None,
                     upper: Optional[float] = None, tol: Optional[float] = None) -> float:
    """Integral of min(d1, d2) over [lower, upper] (defaults: common support)."""
    a = max(d1.support_left, d2.support_left) if lower is None else lower
    b = min(d1.support_right, d2.support_right) if upper is None else upper
    with tracer.start_as_current_span("overlap_integral") as span:
        span.set_attribute("interval.lower", a)
        span.set_attribute("interval.upper", b)
        value = integrate_on(lambda s: min(d1.pdf(s), d2.pdf(s)), a, b, tol=tol)
    logger.debug(f"Overlap of {d1.name} and {d2.name} on [{a}, {b}]: {value}")
    return min(max(value, 0.0), 1.0)


def _rejection(parent: DensitySpec, accept: Callable[[float], float], rng: RngStream,
               max_tries: int, what: str) -> float:
    """Draw from parent until U * parent(s) <= accept(s)."""
    for _ in range(max_tries):
        s = parent.sample(rng)
        if rng.uniform() * parent.pdf(s) <= accept(s):
            return s
    raise NumericalFailureError(f"rejection sampler for {what} exhausted {max_tries} tries")


def maximal_coupling_1d(d1: DensitySpec, d2: DensitySpec, rng: RngStream,
                        overlap: Optional[float] = None,
                        max_tries: Optional[int] = None) -> Tuple[float, float, bool]:
    """Return (s1, s2, matched) with s1 ~ d1, s2 ~ d2 and P(matched) = overlap.

    `overlap` may be passed in when the caller already computed it.
    """
    max_tries = max_tries or get_settings().MAX_REJECTION_TRIES
    if overlap is None:
        overlap = overlap_integral(d1, d2)
    if not 0.0 <= overlap <= 1.0:
        raise UsageError(f"overlap must lie in [0, 1], got {overlap}")
    if overlap > 1.0 - OVERLAP_SNAP:
        overlap = 1.0

    def common(s: float) -> float:
        return min(d1.pdf(s), d2.pdf(s))

    if rng.uniform() <= overlap:
        s = _rejection(d1, common, rng, max_tries, "common part")
        return s, s, True

    s1 = _rejection(d1, lambda s: d1.pdf(s) - common(s), rng, max_tries, "first residual")
    s2 = _rejection(d2, lambda s: d2.pdf(s) - common(s), rng, max_tries, "second residual")
    return s1, s2, False
