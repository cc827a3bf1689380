"""
Total-variation bounds: the single-attempt coalescence probability, the
hybrid coupling schedule, and the closed-form bounds of the constant-rate
and storage models.
"""
import logging
import math
from typing import NamedTuple, Optional

from scipy import special

from ..core.errors import ScheduleInfeasibleError, UsageError
from ..schemas.bounds import BoundReport, ScheduleParams
from ..schemas.models import ModelKind, ModelSpec
from .contraction import contraction_constants
from .maximal_coupling import overlap_integral, shifted_density
from .processes import tcp_jump_density, tcp_survival

logger = logging.getLogger(__name__)

# Relative slack on eps >= x - y, which is rounded.
GAP_SLACK = 1e-12


class CoalescenceBounds(NamedTuple):
    quadrature: float
    explicit: float
    uniform_on_A: float


def alpha_fn(x: float) -> float:
    """Integral of exp(-u^2/2 - u x) over u >= 0, i.e. sqrt(pi/2) e^(x^2/2) erfc(x/sqrt 2)."""
    if x < 0:
        raise UsageError(f"x must be nonnegative, got {x}")
    return math.sqrt(math.pi / 2) * float(special.erfcx(x / math.sqrt(2)))


def a_coefficient(t: float) -> float:
    """a(t) = t / (2e(t + 1)), the tail exponent of X_t at a fixed time."""
    return t / (2 * math.e * (t + 1))


def coalescence_bound_q(x: float, y: float, t: float, eps: float,
                        x_ceiling: Optional[float] = None) -> CoalescenceBounds:
    """Lower bounds on the success probability of one coalescence attempt.

    quadrature is q_t(x, y) itself, explicit its closed-form minorant, and
    uniform_on_A the minorant over all pairs below `x_ceiling` (default x v y)
    at distance at most eps.
    """
    if x < y:
        x, y = y, x
    delta = x - y
    if not (delta > 0 and t >= eps >= delta * (1 - GAP_SLACK)):
        raise UsageError(f"need t >= eps >= x - y > 0, got t={t}, eps={eps}, x-y={delta}")
    ceiling = max(x, y) if x_ceiling is None else x_ceiling

    overlap = overlap_integral(tcp_jump_density(x), shifted_density(tcp_jump_density(y), delta),
                               lower=delta, upper=t)
    quadrature = overlap * tcp_survival((x + t) / 2, delta)
    explicit = (tcp_survival(x, eps) - tcp_survival(x, t) - 2 * eps * alpha_fn(x)) * tcp_survival((x + t) / 2, eps)
    uniform = (
        math.exp(-eps * eps - (3 * ceiling + t) * eps / 2)
        - math.exp(-t * t / 2)
        - math.sqrt(2 * math.pi) * eps
    )
    return CoalescenceBounds(quadrature=quadrature, explicit=explicit, uniform_on_A=uniform)


def plan_tv_schedule(t: float, t0: float = 1.0) -> ScheduleParams:
    """Split t = t1 + t2 with t1 = (3/(2 lambda)) L, t2 = sqrt(2L), L = log(1/eps)."""
    if t <= 0 or t0 <= 0:
        raise UsageError(f"need t > 0 and t0 > 0, got t={t}, t0={t0}")
    lam = contraction_constants(0.5).lam
    a = 3 / (2 * lam)
    # a u^2 + sqrt(2) u - t = 0 with u = sqrt(L)
    u = (-math.sqrt(2) + math.sqrt(2 + 4 * a * t)) / (2 * a)
    level = u * u
    epsilon = math.exp(-level)
    t1, t2 = a * level, math.sqrt(2 * level)
    x0_cut = level / a_coefficient(t0)

    if not 0 < epsilon < 1:
        raise ScheduleInfeasibleError("0 < epsilon < 1", f"epsilon={epsilon}")
    if t1 < t0:
        raise ScheduleInfeasibleError("t1 >= t0", f"t1={t1:.6g} < t0={t0}")
    if x0_cut < t2:
        raise ScheduleInfeasibleError("x0 >= t2", f"x0={x0_cut:.6g} < t2={t2:.6g}")
    floor = 2 * math.e * (1 + 1 / t1)
    if x0_cut < floor:
        raise ScheduleInfeasibleError("x0 >= 2e(1 + 1/t1)", f"x0={x0_cut:.6g} < {floor:.6g}")
    return ScheduleParams(epsilon=epsilon, t1=t1, t2=t2, x0_cut=x0_cut, t0=t0)


def hybrid_constant(t0: float) -> float:
    c = contraction_constants(0.5)
    return math.sqrt((2 * math.sqrt(2) + 4 / t0) / c.M) * math.exp(c.lam * t0)


def hybrid_bound_terms(params: ScheduleParams) -> dict[str, float]:
    """The six summands of the hybrid bound, keyed by what they control."""
    eps, x0 = params.epsilon, params.x0_cut
    lam = contraction_constants(0.5).lam
    return {
        "eps_squared": eps * eps,
        "gap_window": 2 * eps * x0,
        "late_first_jump": math.exp(-params.t2 ** 2 / 2),
        "overlap_defect": math.sqrt(2 * math.pi) * eps,
        "escape_above_x0": 2 * math.exp(-a_coefficient(params.t0) * x0),
        "not_close_enough": hybrid_constant(params.t0) / math.sqrt(eps) * math.exp(-lam * params.t1),
    }


def _report(name: str, raw: float, probability: bool, **inputs) -> BoundReport:
    value = min(max(raw, 0.0), 1.0) if probability else max(raw, 0.0)
    clamped = value != raw
    if clamped:
        logger.debug(f"Bound {name} clamped from {raw} to {value}")
    return BoundReport(bound_name=name, inputs=inputs, value=value, raw_value=raw, clamped=clamped)


def tv_bound_hybrid(params: ScheduleParams) -> BoundReport:
    raw = sum(hybrid_bound_terms(params).values())
    return _report(
        "tv_hybrid",
        raw,
        probability=True,
        t=params.total,
        t0=params.t0,
        epsilon=params.epsilon,
        t1=params.t1,
        t2=params.t2,
        x0=params.x0_cut,
    )


def atom_lower_bound(x: float, y: float, t: float) -> float:
    """p_t(x) v p_t(y) = exp(-t^2/2 - (x ^ y) t)."""
    return tcp_survival(min(x, y), t)


def _storage_integral(alpha: float, beta: float, t: float) -> float:
    """alpha (e^-beta t - e^-alpha t)/(alpha - beta), with its limit alpha t e^-alpha t."""
    if alpha == beta:
        return alpha * t * math.exp(-alpha * t)
    return -alpha * math.exp(-beta * t) * math.expm1(-(alpha - beta) * t) / (alpha - beta)


def constant_rate_tv_bound(lam: float, x: float, y: float, t: float) -> float:
    return lam * math.exp(-lam * t / 2) * abs(x - y) + math.exp(-lam * t)


def storage_tv_bound(alpha: float, beta: float, x: float, y: float, t: float) -> float:
    return math.exp(-alpha * t) + abs(x - y) * _storage_integral(alpha, beta, t)


def ergodic_tv_bound_constant(lam: float, t: float, w1: float, tv0: float) -> float:
    """Bound on ||nu P_t - mu||_TV from W_1(nu, mu) and ||nu - mu||_TV."""
    return lam * math.exp(-lam * t / 2) * w1 + math.exp(-lam * t) * tv0


def ergodic_tv_bound_storage(alpha: float, beta: float, t: float, w1: float, tv0: float) -> float:
    return tv0 * math.exp(-alpha * t) + w1 * _storage_integral(alpha, beta, t)


def bounds_misc(model: ModelSpec, x: float, y: float, t: float, p: float = 1.0) -> list[BoundReport]:
    """Every closed-form bound that applies to `model` at (x, y, t)."""
    if t < 0 or x < 0 or y < 0:
        raise UsageError(f"need x, y, t >= 0, got x={x}, y={y}, t={t}")
    if p < 1:
        raise UsageError(f"p must be >= 1, got {p}")
    gap = abs(x - y)
    if model.kind is ModelKind.TCP_CONSTANT:
        lam = model.lam
        rate = lam * (1 - 2.0 ** (-p)) / p
        return [
            _report("wp_rate", rate, probability=False, lam=lam, p=p),
            _report("wp_bound", gap * math.exp(-rate * t), probability=False, lam=lam, p=p, t=t),
            _report("tv_bound", constant_rate_tv_bound(lam, x, y, t), probability=True, lam=lam, x=x, y=y, t=t),
        ]
    if model.kind is ModelKind.STORAGE:
        alpha, beta = model.alpha, model.beta
        return [
            _report("wp_bound", gap * math.exp(-beta * t), probability=False, alpha=alpha, beta=beta, t=t),
            _report("tv_bound", storage_tv_bound(alpha, beta, x, y, t), probability=True,
                    alpha=alpha, beta=beta, x=x, y=y, t=t),
            _report("tv_rate", min(alpha, beta), probability=False, alpha=alpha, beta=beta),
        ]
    return [_report("tv_atom_lower_bound", atom_lower_bound(x, y, t), probability=True, x=x, y=y, t=t)]
