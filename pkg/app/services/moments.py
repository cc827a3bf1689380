"""
Moment identities and the invariant law of the variable-rate TCP process.

The variable-rate moment equations form an unclosed hierarchy (the equation
for E X^p involves E X^(p+1)), so they are not integrated here. What is
evaluated instead: the uniform-in-x moment bound, the deviation bounds it
implies, the invariant density series and its moment recursion, and the
closed-form moments of the constant-rate model.
"""
import math

from ..core.errors import UsageError
from ..schemas.bounds import DeviationBounds

SQRT_2_OVER_PI = math.sqrt(2 / math.pi)
# 1/sqrt(log 2) <= m_1 <= sqrt(2) for the invariant law
STATIONARY_MEAN_BRACKET = (1 / math.sqrt(math.log(2)), math.sqrt(2))


def wasserstein_moment_bound(p: float, t: float) -> float:
    """(sqrt(2p) + 2p/t)^p, a bound on E_x X_t^p uniform in x."""
    if p < 1 or t <= 0:
        raise UsageError(f"need p >= 1 and t > 0, got p={p}, t={t}")
    return (math.sqrt(2 * p) + 2 * p / t) ** p


def deviation_bounds(t: float, r: float) -> DeviationBounds:
    """Tail bounds P_x(X_t >= r) and mu([r, inf)).

    Outside their validity ranges the bounds are reported as 1 with the
    corresponding flag cleared.
    """
    if t <= 0 or r < 0:
        raise UsageError(f"need t > 0 and r >= 0, got t={t}, r={r}")
    finite_valid = r >= 2 * math.e * (1 + 1 / t)
    stationary_valid = r >= math.sqrt(2 * math.e)
    return DeviationBounds(
        finite_time=math.exp(-t * r / (2 * math.e * (t + 1))) if finite_valid else 1.0,
        stationary=math.exp(-r * r / (4 * math.e)) if stationary_valid else 1.0,
        finite_time_valid=finite_valid,
        stationary_valid=stationary_valid,
    )


def _normalizing_product(tol: float) -> float:
    prod = 1.0
    n = 0
    while True:
        factor = 1.0 - 2.0 ** (-(2 * n + 1))
        if 1.0 - factor < tol / 10:
            return prod
        prod *= factor
        n += 1


def invariant_density(x: float, tol: float = 1e-12) -> float:
    """Alternating series for the invariant density, truncated once the next term is below tol."""
    if x <= 0 or tol <= 0:
        raise UsageError(f"need x > 0 and tol > 0, got x={x}, tol={tol}")
    prefactor = SQRT_2_OVER_PI / _normalizing_product(tol)
    total = 0.0
    coeff = 1.0
    n = 0
    while True:
        term = coeff * math.exp(-(4.0 ** n) * x * x / 2)
        if n > 0 and prefactor * abs(term) < tol:
            break
        total += term if n % 2 == 0 else -term
        n += 1
        coeff *= 4.0 / (4.0 ** n - 1)
    return prefactor * total


def invariant_moment_step(p: float, m_prev: float) -> float:
    """m_(p+1) = p m_(p-1) / (1 - 2^-p)."""
    if p <= 0 or m_prev < 0:
        raise UsageError(f"need p > 0 and m_prev >= 0, got p={p}, m_prev={m_prev}")
    return p * m_prev / (1 - 2.0 ** (-p))


def invariant_moment_sequence(m1: float, count: int) -> list[float]:
    """[m_0, m_1, ..., m_(count-1)] of the invariant law given its mean."""
    if count < 1:
        raise UsageError(f"count must be positive, got {count}")
    moments = [1.0, m1]
    while len(moments) < count:
        k = len(moments) - 1
        moments.append(invariant_moment_step(k, moments[k - 1]))
    return moments[:count]


def inverse_moment_from_mean(m1: float) -> float:
    """E[1/X] under the invariant law: log(2) m_1."""
    return math.log(2) * m1


def _theta(lam: float, k: int) -> float:
    return lam * (1 - 2.0 ** (-k))


def constant_rate_moment(lam: float, x: float, n: int, t: float) -> float:
    """E_x X_t^n for the constant-rate model; t = inf gives the stationary moment."""
    if lam <= 0 or n < 1 or t < 0 or x < 0:
        raise UsageError(f"need lambda > 0, x >= 0, n >= 1, t >= 0; got {lam}, {x}, {n}, {t}")
    thetas = [_theta(lam, k) for k in range(n + 1)]
    stationary = math.factorial(n) / math.prod(thetas[1:])
    if math.isinf(t):
        return stationary

    transient = 0.0
    for m in range(1, n + 1):
        inner = 0.0
        for k in range(m + 1):
            weight = 1.0
            for j in range(k, n + 1):
                if j != m:
                    weight /= thetas[j] - thetas[m]
            inner += x ** k / math.factorial(k) * weight
        transient += inner * math.exp(-thetas[m] * t)
    return stationary + math.factorial(n) * transient
