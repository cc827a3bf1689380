"""
Contraction constants of the Wasserstein coupling.

For V_p(x, y) = |x - y|^p with y = u x, the generator of the coupling gives

    L V_p <= -x V_p (1 - phi_p(u)),  phi_p(u) = 2^-p u + (1-u)^(1-p) |u - 1/2|^p,

which at p = 1/2 is sqrt(2)/2 u + sqrt((1-u)|u-1/2|). With M_p = max phi_p,
the Lyapunov function psi(x v y) |x - y|^p with psi(x) = 1 + alpha (1 - x/x0)^2
below x0 decays at rate

    lambda(alpha, x0) = min(2 alpha / (x0 (1 + alpha)), x0 (1 - (1 + alpha) M_p)).

Equating the two branches and optimizing over alpha gives alpha = 1/sqrt(M_p) - 1,
x0 = sqrt(2) and lambda = sqrt(2) (1 - sqrt(M_p)) for every p.
"""
import math
from functools import lru_cache

from scipy import optimize

from ..core.errors import NumericalFailureError, UsageError
from ..schemas.bounds import ContractionConstants

SEARCH_XATOL = 1e-12


def phi(u: float, p: float = 0.5) -> float:
    if not 0.0 <= u <= 1.0:
        raise UsageError(f"u must lie in [0, 1], got {u}")
    if not 0.0 < p < 1.0:
        raise UsageError(f"p must lie in (0, 1), got {p}")
    return 2.0 ** (-p) * u + (1.0 - u) ** (1.0 - p) * abs(u - 0.5) ** p


def _argmax_phi(p: float) -> tuple[float, float]:
    best_u, best = 0.0, phi(0.0, p)
    for lo, hi in ((0.0, 0.5), (0.5, 1.0)):
        res = optimize.minimize_scalar(
            lambda u: -phi(u, p), bounds=(lo, hi), method="bounded", options={"xatol": SEARCH_XATOL}
        )
        if not res.success:
            raise NumericalFailureError(f"maximizing phi_{p} on [{lo}, {hi}] failed: {res.message}")
        if -res.fun > best:
            best_u, best = float(res.x), float(-res.fun)
    if phi(1.0, p) > best:
        best_u, best = 1.0, phi(1.0, p)
    return best_u, best


def lambda_branches(alpha: float, x0: float, M: float) -> tuple[float, float]:
    return 2 * alpha / (x0 * (1 + alpha)), x0 * (1 - (1 + alpha) * M)


@lru_cache(maxsize=4096)
def contraction_constants(p: float = 0.5) -> ContractionConstants:
    if not 0.0 < p < 1.0:
        raise UsageError(f"p must lie in (0, 1), got {p}")
    u_star, M = _argmax_phi(p)
    if not 0 < M < 1:
        raise NumericalFailureError(f"max of phi_{p} is {M}, outside (0, 1)")

    def equal_branch_rate(alpha: float) -> float:
        return math.sqrt(2 * alpha * (1 - (1 + alpha) * M) / (1 + alpha))

    res = optimize.minimize_scalar(
        lambda a: -equal_branch_rate(a),
        bounds=(0.0, 1.0 / M - 1.0),
        method="bounded",
        options={"xatol": SEARCH_XATOL},
    )
    if not res.success:
        raise NumericalFailureError(f"alpha search for p={p} failed: {res.message}")
    alpha = float(res.x)
    x0 = math.sqrt(2 * alpha / ((1 + alpha) * (1 - (1 + alpha) * M)))
    lam = min(lambda_branches(alpha, x0, M))
    return ContractionConstants(p=p, M=M, lam=lam, alpha=alpha, x0=x0, u_star=u_star)


def psi(x: float, alpha: float, x0: float) -> float:
    if alpha <= 0 or x0 <= 0:
        raise UsageError(f"alpha and x0 must be positive, got alpha={alpha}, x0={x0}")
    if x >= x0:
        return 1.0
    return 1.0 + alpha * (1.0 - x / x0) ** 2


def v_tilde(x: float, y: float, alpha: float, x0: float) -> float:
    return psi(max(x, y), alpha, x0) * math.sqrt(abs(x - y))


def contraction_bound_sqrt(t: float, x: float, y: float) -> float:
    """(1/sqrt M) exp(-lambda t) |x - y|^(1/2), the bound on E|X_t - Y_t|^(1/2)."""
    c = contraction_constants(0.5)
    return math.exp(-c.lam * t) * math.sqrt(abs(x - y)) / math.sqrt(c.M)


def uniform_sqrt_bound(t: float, t0: float) -> float:
    """Start-free bound sqrt((2 sqrt2 + 4/t0)/M) exp(-lambda (t - t0)), valid for t >= t0."""
    if t0 <= 0 or t < t0:
        raise UsageError(f"need 0 < t0 <= t, got t0={t0}, t={t}")
    c = contraction_constants(0.5)
    return math.sqrt((2 * math.sqrt(2) + 4 / t0) / c.M) * math.exp(-c.lam * (t - t0))


def _holder_factor(p: float, theta: float, s: float) -> float:
    q = (2 * p - theta) / (1 - theta)
    return (math.sqrt(q) + q / s) ** (p - theta / 2)


def wasserstein_bound_constant(p: float, t0: float, theta: float) -> float:
    """C(p, t0, theta) with E|X_t - Y_t|^p <= C exp(-lambda theta t) for t >= t0."""
    if p < 1 or t0 <= 0 or not 0 < theta < 1:
        raise UsageError(f"need p >= 1, t0 > 0, 0 < theta < 1; got p={p}, t0={t0}, theta={theta}")
    c = contraction_constants(0.5)
    return (
        2 ** p
        / c.M ** (theta / 2)
        * _holder_factor(p, theta, t0)
        * (math.sqrt(2) + 2 / t0) ** (theta / 2)
        * math.exp(c.lam * theta * t0)
    )


def wasserstein_contraction_bound(p: float, theta: float, t: float, x: float, y: float) -> float:
    """Bound on E|X_t - Y_t|^p that keeps the dependence on |x - y|."""
    if p < 1 or t <= 0 or not 0 < theta < 1:
        raise UsageError(f"need p >= 1, t > 0, 0 < theta < 1; got p={p}, t={t}, theta={theta}")
    c = contraction_constants(0.5)
    return (
        2 ** (p - theta / 2)
        / c.M ** (theta / 2)
        * _holder_factor(p, theta, t)
        * math.exp(-c.lam * theta * t)
        * abs(x - y) ** (theta / 2)
    )
