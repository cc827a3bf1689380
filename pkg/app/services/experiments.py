"""
Experiment runners behind the command line.

Each runner turns a resolved ExperimentConfig into an ExperimentResult
holding series (one row per time point), tables, scalars, rate fits and
acceptance checks. Writing artifacts is left to `artifacts`.
"""
import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from opentelemetry import trace

from .. import __version__
from ..core.config import get_settings
from ..core.errors import UsageError
from ..core.rng import RngStream
from ..core.worker_pool import WorkerPool, get_worker_pool
from ..schemas.experiment import AcceptanceCheck, ExperimentConfig, ExperimentResult, SeriesRow, grid
from ..schemas.models import ModelSpec
from . import analytics, couplings, montecarlo
from .processes import simulate_path

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

TCP = ModelSpec.tcp_variable()
MIN_HORIZON = 1e-9
# Bounds evaluated in floating point are compared with this relative and absolute slack.
ROUNDING_SLACK = 1e-12

# Reference rates and constants the acceptance checks compare against.
SQRT_DISTANCE_RATE = -0.4
FIRST_MOMENT_RATE = -0.48
TRUE_W1_RATE = -1.67
BEST_LAMBDA = 0.1326
BEST_P = 2 / 3
# Minorization-based storage rate for alpha = 1, beta = 2, against the coupling rate min(alpha, beta).
REFERENCE_STORAGE_RATE = 0.05
HYBRID_RATE_TIMES = (20.0, 40.0, 80.0, 160.0, 320.0)
HISTOGRAM_BINS = grid(0.0, 6.0, 0.25)


class _Checks:
    """Collects acceptance checks for one run."""

    def __init__(self, k: float):
        self.k = k
        self.items: List[AcceptanceCheck] = []

    def add(self, name: str, passed: bool, observed: float, threshold: float, detail: str = "") -> None:
        self.items.append(AcceptanceCheck(name=name, passed=bool(passed), observed=observed,
                                          threshold=threshold, detail=detail))

    def below(self, name: str, estimate: float, stderr: float, bound: float) -> None:
        observed = estimate - self.k * stderr
        passed = observed <= bound * (1 + ROUNDING_SLACK) + ROUNDING_SLACK
        self.add(name, passed, observed, bound, "estimate - k*stderr <= bound")

    def above(self, name: str, estimate: float, stderr: float, bound: float) -> None:
        observed = estimate + self.k * stderr
        passed = observed >= bound * (1 - ROUNDING_SLACK) - ROUNDING_SLACK
        self.add(name, passed, observed, bound, "estimate + k*stderr >= lower bound")

    def near(self, name: str, observed: float, target: float, tol: float, detail: str = "") -> None:
        self.add(name, abs(observed - target) <= tol, observed, target, detail or f"within {tol!r}")


def _horizon(times: List[float]) -> float:
    if not times:
        raise UsageError("experiment needs a nonempty time grid")
    return max(times[-1], MIN_HORIZON)


def _window(cfg: ExperimentConfig, lo: float, hi: float) -> tuple[float, float]:
    return (lo if cfg.window_min is None else cfg.window_min, hi if cfg.window_max is None else cfg.window_max)


def _result(cfg: ExperimentConfig, checks: _Checks, **parts: Any) -> ExperimentResult:
    return ExperimentResult(experiment=cfg.experiment, version=__version__, config=cfg,
                            checks=checks.items, **parts)


def _wasserstein_functionals(cfg: ExperimentConfig, pool: WorkerPool):
    """E|X_t - Y_t|^(1/2), E|X_t - Y_t| and E V~(X_t, Y_t) on the grid."""
    times = cfg.times
    horizon = _horizon(times)
    c = analytics.contraction_constants(0.5)

    def functional(outcome: couplings.CouplingOutcome) -> List[float]:
        sqrt_d, dist, vt = [], [], []
        for t in times:
            xt, yt = outcome.traj_x.evaluate(t), outcome.traj_y.evaluate(t)
            gap = abs(xt - yt)
            sqrt_d.append(math.sqrt(gap))
            dist.append(gap)
            vt.append(analytics.v_tilde(xt, yt, c.alpha, c.x0))
        return sqrt_d + dist + vt

    est = montecarlo.mc_expectation(
        functional,
        lambda rng: couplings.simulate_wasserstein_coupling(cfg.x, cfg.y, horizon, rng),
        cfg.replicas,
        cfg.seed,
        pool=pool,
    )
    k = len(times)
    return est[:k], est[k:2 * k], est[2 * k:]


def run_fig2(cfg: ExperimentConfig, pool: WorkerPool) -> ExperimentResult:
    checks = _Checks(get_settings().CONFIDENCE_MULTIPLIER)
    c = analytics.contraction_constants(0.5)
    sqrt_est, _, vt_est = _wasserstein_functionals(cfg, pool)
    v0 = analytics.v_tilde(cfg.x, cfg.y, c.alpha, c.x0)

    sqrt_rows, vt_rows = [], []
    for t, s, v in zip(cfg.times, sqrt_est, vt_est):
        bound = analytics.contraction_bound_sqrt(t, cfg.x, cfg.y)
        sqrt_rows.append(SeriesRow(t=t, estimate=s.mean, stderr=s.stderr, bound=bound))
        vt_rows.append(SeriesRow(t=t, estimate=v.mean, stderr=v.stderr, bound=math.exp(-c.lam * t) * v0))
        checks.below(f"sqrt_distance_bound[t={t!r}]", s.mean, s.stderr, bound)
        checks.below(f"v_tilde_bound[t={t!r}]", v.mean, v.stderr, math.exp(-c.lam * t) * v0)

    window = _window(cfg, 2.0, 10.0)
    rates = {
        "sqrt_distance": montecarlo.fit_exponential_rate([(r.t, r.estimate) for r in sqrt_rows], window),
        "v_tilde": montecarlo.fit_exponential_rate([(r.t, r.estimate) for r in vt_rows], window),
    }
    checks.near("sqrt_distance_rate", rates["sqrt_distance"].slope, SQRT_DISTANCE_RATE, 0.1)
    return _result(cfg, checks, series={"sqrt_distance": sqrt_rows, "v_tilde": vt_rows}, rates=rates,
                   scalars={"M": c.M, "lambda": c.lam})


def run_rate_coupling(cfg: ExperimentConfig, pool: WorkerPool) -> ExperimentResult:
    checks = _Checks(get_settings().CONFIDENCE_MULTIPLIER)
    sqrt_est, dist_est, _ = _wasserstein_functionals(cfg, pool)
    gap = abs(cfg.x - cfg.y)
    theta = 0.5
    constant = analytics.wasserstein_bound_constant(1.0, cfg.t0, theta)
    lam = analytics.contraction_constants(0.5).lam

    sqrt_rows, dist_rows = [], []
    for t, s, d in zip(cfg.times, sqrt_est, dist_est):
        sqrt_rows.append(SeriesRow(t=t, estimate=s.mean, stderr=s.stderr,
                                   bound=analytics.contraction_bound_sqrt(t, cfg.x, cfg.y)))
        # the gap never grows under this coupling
        bound = gap if t < cfg.t0 else min(gap, constant * math.exp(-lam * theta * t))
        dist_rows.append(SeriesRow(t=t, estimate=d.mean, stderr=d.stderr, bound=bound))
        checks.below(f"distance_bound[t={t!r}]", d.mean, d.stderr, bound)

    window = _window(cfg, 2.0, 10.0)
    rates = {
        "sqrt_distance": montecarlo.fit_exponential_rate([(r.t, r.estimate) for r in sqrt_rows], window),
        "distance": montecarlo.fit_exponential_rate([(r.t, r.estimate) for r in dist_rows], window),
    }
    checks.near("sqrt_distance_rate", rates["sqrt_distance"].slope, SQRT_DISTANCE_RATE, 0.1)
    checks.near("distance_rate", rates["distance"].slope, FIRST_MOMENT_RATE, 0.12)

    scalars = {"C(1,t0,1/2)": constant}
    if 5.0 in cfg.times:
        variant = analytics.wasserstein_contraction_bound(1.0, theta, 5.0, cfg.x, cfg.y)
        row = dist_rows[cfg.times.index(5.0)]
        scalars["contraction_variant_bound_t5"] = variant
        checks.below("contraction_variant_bound[t=5.0]", row.estimate, row.stderr, variant)
    return _result(cfg, checks, series={"sqrt_distance": sqrt_rows, "distance": dist_rows},
                   rates=rates, scalars=scalars)


def run_w1_true(cfg: ExperimentConfig, pool: WorkerPool, batches: int = 10) -> ExperimentResult:
    """W1 between the laws at time t from x and from y, by independent simulation."""
    checks = _Checks(get_settings().CONFIDENCE_MULTIPLIER)
    times = cfg.times
    horizon = _horizon(times)
    k = len(times)

    def pair(rng: RngStream):
        return simulate_path(TCP, cfg.x, horizon, rng), simulate_path(TCP, cfg.y, horizon, rng)

    samples = montecarlo.mc_samples(
        lambda p: [p[0].evaluate(t) for t in times] + [p[1].evaluate(t) for t in times],
        pair, cfg.replicas, cfg.seed, pool=pool,
    )
    rows = []
    size = cfg.replicas // batches
    for j, t in enumerate(times):
        a, b = samples[:, j], samples[:, k + j]
        w1 = montecarlo.empirical_w1(a, b)
        # batch means give the error scale
        partial = [montecarlo.empirical_w1(a[i * size:(i + 1) * size], b[i * size:(i + 1) * size])
                   for i in range(batches)] if size >= 1 else [w1, w1]
        stderr = float(np.std(partial, ddof=1) / math.sqrt(len(partial)))
        rows.append(SeriesRow(t=t, estimate=w1, stderr=stderr))

    window = _window(cfg, times[0], times[-1])
    rates = {"w1": montecarlo.fit_exponential_rate([(r.t, r.estimate) for r in rows], window)}
    checks.near("w1_rate", rates["w1"].slope, TRUE_W1_RATE, 0.25)
    return _result(cfg, checks, series={"w1": rows}, rates=rates)


def run_optimal_p(cfg: ExperimentConfig, pool: WorkerPool) -> ExperimentResult:
    checks = _Checks(get_settings().CONFIDENCE_MULTIPLIER)
    rows = []
    for p in cfg.p_grid:
        if not 0 < p < 1:
            logger.warning(f"Skipping p={p} outside (0, 1)")
            continue
        c = analytics.contraction_constants(p)
        rows.append({"p": p, "M": c.M, "lambda": c.lam, "alpha": c.alpha, "x0": c.x0})
    if not rows:
        raise UsageError("p grid has no value inside (0, 1)")
    best = max(rows, key=lambda r: r["lambda"])
    scalars = {"best_p": best["p"], "best_lambda": best["lambda"]}
    checks.near("best_lambda", best["lambda"], BEST_LAMBDA, 1e-3)
    checks.near("best_p", best["p"], BEST_P, 0.02)
    half = [r for r in rows if abs(r["p"] - 0.5) < 1e-12]
    if half:
        scalars["lambda_at_p_0.5"] = half[0]["lambda"]
        checks.near("lambda_at_p_0.5", half[0]["lambda"], 0.1208, 5e-4)
    return _result(cfg, checks, tables={"optimal_p": rows}, scalars=scalars)


def run_tv_hybrid(cfg: ExperimentConfig, pool: WorkerPool) -> ExperimentResult:
    checks = _Checks(get_settings().CONFIDENCE_MULTIPLIER)
    rows = []
    for t in cfg.times:
        schedule = analytics.plan_tv_schedule(t, cfg.t0)
        bound = analytics.tv_bound_hybrid(schedule)
        outcomes = pool.map_replicas(
            lambda i: couplings.hybrid_tv_coupling(cfg.x, cfg.y, schedule.t1, schedule.t2, cfg.rounds,
                                                   RngStream(cfg.seed, i)),
            cfg.replicas,
        )
        frac = montecarlo.coalescence_fraction(outcomes)
        lower = analytics.atom_lower_bound(cfg.x, cfg.y, cfg.rounds * schedule.total) if cfg.x != cfg.y else 0.0
        rows.append(SeriesRow(t=t, estimate=frac.mean, stderr=frac.stderr, bound=bound.value, lower_bound=lower))
        checks.below(f"hybrid_bound[t={t!r}]", frac.mean, frac.stderr, bound.value)
        checks.above(f"atom_lower_bound[t={t!r}]", frac.mean, frac.stderr, lower)
        logger.info(f"tv-hybrid t={t}: non-coalescence {frac.mean:.4g} (bound {bound.value:.4g}, raw {bound.raw_value:.4g})")

    curve, local = [], []
    for t in HYBRID_RATE_TIMES:
        report = analytics.tv_bound_hybrid(analytics.plan_tv_schedule(t, cfg.t0))
        curve.append({"t": t, "bound_raw": report.raw_value, "bound": report.value})
    for prev, cur in zip(curve, curve[1:]):
        rate = (math.log(prev["bound_raw"]) - math.log(cur["bound_raw"])) / (cur["t"] - prev["t"])
        local.append({"t_start": prev["t"], "t_end": cur["t"], "local_rate": rate})
    target = 2 * analytics.contraction_constants(0.5).lam / 3
    # the fit over the first three times has not reached the limit yet
    first, last = HYBRID_RATE_TIMES[:3], HYBRID_RATE_TIMES[-2:]
    checks.near("hybrid_bound_rate", local[-1]["local_rate"], target, 0.01,
                f"local slope of log bound over [{last[0]!r}, {last[1]!r}] within 0.01 of 2*lambda/3, "
                f"standing in for the exponent fitted over {list(first)} (reported under rates)")
    rates = {"hybrid_bound": montecarlo.fit_exponential_rate(
        [(r["t"], r["bound_raw"]) for r in curve], (HYBRID_RATE_TIMES[0], HYBRID_RATE_TIMES[2]))}
    scalars = {"two_thirds_lambda": target}
    if cfg.eps is not None:
        # single attempt over [0, t] with the user's eps; t defaults to eps itself
        horizon = cfg.t if cfg.t is not None and math.isfinite(cfg.t) else cfg.eps
        q = analytics.coalescence_bound_q(cfg.x, cfg.y, horizon, cfg.eps)
        scalars.update({"attempt_q": q.quadrature, "attempt_q_explicit": q.explicit,
                        "attempt_q_uniform_on_A": q.uniform_on_A})
    return _result(cfg, checks, series={"noncoalescence": rows},
                   tables={"bound_curve": curve, "bound_local_rate": local},
                   rates=rates, scalars=scalars)


def _tv_times(cfg: ExperimentConfig) -> List[float]:
    extra = [cfg.t] if cfg.t is not None and math.isfinite(cfg.t) else []
    return sorted({t for t in cfg.times + extra if t > 0})


def _noncoalescence_series(cfg: ExperimentConfig, pool: WorkerPool, checks: _Checks,
                           coupling: Callable[[float, RngStream], couplings.CouplingOutcome],
                           upper: Callable[[float], float], lower: Callable[[float], float]) -> List[SeriesRow]:
    rows = []
    for t in _tv_times(cfg):
        outcomes = pool.map_replicas(lambda i: coupling(t, RngStream(cfg.seed, i)), cfg.replicas)
        frac = montecarlo.coalescence_fraction(outcomes)
        hi, lo = min(upper(t), 1.0), lower(t)
        rows.append(SeriesRow(t=t, estimate=frac.mean, stderr=frac.stderr, bound=hi, lower_bound=lo))
        checks.below(f"tv_bound[t={t!r}]", frac.mean, frac.stderr, hi)
        checks.above(f"tv_lower_bound[t={t!r}]", frac.mean, frac.stderr, lo)
    return rows


def _validation_series(name: str, times: List[float], est, exact: Callable[[float], float],
                       checks: _Checks) -> List[SeriesRow]:
    """Rows whose bound column holds the closed-form value; checked two-sided."""
    rows = []
    for t, s in zip(times, est):
        value = exact(t)
        rows.append(SeriesRow(t=t, estimate=s.mean, stderr=s.stderr, bound=value))
        checks.add(f"{name}[t={t!r}]", abs(s.mean - value) <= checks.k * s.stderr + ROUNDING_SLACK,
                   s.mean, value, "|estimate - exact| <= k*stderr")
    return rows


def _pathwise_error(samples: np.ndarray, checks: _Checks, name: str, scale: float) -> float:
    worst = float(np.max(samples)) if samples.size else 0.0
    checks.add(name, worst <= 1e-9 * max(1.0, scale), worst, 1e-9 * max(1.0, scale), "max pathwise deviation")
    return worst


def run_constant_rate(cfg: ExperimentConfig, pool: WorkerPool) -> ExperimentResult:
    checks = _Checks(get_settings().CONFIDENCE_MULTIPLIER)
    lam = cfg.lam
    if cfg.t is not None and math.isinf(cfg.t):
        value = analytics.constant_rate_moment(lam, cfg.x, cfg.n, math.inf)
        return _result(cfg, checks, scalars={f"stationary_moment_{cfg.n}": value})

    model = ModelSpec.tcp_constant(lam)
    times = cfg.times
    horizon = _horizon(times)
    orders = sorted({1, 2, cfg.n})
    est = montecarlo.mc_expectation(
        lambda traj: [traj.evaluate(t) ** k for k in orders for t in times],
        lambda rng: simulate_path(model, cfg.x, horizon, rng),
        cfg.replicas, cfg.seed, pool=pool,
    )
    series = {}
    for i, k in enumerate(orders):
        series[f"moment_{k}"] = _validation_series(
            f"moment_{k}", times, est[i * len(times):(i + 1) * len(times)],
            lambda t, k=k: analytics.constant_rate_moment(lam, cfg.x, k, t), checks)

    gap = abs(cfg.x - cfg.y)

    def sync_functional(o: couplings.CouplingOutcome) -> List[float]:
        dists, errors = [], []
        for t in times:
            d = o.distance(t)
            jumps = bisect_right(o.traj_x.jump_times, t)
            dists.append(d)
            errors.append(abs(d - gap * 2.0 ** (-jumps)))
        return dists + errors

    sync = montecarlo.mc_samples(
        sync_functional,
        lambda rng: couplings.synchronous_coupling_constant(lam, cfg.x, cfg.y, horizon, rng),
        cfg.replicas, cfg.seed, pool=pool,
    )
    k = len(times)
    sync_est = [montecarlo.summarize(sync[:, j]) for j in range(k)]
    series["sync_distance"] = _validation_series(
        "sync_distance", times, sync_est, lambda t: gap * math.exp(-lam * t / 2), checks)
    worst = _pathwise_error(sync[:, k:], checks, "sync_gap_law", gap)

    series["tv_noncoalescence"] = _noncoalescence_series(
        cfg, pool, checks,
        lambda t, rng: couplings.tv_coupling_constant_rate(lam, cfg.x, cfg.y, t, rng),
        lambda t: analytics.constant_rate_tv_bound(lam, cfg.x, cfg.y, t),
        lambda t: math.exp(-lam * t) if gap > 0 else 0.0,
    )
    misc = analytics.bounds_misc(model, cfg.x, cfg.y, horizon)
    scalars = {f"{b.bound_name}": b.value for b in misc}
    scalars["max_sync_gap_error"] = worst
    scalars[f"stationary_moment_{cfg.n}"] = analytics.constant_rate_moment(lam, cfg.x, cfg.n, math.inf)
    return _result(cfg, checks, series=series, scalars=scalars)


def run_storage(cfg: ExperimentConfig, pool: WorkerPool) -> ExperimentResult:
    checks = _Checks(get_settings().CONFIDENCE_MULTIPLIER)
    alpha, beta = cfg.alpha, cfg.beta
    model = ModelSpec.storage(alpha, beta)
    times = cfg.times
    horizon = _horizon(times)
    ratio = alpha / beta

    est = montecarlo.mc_expectation(
        lambda traj: [traj.evaluate(t) for t in times],
        lambda rng: simulate_path(model, cfg.x, horizon, rng),
        cfg.replicas, cfg.seed, pool=pool,
    )
    series = {"mean": _validation_series(
        "mean", times, est, lambda t: ratio + (cfg.x - ratio) * math.exp(-beta * t), checks)}

    gap = abs(cfg.x - cfg.y)
    sync = montecarlo.mc_samples(
        lambda o: [abs(o.distance(t) - gap * math.exp(-beta * t)) for t in times],
        lambda rng: couplings.synchronous_coupling_storage(alpha, beta, cfg.x, cfg.y, horizon, rng),
        cfg.replicas, cfg.seed, pool=pool,
    )
    worst = _pathwise_error(sync, checks, "sync_gap_law", gap)

    series["tv_noncoalescence"] = _noncoalescence_series(
        cfg, pool, checks,
        lambda t, rng: couplings.tv_coupling_storage(alpha, beta, cfg.x, cfg.y, t, rng),
        lambda t: analytics.storage_tv_bound(alpha, beta, cfg.x, cfg.y, t),
        lambda t: math.exp(-alpha * t) if gap > 0 else 0.0,
    )
    coupling_rate = min(alpha, beta)
    tables = {"rate_comparison": [{
        "alpha": alpha,
        "beta": beta,
        "coupling_rate": coupling_rate,
        "reference_rate": REFERENCE_STORAGE_RATE,
        "ratio": coupling_rate / REFERENCE_STORAGE_RATE,
    }]}
    misc = analytics.bounds_misc(model, cfg.x, cfg.y, horizon)
    scalars = {b.bound_name: b.value for b in misc}
    scalars["max_sync_gap_error"] = worst
    return _result(cfg, checks, series=series, tables=tables, scalars=scalars)


def run_invariant_check(cfg: ExperimentConfig, pool: WorkerPool) -> ExperimentResult:
    checks = _Checks(get_settings().CONFIDENCE_MULTIPLIER)
    density = analytics.invariant_density

    def moment(k: int) -> float:
        return couplings.integrate_on(lambda u: u ** k * density(u), 0.0, math.inf, tol=1e-12)

    mass, m1, m2, m4 = moment(0), moment(1), moment(2), moment(4)
    checks.near("density_mass", mass, 1.0, 1e-8)
    checks.near("m2", m2, 2.0, 1e-6)
    checks.near("m4", m4, 48 / 7, 1e-6)
    lo, hi = analytics.STATIONARY_MEAN_BRACKET
    checks.add("m1_quadrature_bracket", lo <= m1 <= hi, m1, hi, "1/sqrt(log 2) <= m1 <= sqrt 2")

    burn_in = cfg.t if cfg.t is not None and math.isfinite(cfg.t) else 50.0
    log2 = math.log(2)
    samples = montecarlo.mc_samples(
        lambda traj: [traj.evaluate(burn_in)],
        lambda rng: simulate_path(TCP, cfg.x, burn_in, rng),
        cfg.replicas, cfg.seed, pool=pool,
    )[:, 0]
    m1_hat = montecarlo.summarize(samples)
    inverse_gap = montecarlo.summarize(log2 * samples - 1.0 / samples)
    third_gap = montecarlo.summarize(samples ** 3 - analytics.invariant_moment_step(2, 1.0) * samples)
    checks.above("m1_hat_lower", m1_hat.mean, m1_hat.stderr, lo)
    checks.below("m1_hat_upper", m1_hat.mean, m1_hat.stderr, hi)
    checks.add("inverse_moment_identity", abs(inverse_gap.mean) <= 4 * inverse_gap.stderr,
               inverse_gap.mean, 4 * inverse_gap.stderr, "|log(2) m1 - m_-1| <= 4 stderr")
    checks.add("third_moment_recursion", abs(third_gap.mean) <= 4 * third_gap.stderr,
               third_gap.mean, 4 * third_gap.stderr, "|m3 - (8/3) m1| <= 4 stderr")

    histogram = []
    counts, _ = np.histogram(samples, bins=HISTOGRAM_BINS)
    width = HISTOGRAM_BINS[1] - HISTOGRAM_BINS[0]
    for count, left, right in zip(counts, HISTOGRAM_BINS, HISTOGRAM_BINS[1:]):
        histogram.append({
            "x_left": left,
            "x_right": right,
            "empirical": float(count) / (samples.size * width),
            "density": couplings.integrate_on(density, max(left, 1e-12), right) / width,
        })
    scalars = {"mass": mass, "m1": m1, "m2": m2, "m4": m4, "m1_hat": m1_hat.mean,
               "m1_hat_stderr": m1_hat.stderr, "m_minus1_hat": float(np.mean(1.0 / samples))}
    return _result(cfg, checks, tables={"histogram": histogram}, scalars=scalars)


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    runner: Callable[[ExperimentConfig, WorkerPool], ExperimentResult]
    help: str
    defaults: Dict[str, Any] = field(default_factory=dict)


EXPERIMENTS: Dict[str, ExperimentSpec] = {
    spec.name: spec
    for spec in (
        ExperimentSpec("fig2", run_fig2, "E|X_t - Y_t|^(1/2) under the Wasserstein coupling versus its bound",
                       {"x": 2.0, "y": 10.0, "times": grid(0.0, 10.0, 0.25), "replicas": 10_000}),
        ExperimentSpec("rate-coupling", run_rate_coupling, "decay rates of E|X_t - Y_t|^(1/2) and E|X_t - Y_t|",
                       {"x": 2.0, "y": 10.0, "times": grid(0.0, 10.0, 0.5), "replicas": 10_000}),
        ExperimentSpec("w1-true", run_w1_true, "empirical W1 between the laws from x and y",
                       {"x": 2.0, "y": 0.5, "times": grid(0.2, 4.0, 0.2), "replicas": 100_000}),
        ExperimentSpec("optimal-p", run_optimal_p, "contraction constants over a grid of exponents",
                       {"p_grid": grid(0.05, 0.95, 0.001)}),
        ExperimentSpec("tv-hybrid", run_tv_hybrid, "hybrid coupling non-coalescence versus the explicit bound",
                       {"x": 2.0, "y": 10.0, "times": [10.0, 15.0, 20.0], "t0": 1.0, "replicas": 10_000}),
        ExperimentSpec("constant-rate", run_constant_rate, "constant-rate moments and couplings",
                       {"lam": 1.0, "x": 0.0, "y": 1.0, "times": [0.5, 1.0, 3.0], "t": 4.0, "replicas": 100_000}),
        ExperimentSpec("storage", run_storage, "storage model mean and couplings",
                       {"alpha": 1.0, "beta": 2.0, "x": 0.0, "y": 1.0, "times": [0.5, 1.0, 2.0],
                        "replicas": 100_000}),
        ExperimentSpec("invariant-check", run_invariant_check, "invariant density and stationary moments",
                       {"x": 0.0, "t": 50.0, "replicas": 100_000}),
    )
}


def resolve_config(name: str, file_values: Optional[Dict[str, Any]] = None,
                   overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Model defaults < settings < experiment defaults < config file < explicit flags."""
    if name not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    settings = get_settings()
    values: Dict[str, Any] = {"replicas": settings.LAB_REPLICAS, "seed": settings.LAB_SEED}
    values.update(EXPERIMENTS[name].defaults)
    # config files may spell the rate as `lambda`
    values.update({("lam" if k == "lambda" else k): v for k, v in (file_values or {}).items() if k != "experiment"})
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    values["experiment"] = name
    try:
        return ExperimentConfig(**values)
    except ValueError as e:
        raise UsageError(f"invalid configuration for {name}: {e}") from e


def run(config: ExperimentConfig, pool: Optional[WorkerPool] = None) -> ExperimentResult:
    spec = EXPERIMENTS.get(config.experiment)
    if spec is None:
        raise UsageError(f"unknown experiment {config.experiment!r}")
    pool = pool or get_worker_pool()
    with tracer.start_as_current_span("run_experiment") as span:
        span.set_attribute("experiment", config.experiment)
        span.set_attribute("replicas", config.replicas)
        span.set_attribute("seed", config.seed)
        logger.info(f"Running {config.experiment} (replicas={config.replicas}, seed={config.seed})")
        result = spec.runner(config, pool)
    failed = result.failures()
    logger.info(f"Finished {config.experiment}: {len(result.checks) - len(failed)}/{len(result.checks)} checks passed")
    return result
