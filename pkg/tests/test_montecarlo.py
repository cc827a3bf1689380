import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.errors import NumericalFailureError, UsageError
from app.core.worker_pool import WorkerPool, configure_worker_pool, resolve_thread_count
from app.schemas.stats import SummaryStats
from app.services import montecarlo
from app.services.processes import simulate_path
from app.services.tcp_couplings import TCP
from app.services.trajectory import CouplingOutcome, PathBuilder


def _path_functional(traj):
    return [traj.evaluate(1.0), traj.evaluate(2.0)]


def _path_generator(rng):
    return simulate_path(TCP, 1.0, 2.0, rng)


def test_estimates_do_not_depend_on_thread_count():
    serial = WorkerPool(threads=1)
    parallel = WorkerPool(threads=4, chunk_size=7)
    try:
        a = montecarlo.mc_expectation(_path_functional, _path_generator, 300, seed=3, pool=serial)
        b = montecarlo.mc_expectation(_path_functional, _path_generator, 300, seed=3, pool=parallel)
    finally:
        serial.close()
        parallel.close()
    assert [s.mean for s in a] == [s.mean for s in b]
    assert [s.stderr for s in a] == [s.stderr for s in b]
    assert parallel.stats.replicas == 300


def test_non_finite_value_names_the_replica(pool):
    with pytest.raises(NumericalFailureError) as info:
        montecarlo.mc_samples(lambda i: math.inf if i == 5 else 1.0, lambda rng: rng.stream_id, 10, seed=0, pool=pool)
    assert info.value.replica == 5


def test_expectation_needs_two_replicas(pool):
    with pytest.raises(UsageError):
        montecarlo.mc_expectation(_path_functional, _path_generator, 1, seed=0, pool=pool)


def test_summarize():
    stats = montecarlo.summarize([1.0, 2.0, 3.0, 4.0], multiplier=2.0)
    assert stats.mean == 2.5
    assert stats.stderr == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert stats.ci_halfwidth == pytest.approx(2 * stats.stderr)
    assert stats.upper == pytest.approx(2.5 + stats.ci_halfwidth)
    with pytest.raises(UsageError):
        montecarlo.summarize([])
    with pytest.raises(UsageError):
        montecarlo.summarize([1.0])
    with pytest.raises(ValidationError):
        SummaryStats(n=1, mean=0.0, stderr=0.0, ci_halfwidth=0.0)


def test_empirical_distances():
    a = [0.3, 1.0, 2.5, 4.0]
    b = [x + 0.75 for x in reversed(a)]
    assert montecarlo.empirical_w1(a, b) == pytest.approx(0.75)
    assert montecarlo.empirical_wp(a, b, p=2.0) == pytest.approx(0.75)
    assert montecarlo.empirical_wp([0.0, 0.0], [0.0, 2.0], p=2.0) == pytest.approx(math.sqrt(2.0))
    with pytest.raises(UsageError):
        montecarlo.empirical_w1([1.0], [1.0, 2.0])
    with pytest.raises(UsageError):
        montecarlo.empirical_wp(a, b, p=0.5)


def test_clopper_pearson():
    lo, hi = montecarlo.clopper_pearson(0, 10, 0.95)
    assert lo == 0.0
    assert hi == pytest.approx(1 - 0.025 ** (1 / 10))
    lo, hi = montecarlo.clopper_pearson(10, 10, 0.95)
    assert hi == 1.0 and lo == pytest.approx(0.025 ** (1 / 10))
    assert montecarlo.confidence_level(3.0) == pytest.approx(0.9973, abs=1e-4)


def test_coalescence_fraction():
    outcomes = []
    for k in range(4):
        bx, by = PathBuilder(TCP, 1.0), PathBuilder(TCP, 2.0)
        coalesced = k < 3
        outcomes.append(CouplingOutcome(bx.build(2.0), by.build(2.0), coalesced=coalesced,
                                        coalescence_time=0.5 * k if coalesced else None))
    frac = montecarlo.coalescence_fraction(outcomes)
    assert frac.mean == pytest.approx(0.25)
    assert frac.interval[0] <= 0.25 <= frac.interval[1]
    early = montecarlo.coalescence_fraction(outcomes, at=0.6)
    assert early.mean == pytest.approx(0.5)


def test_rate_fit_recovers_slope():
    points = [(t, 3.0 * math.exp(-0.3 * t)) for t in np.linspace(0.0, 10.0, 21)]
    fit = montecarlo.fit_exponential_rate(points, (2.0, 10.0))
    assert fit.slope == pytest.approx(-0.3)
    assert fit.rate == pytest.approx(0.3)
    assert fit.intercept == pytest.approx(math.log(3.0))
    assert fit.n_points == 17 and fit.dropped == 0


def test_rate_fit_drops_nonpositive_points():
    points = [(1.0, 1.0), (2.0, 0.0), (3.0, math.exp(-2.0)), (4.0, math.exp(-3.0))]
    fit = montecarlo.fit_exponential_rate(points, (0.0, 5.0))
    assert fit.dropped == 1
    assert fit.slope == pytest.approx(-1.0)
    with pytest.raises(NumericalFailureError):
        montecarlo.fit_exponential_rate(points[:3], (0.0, 5.0))
    with pytest.raises(UsageError):
        montecarlo.fit_exponential_rate(points, (5.0, 1.0))


def test_thread_count_resolution(monkeypatch):
    from app.core.config import get_settings

    assert resolve_thread_count(3) == 3
    monkeypatch.setenv("LAB_THREADS", "5")
    get_settings.cache_clear()
    assert resolve_thread_count() == 5
    with pytest.raises(UsageError):
        resolve_thread_count(0)
    pool = configure_worker_pool(2)
    assert pool.threads == 2
    pool.close()
