import math

import numpy as np
import pytest
from scipy import stats

from app.core.errors import UsageError
from app.core.rng import RngStream
from app.schemas.models import ModelSpec
from app.services import analytics, montecarlo
from app.services.processes import (
    flow,
    sample_tcp_jump_time,
    simulate_path,
    tcp_jump_density,
    tcp_jump_time,
    tcp_survival,
)
from app.services.trajectory import PathBuilder, Trajectory


def test_jump_time_inverts_survival():
    for x in (0.0, 0.5, 3.0, 40.0):
        for e in (1e-6, 0.3, 2.0, 15.0):
            assert tcp_survival(x, tcp_jump_time(x, e)) == pytest.approx(math.exp(-e), rel=1e-9)


def test_jump_time_is_stable_for_large_states():
    # sqrt(x^2 + 2) - x computed naively loses every digit at this size
    assert tcp_jump_time(1e8, 1.0) == pytest.approx(1e-8, rel=1e-9)


def test_sampled_jump_times_follow_their_law():
    rng = RngStream(3, 0)
    x = 1.5
    draws = [sample_tcp_jump_time(x, rng) for _ in range(4000)]
    result = stats.kstest(draws, lambda s: 1 - np.exp(-s * s / 2 - x * s))
    assert result.pvalue > 1e-3


@pytest.mark.parametrize("x", [0.0, 1.0, 5.0])
def test_survival_frequencies_on_a_grid(x):
    n = 100_000
    rng = RngStream(21, int(x))
    draws = np.array([sample_tcp_jump_time(x, rng) for _ in range(n)])
    for t in (0.25, 0.5, 1.0, 2.0):
        exact = tcp_survival(x, t)
        # floor keeps the far tail (x = 5, t = 2) from demanding zero hits
        stderr = math.sqrt(max(exact * (1 - exact), 1.0 / n) / n)
        assert abs(np.mean(draws > t) - exact) <= 4 * stderr


def test_jump_density_integrates_to_one():
    tcp_jump_density(2.0).validate()
    tcp_jump_density(0.0).validate()


def test_flow():
    storage = ModelSpec.storage(1.0, 2.0)
    assert flow(ModelSpec.tcp_variable(), 1.5, 2.0) == 3.5
    assert flow(storage, 3.0, 0.5) == pytest.approx(3.0 * math.exp(-1.0))
    with pytest.raises(UsageError):
        flow(storage, 1.0, -0.1)


def test_tcp_path_is_consistent(tcp, rng):
    traj = simulate_path(tcp, 2.0, 10.0, rng)
    traj.validate()
    assert traj.n_jumps > 0
    for k, (tk, post) in enumerate(zip(traj.jump_times, traj.post_jump_values)):
        assert traj.evaluate(tk) == post
        assert post == pytest.approx(traj.pre_jump_value(k) / 2)
    assert traj.evaluate(0.0) == 2.0


def test_storage_path_jumps_up(rng):
    model = ModelSpec.storage(2.0, 1.0)
    traj = simulate_path(model, 1.0, 5.0, rng)
    traj.validate()
    assert all(v > traj.pre_jump_value(k) for k, v in enumerate(traj.post_jump_values))


def test_same_stream_same_path(tcp):
    a = simulate_path(tcp, 1.0, 8.0, RngStream(9, 4))
    b = simulate_path(tcp, 1.0, 8.0, RngStream(9, 4))
    c = simulate_path(tcp, 1.0, 8.0, RngStream(9, 5))
    assert a == b
    assert a.jump_times != c.jump_times


def test_evaluate_outside_horizon(tcp, rng):
    traj = simulate_path(tcp, 1.0, 2.0, rng)
    with pytest.raises(UsageError):
        traj.evaluate(2.5)
    with pytest.raises(UsageError):
        traj.evaluate(-0.1)


def test_bad_inputs(tcp, rng):
    with pytest.raises(UsageError):
        simulate_path(tcp, 1.0, 0.0, rng)
    with pytest.raises(UsageError):
        simulate_path(tcp, -1.0, 1.0, rng)
    with pytest.raises(UsageError):
        PathBuilder(ModelSpec.storage(1.0, 1.0), 0.0).jump(0.5)
    with pytest.raises(UsageError):
        Trajectory(tcp, 1.0, 1.0, jump_times=(0.5,), post_jump_values=())


def test_validate_rejects_wrong_jump_map(tcp):
    traj = Trajectory(tcp, 1.0, 2.0, jump_times=(1.0,), post_jump_values=(1.5,))
    with pytest.raises(UsageError):
        traj.validate()
    unordered = Trajectory(tcp, 1.0, 2.0, jump_times=(1.0, 0.5), post_jump_values=(1.0, 0.75))
    with pytest.raises(UsageError):
        unordered.validate()


def test_builder_truncates_at_horizon(tcp):
    builder = PathBuilder(tcp, 1.0)
    builder.jump(0.5)
    builder.jump(3.0)
    traj = builder.build(2.0)
    assert traj.jump_times == (0.5,)
    assert traj.evaluate(2.0) == pytest.approx(0.75 + 1.5)


def test_constant_rate_jump_count(pool):
    model = ModelSpec.tcp_constant(2.0)
    est = montecarlo.mc_expectation(
        lambda traj: traj.n_jumps,
        lambda r: simulate_path(model, 1.0, 3.0, r),
        4000, seed=21, pool=pool,
    )[0]
    assert abs(est.mean - 6.0) <= 4 * est.stderr


def test_storage_mean(pool):
    alpha, beta, x, t = 1.0, 2.0, 0.0, 1.0
    model = ModelSpec.storage(alpha, beta)
    est = montecarlo.mc_expectation(
        lambda traj: traj.evaluate(t),
        lambda r: simulate_path(model, x, t, r),
        4000, seed=5, pool=pool,
    )[0]
    exact = alpha / beta + (x - alpha / beta) * math.exp(-beta * t)
    assert abs(est.mean - exact) <= 4 * est.stderr


def test_rejoin_restarts_the_flow(tcp):
    builder = PathBuilder(tcp, 1.0)
    builder.jump(0.5)
    builder.rejoin(1.0, 2.0)
    assert builder.state_at(1.5) == 2.5
    builder.jump(2.0)
    traj = builder.build(3.0)
    assert traj.evaluate(0.75) == pytest.approx(1.0)
    assert traj.evaluate(1.0) == 2.0
    assert traj.pre_jump_value(1) == 3.0
    assert traj.evaluate(3.0) == 2.5
    traj.validate()
    with pytest.raises(UsageError):
        builder.rejoin(1.5, 1.0)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("x", [0.0, 5.0, 20.0])
def test_moments_stay_below_the_uniform_bound(pool, tcp, x, t):
    powers = (1, 2, 4)
    est = montecarlo.mc_expectation(
        lambda traj: [traj.evaluate(t) ** p for p in powers],
        lambda r: simulate_path(tcp, x, t, r),
        2000, seed=23, pool=pool,
    )
    for p, e in zip(powers, est):
        assert e.mean - 3 * e.stderr <= analytics.wasserstein_moment_bound(p, t)


@pytest.mark.parametrize("t", [1.0, 2.0])
@pytest.mark.parametrize("x", [0.0, 20.0])
def test_tail_stays_below_the_deviation_bound(pool, tcp, x, t):
    threshold = 2 * math.e * (1 + 1 / t)
    levels = (threshold, threshold + 1.0, threshold + 3.0)
    est = montecarlo.mc_expectation(
        lambda traj: [1.0 if traj.evaluate(t) >= r else 0.0 for r in levels],
        lambda r: simulate_path(tcp, x, t, r),
        4000, seed=24, pool=pool,
    )
    for r, e in zip(levels, est):
        bound = analytics.deviation_bounds(t, r)
        assert bound.finite_time_valid
        assert e.mean - 3 * e.stderr <= bound.finite_time
