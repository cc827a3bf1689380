import math

import pytest

from app.core.errors import ScheduleInfeasibleError, UsageError
from app.schemas.models import ModelSpec
from app.services import analytics
from app.services.maximal_coupling import integrate_on
from app.services.processes import tcp_survival


class TestContraction:
    def test_half_power_constants(self):
        c = analytics.contraction_constants(0.5)
        assert c.lam == pytest.approx(0.1208, abs=5e-4)
        assert c.lam == pytest.approx(math.sqrt(2) * (1 - math.sqrt(c.M)), abs=1e-8)
        assert c.alpha == pytest.approx(1 / math.sqrt(c.M) - 1, abs=1e-5)
        assert c.x0 == pytest.approx(math.sqrt(2), abs=1e-4)
        assert analytics.phi(c.u_star, 0.5) == pytest.approx(c.M)

    def test_best_exponent(self):
        c = analytics.contraction_constants(2 / 3)
        assert c.lam == pytest.approx(0.1326, abs=1e-3)
        assert c.lam > analytics.contraction_constants(0.5).lam
        assert c.lam > analytics.contraction_constants(0.8).lam

    def test_bound_at_time_zero(self):
        assert analytics.contraction_bound_sqrt(0.0, 2.0, 10.0) == pytest.approx(3.0924, abs=2e-3)

    def test_phi_domain(self):
        assert analytics.phi(0.0, 0.5) == pytest.approx(math.sqrt(0.5))
        with pytest.raises(UsageError):
            analytics.phi(1.5, 0.5)
        with pytest.raises(UsageError):
            analytics.contraction_constants(1.0)

    def test_psi_shape(self):
        c = analytics.contraction_constants(0.5)
        assert analytics.psi(0.0, c.alpha, c.x0) == pytest.approx(1 + c.alpha)
        assert analytics.psi(c.x0 + 1, c.alpha, c.x0) == 1.0
        assert analytics.v_tilde(4.0, 0.0, c.alpha, c.x0) == pytest.approx(2.0)

    def test_uniform_bound_needs_t_after_t0(self):
        assert analytics.uniform_sqrt_bound(1.0, 1.0) > analytics.uniform_sqrt_bound(5.0, 1.0)
        with pytest.raises(UsageError):
            analytics.uniform_sqrt_bound(0.5, 1.0)

    def test_constant_decreases_in_t0(self):
        values = [analytics.wasserstein_bound_constant(1.0, t0, 0.5) for t0 in (0.25, 0.5, 1.0, 2.0, 4.0)]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_contraction_variant_scales_with_gap(self):
        near = analytics.wasserstein_contraction_bound(1.0, 0.5, 5.0, 2.0, 3.0)
        far = analytics.wasserstein_contraction_bound(1.0, 0.5, 5.0, 2.0, 6.0)
        assert far == pytest.approx(near * 2 ** 0.5)
        with pytest.raises(UsageError):
            analytics.wasserstein_contraction_bound(1.0, 1.0, 5.0, 2.0, 3.0)


class TestMoments:
    def test_invariant_density(self):
        f = analytics.invariant_density
        assert integrate_on(f, 0.0, math.inf) == pytest.approx(1.0, abs=1e-8)
        assert integrate_on(lambda u: u * u * f(u), 0.0, math.inf) == pytest.approx(2.0, abs=1e-6)
        assert integrate_on(lambda u: u ** 4 * f(u), 0.0, math.inf) == pytest.approx(48 / 7, abs=1e-6)
        m1 = integrate_on(lambda u: u * f(u), 0.0, math.inf)
        lo, hi = analytics.STATIONARY_MEAN_BRACKET
        assert lo <= m1 <= hi
        m_inv = integrate_on(lambda u: f(u) / u, 0.0, math.inf)
        assert m_inv == pytest.approx(analytics.inverse_moment_from_mean(m1), rel=1e-6)

    def test_moment_sequence(self):
        m = analytics.invariant_moment_sequence(1.3, 5)
        assert m[0] == 1.0 and m[1] == 1.3
        assert m[2] == pytest.approx(2.0)
        assert m[3] == pytest.approx(8 / 3 * 1.3)
        assert m[4] == pytest.approx(48 / 7)

    def test_constant_rate_moments(self):
        assert analytics.constant_rate_moment(1.0, 0.0, 1, math.inf) == 2.0
        assert analytics.constant_rate_moment(1.0, 0.0, 2, math.inf) == pytest.approx(2 / (0.5 * 0.75))
        assert analytics.constant_rate_moment(1.0, 3.0, 1, 0.0) == pytest.approx(3.0)
        assert analytics.constant_rate_moment(2.0, 3.0, 2, 0.0) == pytest.approx(9.0)
        # first moment solves m' = 1 - (lambda/2) m
        lam, x, t = 1.5, 0.7, 1.3
        stationary = 2 / lam
        exact = stationary + (x - stationary) * math.exp(-lam * t / 2)
        assert analytics.constant_rate_moment(lam, x, 1, t) == pytest.approx(exact)

    def test_second_constant_rate_moment_solves_its_ode(self):
        # m2' = 2 m1 - (3 lambda / 4) m2
        lam, x, h = 1.5, 0.7, 1e-5
        for t in (0.3, 1.3, 4.0):
            slope = (analytics.constant_rate_moment(lam, x, 2, t + h)
                     - analytics.constant_rate_moment(lam, x, 2, t - h)) / (2 * h)
            m1 = analytics.constant_rate_moment(lam, x, 1, t)
            m2 = analytics.constant_rate_moment(lam, x, 2, t)
            assert slope == pytest.approx(2 * m1 - 0.75 * lam * m2, rel=1e-6)

    def test_deviation_bounds(self):
        low = analytics.deviation_bounds(1.0, 1.0)
        assert low.finite_time == 1.0 and not low.finite_time_valid
        high = analytics.deviation_bounds(1.0, 20.0)
        assert high.finite_time_valid and high.stationary_valid
        assert high.finite_time == pytest.approx(math.exp(-20.0 / (4 * math.e)))

    def test_moment_bound(self):
        assert analytics.wasserstein_moment_bound(1.0, 2.0) == pytest.approx(math.sqrt(2) + 1)
        with pytest.raises(UsageError):
            analytics.wasserstein_moment_bound(0.5, 1.0)


class TestTotalVariation:
    def test_alpha_fn_matches_integral(self):
        assert analytics.alpha_fn(0.0) == pytest.approx(math.sqrt(math.pi / 2))
        for x in (0.3, 2.0, 30.0):
            assert analytics.alpha_fn(x) == pytest.approx(integrate_on(lambda s: tcp_survival(x, s), 0.0, math.inf),
                                                          rel=1e-8)

    def test_coalescence_bounds(self):
        q = analytics.coalescence_bound_q(1.2, 1.0, 2.0, 0.5)
        assert 0.0 < q.quadrature < 1.0
        assert q.explicit <= q.quadrature
        with pytest.raises(UsageError):
            analytics.coalescence_bound_q(2.0, 1.0, 2.0, 0.5)

    def test_coalescence_bound_at_eps_equal_to_the_gap(self):
        # 1.05 - 1.0 rounds above 0.05
        q = analytics.coalescence_bound_q(1.05, 1.0, 3.0, 0.05)
        assert q.quadrature == pytest.approx(0.8505, abs=1e-3)
        assert q.explicit == pytest.approx(0.7973, abs=1e-3)
        assert q.explicit <= q.quadrature
        with pytest.raises(UsageError):
            analytics.coalescence_bound_q(1.05, 1.0, 3.0, 0.049)

    def test_schedule(self):
        params = analytics.plan_tv_schedule(10.0, 1.0)
        assert params.total == pytest.approx(10.0)
        assert params.t1 >= 1.0
        lam = analytics.contraction_constants(0.5).lam
        level = -math.log(params.epsilon)
        assert params.t1 == pytest.approx(1.5 / lam * level)
        assert params.t2 == pytest.approx(math.sqrt(2 * level))

    def test_infeasible_schedule(self):
        with pytest.raises(ScheduleInfeasibleError) as info:
            analytics.plan_tv_schedule(3.0, 1.0)
        assert info.value.condition == "x0 >= 2e(1 + 1/t1)"

    def test_hybrid_bound_clamps(self):
        report = analytics.tv_bound_hybrid(analytics.plan_tv_schedule(20.0))
        assert report.clamped and report.value == 1.0
        assert report.raw_value == pytest.approx(9.4015, rel=1e-2)
        assert len(analytics.hybrid_bound_terms(analytics.plan_tv_schedule(20.0))) == 6

    def test_hybrid_bound_rate(self):
        times = (20.0, 40.0, 80.0, 160.0, 320.0)
        raw = [analytics.tv_bound_hybrid(analytics.plan_tv_schedule(t)).raw_value for t in times]
        slopes = [(math.log(a) - math.log(b)) / (t2 - t1) for a, b, t1, t2 in zip(raw, raw[1:], times, times[1:])]
        assert all(b > a for a, b in zip(slopes, slopes[1:]))
        target = 2 * analytics.contraction_constants(0.5).lam / 3
        assert slopes[-1] == pytest.approx(target, abs=0.01)

    def test_closed_form_bounds(self):
        assert analytics.constant_rate_tv_bound(1.0, 0.0, 1.0, 2.0) == pytest.approx(math.exp(-1) + math.exp(-2))
        assert analytics.storage_tv_bound(1.0, 1.0, 0.0, 1.0, 2.0) == pytest.approx(math.exp(-2) + 2 * math.exp(-2))
        # equal rates are the limit of nearby rates
        assert analytics.storage_tv_bound(1.0, 1.0 + 1e-7, 0.0, 1.0, 2.0) == pytest.approx(
            analytics.storage_tv_bound(1.0, 1.0, 0.0, 1.0, 2.0), rel=1e-5
        )
        assert analytics.ergodic_tv_bound_constant(1.0, 2.0, 1.0, 1.0) == pytest.approx(
            analytics.constant_rate_tv_bound(1.0, 0.0, 1.0, 2.0)
        )
        assert analytics.ergodic_tv_bound_storage(1.0, 2.0, 1.0, 0.0, 1.0) == pytest.approx(math.exp(-1.0))

    def test_atom_lower_bound(self):
        assert analytics.atom_lower_bound(3.0, 1.0, 2.0) == pytest.approx(math.exp(-2 - 2))

    def test_bounds_misc(self):
        names = [b.bound_name for b in analytics.bounds_misc(ModelSpec.tcp_constant(1.0), 0.0, 1.0, 1.0)]
        assert names == ["wp_rate", "wp_bound", "tv_bound"]
        storage = analytics.bounds_misc(ModelSpec.storage(1.0, 2.0), 0.0, 1.0, 1.0)
        assert {b.bound_name: b.value for b in storage}["tv_rate"] == 1.0
        assert {b.bound_name: b.value for b in storage}["wp_bound"] == pytest.approx(math.exp(-2.0))
        tcp = analytics.bounds_misc(ModelSpec.tcp_variable(), 1.0, 2.0, 1.0)
        assert tcp[0].bound_name == "tv_atom_lower_bound"
        with pytest.raises(UsageError):
            analytics.bounds_misc(ModelSpec.tcp_variable(), 1.0, 2.0, -1.0)
