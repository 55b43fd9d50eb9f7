import dataclasses
import math

import numpy as np
import pytest

from risnoma import analytics as an
from risnoma.analytics import (
    AnalyticsError,
    Thresholds,
    coverage_connected,
    coverage_typical,
    coverage_typical_alpha2,
    coverage_typical_alpha4,
    coverage_typical_asymptotic_L,
    ergodic_connected,
    ergodic_slope_L,
    ergodic_typical,
    ergodic_typical_alpha2,
    ergodic_typical_alpha4,
    laplace_connected,
    laplace_typical_ris,
)
from risnoma.config import default_system, default_thresholds, dbm_to_watts


@pytest.fixture(scope="module")
def sys0():
    return default_system()


@pytest.fixture(scope="module")
def th0():
    return default_thresholds()


class TestThresholds:
    def test_from_rates(self):
        th = Thresholds.from_rates(R_t=1e6, R_c=2e6, gamma_sic_th=0.01, B_w=1e7)
        assert th.gamma_t_th == pytest.approx(2.0**0.1 - 1.0)
        assert th.gamma_c_th == pytest.approx(2.0**0.2 - 1.0)

    def test_nonnegative(self):
        with pytest.raises(ValueError):
            Thresholds(gamma_sic_th=-0.1, gamma_t_th=0.01, gamma_c_th=0.01)


class TestLaplaceTransforms:
    def test_unit_at_zero(self, sys0):
        assert laplace_connected(0.0, sys0).value == 1.0
        assert laplace_typical_ris(0.0, 300.0, 17.0, sys0).value == 1.0

    def test_vanishing_density_limit(self, sys0):
        thin = sys0.with_spatial(lambda_b=1e-30, sim_radius=1e16)
        for s in (1e8, 1e12, 1e16):
            assert laplace_connected(s, thin).value == pytest.approx(1.0, abs=1e-9)

    def test_monotone_decreasing_and_log_convex(self, sys0):
        s_grid = np.logspace(8, 14, 25)
        for fn in (lambda s: laplace_connected(s, sys0).value,
                   lambda s: laplace_typical_ris(s, 300.0, 17.0, sys0).value):
            vals = np.array([fn(float(s)) for s in s_grid])
            assert np.all(np.diff(vals) < 0)
            logs = np.log(vals)
            assert np.all(np.diff(logs, 2) >= -1e-9)

    def test_values_in_unit_interval(self, sys0):
        for s in np.logspace(6, 16, 11):
            v = laplace_connected(float(s), sys0).value
            assert 0.0 < v <= 1.0


class TestCoverageTypical:
    def test_infeasible_sic_returns_zero_with_flag(self, sys0):
        th = Thresholds(gamma_sic_th=1.6, gamma_t_th=0.01, gamma_c_th=0.01)
        res = coverage_typical(sys0, th)
        assert res.value == 0.0
        assert res.diagnostics["infeasible"]

    def test_vanishes_at_sic_feasibility_edge(self, sys0):
        # gamma_sic_th -> a_c/a_t from below sends the threshold parameter
        # to infinity and the coverage to zero
        th = Thresholds(gamma_sic_th=1.4999999, gamma_t_th=0.01, gamma_c_th=0.01)
        assert coverage_typical(sys0, th).value < 1e-6

    def test_zero_thresholds_give_certain_coverage(self, sys0):
        th = Thresholds(gamma_sic_th=0.0, gamma_t_th=0.0, gamma_c_th=0.0)
        assert coverage_typical(sys0, th).value == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("field", ["gamma_t_th", "gamma_sic_th"])
    def test_monotone_in_thresholds(self, sys0, th0, field):
        vals = []
        for g in (0.005, 0.01, 0.05, 0.2):
            th = dataclasses.replace(th0, **{field: g})
            vals.append(coverage_typical(sys0, th).value)
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_monotone_in_noise(self, sys0, th0):
        vals = []
        for extra_db in (0.0, 3.0, 6.0, 10.0):
            s = sys0.with_power(sigma2=dbm_to_watts(-90.0 + extra_db))
            vals.append(coverage_typical(s, th0).value)
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_diagnostics_present(self, sys0, th0):
        res = coverage_typical(sys0, th0)
        assert "quadrature_scale" in res.diagnostics
        assert "f21_terms" in res.diagnostics
        assert "pre_clamp" in res.diagnostics

    def test_clamp_policy(self):
        diag = {}
        assert an._clamp_probability(1.005, diag) == 1.0
        assert diag["clamped"]
        with pytest.raises(AnalyticsError):
            an._clamp_probability(1.05, {})
        with pytest.raises(AnalyticsError):
            an._clamp_probability(-0.05, {})


class TestCoverageConnected:
    def test_limit_one_via_binomial_telescoping(self, sys0):
        # vanishing threshold, noise, and density: every exponent is zero
        # and the alternating binomial sum collapses to one
        th = Thresholds(gamma_sic_th=0.01, gamma_t_th=0.01, gamma_c_th=0.0)
        clean = sys0.with_power(sigma2=0.0).with_spatial(lambda_b=1e-30,
                                                         sim_radius=1e16)
        assert coverage_connected(clean, th).value == pytest.approx(1.0, abs=1e-12)

    def test_decreasing_in_link_distance(self, sys0, th0):
        near = coverage_connected(sys0.with_spatial(r_c=50.0), th0).value
        far = coverage_connected(sys0.with_spatial(r_c=100.0), th0).value
        assert far < near

    def test_monotone_in_density(self, sys0, th0):
        from risnoma.geometry import default_sim_radius
        vals = []
        for lam in (1e-6, 3e-6, 1e-5, 3e-5):
            s = sys0.with_spatial(lambda_b=lam, sim_radius=default_sim_radius(lam))
            vals.append(coverage_connected(s, th0).value)
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_infeasible_threshold(self, sys0):
        th = Thresholds(gamma_sic_th=0.01, gamma_t_th=0.01, gamma_c_th=2.0)
        res = coverage_connected(sys0, th)
        assert res.value == 0.0
        assert res.diagnostics["infeasible"]


class TestClosedFormsAlpha4:
    def test_matches_reference_integral(self, sys0, th0):
        s4 = sys0.with_channel(alpha_t=4.0)
        ref = coverage_typical(s4, th0).value
        cor = coverage_typical_alpha4(s4, th0, order=200).value
        assert cor == pytest.approx(ref, rel=1e-3)

    def test_order_convergence(self, sys0, th0):
        s4 = sys0.with_channel(alpha_t=4.0)
        a = coverage_typical_alpha4(s4, th0, order=200).value
        b = coverage_typical_alpha4(s4, th0, order=400).value
        assert b == pytest.approx(a, rel=1e-6)

    def test_requires_exponent_four(self, sys0, th0):
        with pytest.raises(ValueError):
            coverage_typical_alpha4(sys0, th0)

    def test_rate_closed_form(self, sys0, th0):
        s4 = sys0.with_channel(alpha_t=4.0)
        ref = ergodic_typical(s4, th0).value
        cor = ergodic_typical_alpha4(s4, th0).value
        assert cor == pytest.approx(ref, rel=1e-2)

    def test_rate_orders_converge(self, sys0, th0):
        s4 = sys0.with_channel(alpha_t=4.0)
        a = ergodic_typical_alpha4(s4, th0, order_k=150, order_j=150, order_v=150).value
        b = ergodic_typical_alpha4(s4, th0, order_k=300, order_j=300, order_v=300).value
        assert b == pytest.approx(a, rel=1e-4)


class TestClosedFormsAlpha2:
    def test_gap_reported_not_asserted(self, sys0, th0):
        s2 = sys0.with_channel(alpha_t=2.0)
        res = coverage_typical_alpha2(s2, th0)
        d = res.diagnostics
        assert res.value == d["closed_form"]
        assert "reference_integral" in d and "gap" in d
        assert math.isfinite(d["gap"])

    def test_vanishing_density_limit(self, sys0, th0):
        s2 = sys0.with_channel(alpha_t=2.0).with_spatial(lambda_b=1e-28,
                                                         sim_radius=1e15)
        assert abs(coverage_typical_alpha2(s2, th0).value) < 1e-12

    def test_single_term_at_unit_shape(self, sys0, th0):
        s2 = sys0.with_channel(alpha_t=2.0, m_t=1)
        res = coverage_typical_alpha2(s2, th0)
        assert math.isfinite(res.value)

    def test_rate_twin_reports(self, sys0, th0):
        s2 = sys0.with_channel(alpha_t=2.0)
        res = ergodic_typical_alpha2(s2, th0)
        assert math.isfinite(res.value)
        assert "gap" in res.diagnostics

    def test_rate_orders_converge(self, sys0, th0):
        s2 = sys0.with_channel(alpha_t=2.0)
        a = ergodic_typical_alpha2(s2, th0, order_j=150, order_v=150).value
        b = ergodic_typical_alpha2(s2, th0, order_j=300, order_v=300).value
        assert b == pytest.approx(a, rel=1e-3)


class TestAsymptotics:
    def test_limit_reached_as_noise_vanishes(self, sys0, th0):
        quiet = sys0.with_power(sigma2=1e-24)
        asym, lim = coverage_typical_asymptotic_L(quiet, th0)
        assert asym.value == pytest.approx(lim.value, rel=1e-8)

    def test_limit_independent_of_aperture_and_noise(self, sys0, th0):
        _, lim_a = coverage_typical_asymptotic_L(sys0.with_channel(L=1.0), th0)
        _, lim_b = coverage_typical_asymptotic_L(
            sys0.with_channel(L=40.0).with_power(sigma2=1e-9), th0)
        assert lim_a.value == pytest.approx(lim_b.value, rel=1e-12)

    def test_limit_close_to_integral_at_large_aperture(self, sys0, th0):
        s20 = sys0.with_channel(L=20.0)
        ref = coverage_typical(s20, th0).value
        _, lim = coverage_typical_asymptotic_L(s20, th0)
        assert abs(ref - lim.value) <= 0.05


class TestErgodicTypical:
    def test_vanishing_typical_share(self, sys0):
        th = Thresholds(gamma_sic_th=0.01, gamma_t_th=0.01, gamma_c_th=0.01)
        s = sys0.with_power(a_c=1.0 - 1e-9, a_t=1e-9)
        assert ergodic_typical(s, th).value < 1e-6

    def test_rate_non_decreasing_in_aperture_unthinned(self, sys0, th0):
        vals = []
        for L in (0.75, 1.5, 3.0):
            s = sys0.with_channel(L=L, rho_t=0.0)
            vals.append(ergodic_typical(s, th0).value)
        assert vals[0] <= vals[1] <= vals[2]

    def test_rate_integral_consistency(self, sys0, th0):
        """The rate equals the threshold-integrated coverage curve; the
        brute-force route below shares no intermediate state with the
        split-integral implementation."""
        direct = ergodic_typical(sys0, th0).value
        nodes, weights = np.polynomial.legendre.leggauss(24)
        total = 0.0
        lo = 1e-6
        for _ in range(24):
            hi = lo * 4.0
            z = 0.5 * (hi + lo) + 0.5 * (hi - lo) * nodes
            wz = 0.5 * (hi - lo) * weights
            cov = np.array([
                coverage_typical(sys0, dataclasses.replace(th0, gamma_t_th=float(g))).value
                for g in z])
            contrib = float(np.sum(wz * cov / (1.0 + z)))
            total += contrib
            lo = hi
            if contrib < 1e-9 * total:
                break
        brute = total / math.log(2.0)
        assert direct == pytest.approx(brute, rel=1e-3)


class TestErgodicConnected:
    def test_distant_link_starves(self, sys0, th0):
        s = sys0.with_spatial(r_c=1e5, sim_radius=1e9)
        assert ergodic_connected(s, th0).value < 1e-3

    def test_strictly_decreasing_in_distance(self, sys0, th0):
        vals = [ergodic_connected(sys0.with_spatial(r_c=r), th0).value
                for r in (50.0, 75.0, 100.0)]
        assert vals[0] > vals[1] > vals[2]

    def test_order_convergence(self, sys0, th0):
        a = ergodic_connected(sys0, th0, order=200).value
        b = ergodic_connected(sys0, th0, order=400).value
        assert b == pytest.approx(a, rel=1e-6)


class TestSlope:
    def test_synthetic_saturating_curve(self, sys0, th0):
        # the functional form C1 - C2/L^2 fits to an asymptotically flat line
        slope = ergodic_slope_L(sys0, th0, (10.0, 30.0, 100.0, 300.0),
                                rate_fn=lambda L: 2.0 - 5.0 / L**2).value
        assert abs(slope) < 1e-3

    def test_constant_curve_zero_slope(self, sys0, th0):
        slope = ergodic_slope_L(sys0, th0, (10.0, 30.0, 100.0, 300.0),
                                rate_fn=lambda L: 1.25).value
        assert slope == pytest.approx(0.0, abs=1e-12)

    def test_needs_two_points(self, sys0, th0):
        with pytest.raises(ValueError):
            ergodic_slope_L(sys0, th0, (10.0,))
