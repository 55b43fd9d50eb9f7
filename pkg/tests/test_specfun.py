import json
import math
import pathlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammainc

from risnoma import oracles as orc
from risnoma.specfun import (
    QuadratureRule,
    SpecFunDomainError,
    alzer_eta,
    chebyshev_gauss,
    erfc,
    erfcx,
    gamma_cdf_alzer_approx,
    gauss_2f1,
    hyp2f1_neg,
)

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


# ---------------------------------------------------------------------------
# gauss_2f1
# ---------------------------------------------------------------------------

class TestGauss2F1:
    def test_unit_at_zero(self):
        assert gauss_2f1(-0.5, 4, 0.5, 0.0) == 1.0

    def test_log_identity(self):
        # 2F1(1,1;2;z) = -ln(1-z)/z
        assert gauss_2f1(1.0, 1.0, 2.0, -1.0) == pytest.approx(math.log(2.0), rel=1e-12)

    def test_against_euler_oracle(self):
        got = gauss_2f1(-0.5, 4, 0.5, -10.0)
        want = orc.hyp2f1_euler_oracle(-0.5, 4, 10.0)
        assert got == pytest.approx(want, rel=1e-10)

    @pytest.mark.parametrize("alpha", [2.4, 3.0, 4.0])
    @pytest.mark.parametrize("z", [-0.1, -1.0, -10.0, -100.0, -1e6])
    def test_oracle_grid(self, alpha, z):
        a = -2.0 / alpha
        for m in (1, 4, 8):
            got = gauss_2f1(a, m, a + 1.0, z)
            want = orc.hyp2f1_euler_oracle(a, m, -z)
            assert got == pytest.approx(want, rel=1e-10)

    def test_positive_z_rejected(self):
        with pytest.raises(SpecFunDomainError):
            gauss_2f1(-0.5, 4, 0.5, 0.1)

    def test_nonpositive_integer_c_rejected(self):
        with pytest.raises(SpecFunDomainError):
            gauss_2f1(-1.0, 4, 0.0, -1.0)
        with pytest.raises(SpecFunDomainError):
            gauss_2f1(-0.5, 4, -2.0, -1.0)

    def test_pfaff_matches_series_on_overlap(self):
        # direct Maclaurin series is usable on (-1, 0]; both routes agree
        for z in (-0.05, -0.3, -0.6, -0.9):
            via_series = gauss_2f1(-2 / 2.4, 4, 1 - 2 / 2.4, z, method="series")
            via_pfaff = gauss_2f1(-2 / 2.4, 4, 1 - 2 / 2.4, z, method="pfaff")
            assert via_pfaff == pytest.approx(via_series, rel=1e-9)

    def test_transform_matches_pfaff(self):
        # overlap region where the Pfaff series still converges in budget
        for z in (-65.0, -200.0, -1000.0):
            t = gauss_2f1(-0.5, 4, 0.5, z, method="transform")
            p = gauss_2f1(-0.5, 4, 0.5, z, method="pfaff")
            assert t == pytest.approx(p, rel=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(alpha=st.floats(2.05, 6.0), m=st.integers(1, 8))
    def test_unit_at_zero_property(self, alpha, m):
        a = -2.0 / alpha
        assert gauss_2f1(a, m, a + 1.0, 0.0) == 1.0

    def test_vectorized_matches_scalar(self):
        zs = np.array([0.0, -0.5, -6.0, -80.0, -1e4])
        vec = hyp2f1_neg(-2 / 2.4, 4, 1 - 2 / 2.4, zs)
        for z, v in zip(zs, vec):
            assert v == pytest.approx(gauss_2f1(-2 / 2.4, 4, 1 - 2 / 2.4, float(z)),
                                      rel=1e-12)


# ---------------------------------------------------------------------------
# erfc / erfcx
# ---------------------------------------------------------------------------

class TestErfc:
    def test_at_zero(self):
        assert erfc(0.0) == 1.0

    def test_far_tail_vanishes(self):
        assert erfc(30.0) <= 1e-300

    def test_against_quadrature_oracle(self):
        assert erfc(1.0) == pytest.approx(orc.erfc_quadrature_oracle(1.0), rel=1e-12)

    @pytest.mark.parametrize("x", np.arange(0.0, 6.01, 0.5).tolist())
    def test_oracle_grid(self, x):
        assert float(erfc(x)) == pytest.approx(orc.erfc_quadrature_oracle(x), rel=1e-10)

    @settings(max_examples=80, deadline=None)
    @given(x=st.floats(-6.0, 6.0))
    def test_reflection(self, x):
        assert float(erfc(x)) + float(erfc(-x)) == pytest.approx(2.0, abs=1e-12)

    def test_monotone_decreasing(self):
        xs = np.linspace(-4, 6, 101)
        vals = erfc(xs)
        assert np.all(np.diff(vals) < 0)

    def test_erfcx_scaled_form_is_finite_at_large_argument(self):
        # e^(z^2) erfc(z) at z = 10 stays finite and matches the asymptote
        z = 10.0
        val = erfcx(z)
        asym = 1.0 / (z * math.sqrt(math.pi)) * (1 - 1 / (2 * z * z) + 3 / (4 * z**4))
        assert math.isfinite(val)
        assert val == pytest.approx(asym, rel=1e-5)

    def test_erfcx_consistent_with_erfc(self):
        for x in (0.1, 1.0, 2.5, 5.0):
            assert erfcx(x) == pytest.approx(float(erfc(x)) * math.exp(x * x), rel=1e-12)


# ---------------------------------------------------------------------------
# Chebyshev-Gauss quadrature
# ---------------------------------------------------------------------------

class TestChebyshevGauss:
    def test_order_one(self):
        rule = chebyshev_gauss(1)
        assert rule.nodes[0] == pytest.approx(0.0, abs=1e-16)
        assert rule.weights[0] == pytest.approx(math.pi)

    def test_order_two(self):
        rule = chebyshev_gauss(2)
        assert rule.nodes == pytest.approx([math.sqrt(2) / 2, -math.sqrt(2) / 2])
        assert rule.weights == pytest.approx([math.pi / 2, math.pi / 2])

    def test_semicircle_area(self):
        rule = chebyshev_gauss(64)
        val = np.sum(rule.weights * (1.0 - rule.nodes**2))
        assert val == pytest.approx(math.pi / 2, abs=1e-6)

    @settings(max_examples=40, deadline=None)
    @given(order=st.integers(1, 80))
    def test_weights_sum_to_pi(self, order):
        rule = chebyshev_gauss(order)
        assert float(np.sum(rule.weights)) == pytest.approx(math.pi, rel=1e-13)

    @settings(max_examples=30, deadline=None)
    @given(order=st.integers(2, 24), data=st.data())
    def test_exact_for_weighted_polynomials(self, order, data):
        # integral of p(x)/sqrt(1-x^2) over [-1,1] is exact for deg p < 2K;
        # odd monomials vanish, even ones have a closed Wallis form.
        deg = data.draw(st.integers(0, 2 * order - 1))
        rule = chebyshev_gauss(order)
        approx = float(np.sum(rule.weights * rule.nodes**deg))
        if deg % 2 == 1:
            assert approx == pytest.approx(0.0, abs=1e-12)
        else:
            k = deg // 2
            exact = math.pi * math.factorial(2 * k) / (4**k * math.factorial(k) ** 2)
            assert approx == pytest.approx(exact, rel=1e-12)

    def test_invariants_enforced(self):
        with pytest.raises(SpecFunDomainError):
            chebyshev_gauss(0)
        with pytest.raises(ValueError):
            QuadratureRule(order=2, nodes=np.array([0.1, 0.5]),
                           weights=np.array([1.0, 1.0]))


# ---------------------------------------------------------------------------
# Gamma-CDF approximation
# ---------------------------------------------------------------------------

class TestAlzer:
    def test_eta_at_one(self):
        assert alzer_eta(1) == pytest.approx(1.0)

    def test_eta_values(self):
        assert alzer_eta(2) == pytest.approx(math.sqrt(2.0), rel=1e-14)
        assert alzer_eta(4) == pytest.approx(4.0 * 24.0 ** (-0.25), rel=1e-14)

    def test_eta_strictly_increasing(self):
        vals = [alzer_eta(m) for m in range(1, 21)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_cdf_at_zero(self):
        for m in (1, 3, 8):
            assert gamma_cdf_alzer_approx(0.0, m) == 0.0

    def test_exact_for_exponential(self):
        assert gamma_cdf_alzer_approx(1.0, 1) == pytest.approx(1 - math.exp(-1), rel=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(m=st.integers(1, 8), x=st.floats(0.0, 50.0),
           dx=st.floats(0.0, 5.0))
    def test_monotone_in_x(self, m, x, dx):
        assert gamma_cdf_alzer_approx(x + dx, m) >= gamma_cdf_alzer_approx(x, m)

    @pytest.mark.parametrize("m", range(1, 9))
    def test_sup_distance_within_frozen_fixture(self, m):
        table = json.loads((FIXTURES / "alzer_sup_distance.json").read_text())
        x = np.linspace(0.0, 10.0, 100_001)
        measured = float(np.max(np.abs(gamma_cdf_alzer_approx(x, m)
                                       - gammainc(m, m * x))))
        assert measured <= table[str(m)] + 1e-9
