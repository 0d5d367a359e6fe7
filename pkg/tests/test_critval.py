import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from bandcone.critval import GParams, cdf_G, critical_value, m_func, oracle_cdf_G
from bandcone.errors import DomainError


def scipy_cdf_G(g, p, r, a):
    """Literal P(G <= g) with scipy distributions and quadrature."""
    if a == 0 or r == p:
        return stats.chi2.cdf(g, p)

    def integrand(w):
        t = min(1.0, math.sqrt(g / w))
        m = (a * t - math.sqrt((1 - a * a) * (1 - t * t))) ** 2
        return stats.beta.cdf(m, r / 2, (p - r) / 2) * stats.chi2.pdf(w, p)

    upper = g / (1 - a * a) if a < 1 else np.inf
    tail, _ = integrate.quad(integrand, g, upper, epsabs=1e-13, epsrel=1e-12, limit=200)
    return stats.chi2.cdf(g, p) + tail


class TestMFunc:
    def test_at_one(self):
        assert m_func(1.0, 0.5) == pytest.approx(0.25)

    def test_zero(self):
        a = 0.9193
        assert m_func(math.sqrt(1 - a * a), a) == pytest.approx(0.0, abs=1e-15)

    def test_arithmetic(self):
        # (.72 - sqrt(.36 * .19))^2 evaluated in 30-digit mpmath
        assert m_func(0.9, 0.8) == pytest.approx(0.2101911312780858, abs=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            m_func(1.1, 0.5)
        with pytest.raises(DomainError):
            m_func(0.5, -0.1)


class TestCdfG:
    def test_scheffe_limit(self):
        assert cdf_G(5.9915, GParams(2, 1, 0.0)) == pytest.approx(0.95, abs=5e-5)

    def test_pointwise_limit(self):
        assert cdf_G(3.8415, GParams(2, 1, 1.0)) == pytest.approx(0.95, abs=5e-5)
        assert cdf_G(7.3, GParams(4, 2, 1.0)) == pytest.approx(stats.chi2.cdf(7.3, 2), abs=1e-10)

    def test_published_row(self):
        assert cdf_G(2.206**2, GParams(2, 1, 0.9193)) == pytest.approx(0.95, abs=1e-3)

    def test_full_subspace(self):
        for a in (0.0, 0.4, 1.0):
            assert cdf_G(6.1, GParams(3, 3, a)) == pytest.approx(stats.chi2.cdf(6.1, 3), abs=1e-13)

    @pytest.mark.parametrize("p, r", [(2, 1), (3, 1), (3, 2), (4, 1), (5, 2), (5, 4)])
    @pytest.mark.parametrize("a", [0.1, 0.5, 0.9, 0.99, 0.999])
    def test_matches_scipy_quadrature(self, p, r, a):
        for g in (0.5, 2.0, 5.0, 12.0):
            assert cdf_G(g, GParams(p, r, a)) == pytest.approx(scipy_cdf_G(g, p, r, a), abs=1e-9)

    @given(
        g=st.floats(min_value=0.01, max_value=30.0),
        a=st.floats(min_value=0.0, max_value=0.98),
        pr=st.sampled_from([(2, 1), (3, 1), (3, 2), (5, 2)]),
    )
    def test_angle_and_direct_forms_agree(self, g, a, pr):
        params = GParams(*pr, a)
        assert cdf_G(g, params, method="angle") == pytest.approx(cdf_G(g, params, method="direct"), abs=1e-9)

    def test_monotone_and_continuous(self):
        params = GParams(3, 1, 0.7)
        grid = np.linspace(0.0, 25.0, 501)
        values = np.array([cdf_G(g, params) for g in grid])
        assert np.all(np.diff(values) >= -1e-12)
        assert np.max(np.diff(values)) < 0.02
        assert values[0] == 0.0 and values[-1] <= 1.0

    def test_bounded_by_limits(self):
        for g in (1.0, 4.0, 9.0):
            cdf = cdf_G(g, GParams(3, 1, 0.6))
            assert stats.chi2.cdf(g, 3) - 1e-12 <= cdf <= stats.chi2.cdf(g, 1) + 1e-12

    def test_domain(self):
        with pytest.raises(DomainError):
            cdf_G(-1.0, GParams(2, 1, 0.5))
        with pytest.raises(DomainError):
            cdf_G(1.0, GParams(2, 1, 0.5), method="simpson")
        with pytest.raises(DomainError):
            cdf_G(1.0, GParams(2, 1, 1.0), method="direct")


class TestCriticalValue:
    @pytest.mark.parametrize("a, c", [(0.7233, 2.344), (0.9193, 2.206), (0.9887, 2.067)])
    def test_table_3_2(self, a, c):
        assert critical_value(0.05, GParams(2, 1, a)).c == pytest.approx(c, abs=0.002)

    @pytest.mark.parametrize("a, c", [(0.2383, 2.789), (0.9731, 2.220), (0.9200, 2.374)])
    def test_table_3_3(self, a, c):
        assert critical_value(0.05, GParams(3, 1, a)).c == pytest.approx(c, abs=0.002)

    @pytest.mark.parametrize("p", [1, 2, 3, 6])
    def test_pointwise(self, p):
        assert critical_value(0.05, GParams(p, 1, 1.0)).c == pytest.approx(1.959964, abs=1e-6)

    @given(
        alpha=st.floats(min_value=0.001, max_value=0.5),
        a=st.floats(min_value=0.0, max_value=1.0),
        pr=st.sampled_from([(2, 1), (3, 1), (3, 2), (4, 3), (5, 2)]),
    )
    def test_bracket_and_residual(self, alpha, a, pr):
        p, r = pr
        crit = critical_value(alpha, GParams(p, r, a))
        lo = math.sqrt(stats.chi2.ppf(1 - alpha, r))
        hi = math.sqrt(stats.chi2.ppf(1 - alpha, p))
        assert lo - 1e-6 <= crit.c <= hi + 1e-6
        assert abs(crit.cdf_residual) <= 1e-9
        assert abs(cdf_G(crit.c**2, crit.params) - (1 - alpha)) <= 1e-9

    @pytest.mark.parametrize("p, r", [(2, 1), (3, 1), (4, 2)])
    def test_nonincreasing_in_a(self, p, r):
        cs = [critical_value(0.05, GParams(p, r, a)).c for a in np.linspace(0, 1, 11)]
        assert all(x >= y for x, y in zip(cs, cs[1:]))
        assert cs[0] == pytest.approx(math.sqrt(stats.chi2.ppf(0.95, p)), abs=1e-6)
        assert cs[-1] == pytest.approx(math.sqrt(stats.chi2.ppf(0.95, r)), abs=1e-6)

    def test_nested_intervals_narrower(self, aa9_fit):
        from bandcone.regions import cone_from_interval

        inner = cone_from_interval(-1.3, 0.8, aa9_fit.fisher_inv)
        outer = cone_from_interval(-1.3, 2.0, aa9_fit.fisher_inv)
        assert critical_value(0.05, inner.gparams()).c <= critical_value(0.05, outer.gparams()).c

    def test_alpha_domain(self):
        for bad in (0.0, 1.0, -0.1):
            with pytest.raises(DomainError):
                critical_value(bad, GParams(2, 1, 0.5))

    def test_params_validation(self):
        with pytest.raises(DomainError):
            GParams(2, 3, 0.5)
        with pytest.raises(DomainError):
            GParams(2, 1, 1.5)
        with pytest.raises(DomainError):
            GParams(0, 1, 0.5)


class TestOracle:
    grid = [0.5, 1.5, 3.0, 5.0, 8.0]

    def test_scheffe_case(self):
        for g, prob, se in oracle_cdf_G(GParams(3, 1, 0.0), self.grid, 200_000, seed=1):
            assert abs(prob - stats.chi2.cdf(g, 3)) <= 3 * se

    def test_pointwise_case(self):
        for g, prob, se in oracle_cdf_G(GParams(3, 1, 1.0), self.grid, 200_000, seed=2):
            assert abs(prob - stats.chi2.cdf(g, 1)) <= 3 * se

    def test_matches_quadrature(self):
        params = GParams(3, 1, 0.5)
        qs = np.linspace(0.05, 0.95, 10)
        grid = [critical_value(1 - q, params).c ** 2 for q in qs]
        for g, prob, se in oracle_cdf_G(params, grid, 1_000_000, seed=3):
            assert abs(prob - cdf_G(g, params)) <= 3 * se

    def test_deterministic_across_workers(self):
        params = GParams(5, 2, 0.75)
        one = oracle_cdf_G(params, self.grid, 150_000, seed=9, workers=1)
        many = oracle_cdf_G(params, self.grid, 150_000, seed=9, workers=4)
        assert one == many
        assert one != oracle_cdf_G(params, self.grid, 150_000, seed=10)

    def test_minimum_draws(self):
        with pytest.raises(DomainError):
            oracle_cdf_G(GParams(2, 1, 0.5), [1.0], 9_999, seed=0)
