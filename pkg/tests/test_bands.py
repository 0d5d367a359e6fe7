import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bandcone.bands import (
    BandSpec,
    OutsideRegionWarning,
    band_at,
    band_curve,
    band_from_csv,
    band_from_records,
    band_to_csv,
    band_to_records,
)
from bandcone.critval import CriticalValue, GParams, critical_value
from bandcone.errors import DomainError
from bandcone.glm import FittedModel, logistic
from bandcone.numkernel import SpdMatrix
from bandcone.regions import ConvexHull, IntervalCone, cone_from_interval, rect_generators


def with_c(c, p=2):
    return CriticalValue(c=c, alpha=0.05, params=GParams(p, 1, 0.5), cdf_residual=0.0, solver_tol=1e-9)


def expit(v):
    return 1.0 / (1.0 + math.exp(-v))


@pytest.fixture(scope="module")
def aa9_spec(aa9_fit):
    summary = cone_from_interval(-1.3, 0.8, aa9_fit.fisher_inv)
    return BandSpec(aa9_fit, critical_value(0.05, summary.gparams()), IntervalCone(-1.3, 0.8))


@pytest.fixture(scope="module")
def icu_model(icu):
    return FittedModel(icu["beta_hat"], SpdMatrix(icu["fisher_inv"]), 0, 0.0, True)


class TestBandAt:
    def test_zero_width(self, aa9_fit):
        pt = band_at(np.array([1.0, 0.5]), BandSpec(aa9_fit, with_c(0.0)))
        assert pt.lin_lo == pt.lin_hi == pt.eta_hat
        assert pt.p_lo == pt.p_hi == logistic(pt.eta_hat)

    def test_published_display_at_zero_dose(self, aa9_fit):
        pt = band_at(np.array([1.0, 0.0]), BandSpec(aa9_fit, with_c(2.206)))
        half = 2.206 * math.sqrt(0.017)
        assert pt.lin_lo == pytest.approx(-0.789 - half, abs=0.006)
        assert pt.lin_hi == pytest.approx(-0.789 + half, abs=0.006)
        assert pt.p_lo == pytest.approx(expit(-0.789 - half), abs=0.002)
        assert pt.p_hi == pytest.approx(expit(-0.789 + half), abs=0.002)

    def test_icu_display_at_center(self, icu, icu_model):
        x = np.array([1.0, 62.91, 124.62])
        region = ConvexHull(np.array(rect_generators([(16, 92), (36, 256)])))
        pt = band_at(x, BandSpec(icu_model, with_c(2.789, p=3), region))
        eta = -0.962 + 0.028 * 62.91 - 0.017 * 124.62
        half = 2.789 * math.sqrt(x @ icu["fisher_inv"] @ x)
        assert pt.in_region
        assert pt.eta_hat == pytest.approx(eta, abs=1e-12)
        assert (pt.lin_lo, pt.lin_hi) == pytest.approx((eta - half, eta + half), abs=1e-12)
        # {1 + exp[-(eta -/+ half)]}^-1
        assert (pt.p_lo, pt.p_hi) == pytest.approx((expit(eta - half), expit(eta + half)), abs=1e-14)

    @given(x1=st.floats(min_value=-50, max_value=50), c=st.floats(min_value=0, max_value=10))
    def test_link_consistency_and_width(self, aa9_fit, x1, c):
        spec = BandSpec(aa9_fit, with_c(c))
        pt = band_at(np.array([1.0, x1]), spec)
        assert pt.p_lo == logistic(pt.lin_lo)
        assert pt.p_hi == logistic(pt.lin_hi)
        assert pt.lin_lo <= pt.eta_hat <= pt.lin_hi
        assert 0.0 <= pt.p_lo <= pt.p_hi <= 1.0
        assert pt.lin_hi - pt.lin_lo == pytest.approx(2 * c * pt.se, rel=1e-12, abs=1e-12)

    def test_width_linear_in_c(self, aa9_fit):
        x = np.array([1.0, 1.7])
        w1 = band_at(x, BandSpec(aa9_fit, with_c(1.0)))
        w3 = band_at(x, BandSpec(aa9_fit, with_c(3.0)))
        assert w3.lin_hi - w3.lin_lo == pytest.approx(3 * (w1.lin_hi - w1.lin_lo), rel=1e-14)

    def test_larger_region_contains_smaller(self, aa9_fit):
        small = cone_from_interval(-1.3, -0.2, aa9_fit.fisher_inv)
        large = cone_from_interval(-1.3, 2.0, aa9_fit.fisher_inv)
        for x1 in np.linspace(-1.3, -0.2, 12):
            x = np.array([1.0, x1])
            inner = band_at(x, BandSpec(aa9_fit, critical_value(0.05, small.gparams())))
            outer = band_at(x, BandSpec(aa9_fit, critical_value(0.05, large.gparams())))
            assert outer.lin_lo <= inner.lin_lo and inner.lin_hi <= outer.lin_hi
            assert outer.p_lo <= inner.p_lo and inner.p_hi <= outer.p_hi

    def test_extreme_predictor(self, aa9_fit):
        pt = band_at(np.array([1.0, 1e4]), BandSpec(aa9_fit, with_c(2.0)))
        assert 0.0 <= pt.p_lo <= pt.p_hi <= 1.0

    def test_outside_region_warns(self, aa9_spec):
        with pytest.warns(OutsideRegionWarning):
            pt = band_at(np.array([1.0, 1.5]), aa9_spec)
        assert not pt.in_region

    def test_dimension_checks(self, aa9_fit):
        with pytest.raises(DomainError):
            BandSpec(aa9_fit, with_c(2.0, p=3))
        with pytest.raises(DomainError):
            band_at(np.array([1.0, 0.0, 0.0]), BandSpec(aa9_fit, with_c(2.0)))


class TestBandCurve:
    def test_singleton(self, aa9_spec):
        x = np.array([1.0, 0.1])
        (pt,) = band_curve(aa9_spec, [x])
        ref = band_at(x, aa9_spec)
        assert (pt.lin_lo, pt.lin_hi, pt.p_lo, pt.p_hi) == (ref.lin_lo, ref.lin_hi, ref.p_lo, ref.p_hi)

    def test_grid_recomputed_independently(self, aa9_fit, aa9_spec):
        grid = [np.array([1.0, v]) for v in np.linspace(-1.3, 0.8, 101)]
        points = band_curve(aa9_spec, grid)
        f = np.asarray(aa9_fit.fisher_inv.entries)
        c = aa9_spec.critical.c
        for x, pt in zip(grid, points):
            eta = float(aa9_fit.beta_hat @ x)
            half = c * math.sqrt(x @ f @ x)
            assert pt.p_lo < pt.p_hi
            assert (pt.lin_lo, pt.lin_hi) == pytest.approx((eta - half, eta + half), abs=1e-12)
            np.testing.assert_array_equal(pt.x, x)

    def test_empty_grid(self, aa9_spec):
        with pytest.raises(DomainError):
            band_curve(aa9_spec, [])


class TestExport:
    def test_csv_round_trip(self, aa9_spec):
        points = band_curve(aa9_spec, [np.array([1.0, v]) for v in np.linspace(-1.3, 0.8, 21)])
        text = band_to_csv(points)
        assert text.splitlines()[0] == "x1,eta_hat,se,lin_lo,lin_hi,p_lo,p_hi"
        back = band_from_csv(text)
        for a, b in zip(points, back):
            np.testing.assert_allclose(b.x, a.x, rtol=0, atol=1e-12)
            for name in ("eta_hat", "se", "lin_lo", "lin_hi", "p_lo", "p_hi"):
                assert getattr(b, name) == pytest.approx(getattr(a, name), abs=1e-12)

    def test_json_round_trip_bit_exact(self, aa9_spec):
        points = band_curve(aa9_spec, [np.array([1.0, v]) for v in np.linspace(-1.3, 0.8, 21)])
        back = band_from_records(json.loads(json.dumps(band_to_records(points))))
        for a, b in zip(points, back):
            assert a.x.tobytes() == b.x.tobytes()
            for name in ("eta_hat", "se", "lin_lo", "lin_hi", "p_lo", "p_hi", "in_region"):
                assert getattr(a, name) == getattr(b, name)
