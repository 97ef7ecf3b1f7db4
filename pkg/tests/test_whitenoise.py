import math

import numpy as np
import pytest
import scipy.stats

from wntest import errors
from wntest.tensor_io import ImageGeometry
from wntest.whitenoise import (
    LagSet,
    acf,
    all_lags,
    bp_statistic,
    bp_statistic_rows,
    calibrate_threshold,
    chi2_sf,
    standardize,
    vertical_lags,
)


def brute_force_acf(T, l):
    """O(d) double-checkable reference: explicit loop over the defining sum."""
    d = len(T)
    return sum(T[t] * T[t + l] for t in range(d - l)) / (d - l)


class TestStandardize:
    def test_constant_raises(self):
        with pytest.raises(errors.DegenerateSequenceError):
            standardize([1.0, 1.0, 1.0, 1.0])

    def test_two_point(self):
        assert np.allclose(standardize([0.0, 2.0]), [-1.0, 1.0])

    def test_random_moments(self):
        rng = np.random.default_rng(0)
        z = standardize(rng.standard_normal(1000) * 3 + 5)
        assert abs(z.mean()) < 1e-12
        assert abs((z**2).mean() - 1.0) < 1e-12


class TestAcf:
    def test_alternating(self):
        T = np.tile([1.0, -1.0], 50)
        assert acf(T, 1) == pytest.approx(-1.0)
        assert acf(T, 2) == pytest.approx(1.0)

    def test_out_of_range(self):
        with pytest.raises(errors.ArgumentError):
            acf(np.zeros(10), 0)
        with pytest.raises(errors.ArgumentError):
            acf(np.zeros(10), 10)

    def test_brute_force_oracle(self):
        rng = np.random.default_rng(1)
        T = standardize(rng.standard_normal(200))
        for l in range(1, 200):
            assert acf(T, l) == pytest.approx(brute_force_acf(T, l), abs=1e-12)


class TestLagSets:
    def test_cifar_vertical_default(self):
        ls = vertical_lags(ImageGeometry(32, 32, 3), 1200)
        assert ls.lags == tuple(range(96, 1153, 96))
        assert len(ls) == 12

    def test_small_geometry(self):
        assert vertical_lags(ImageGeometry(2, 2, 1), 4).lags == (2, 4)

    def test_below_first_multiple(self):
        with pytest.raises(errors.ArgumentError):
            vertical_lags(ImageGeometry(32, 32, 3), 95)

    def test_all_lags(self):
        assert all_lags(3, 10).lags == (1, 2, 3)
        assert all_lags(1, 10).lags == (1,)
        with pytest.raises(errors.ArgumentError):
            all_lags(10, 10)

    def test_lagset_validation(self):
        with pytest.raises(errors.ArgumentError):
            LagSet((), 0)
        with pytest.raises(errors.ArgumentError):
            LagSet((3, 2), 3)


class TestBpStatistic:
    def test_null_mean_near_one(self):
        # IID normal: Q/k concentrates near 1
        rng = np.random.default_rng(2)
        lags = all_lags(20, 3072)
        q = bp_statistic_rows(rng.standard_normal((2000, 3072)), lags)
        assert 0.93 < q.mean() / 20 < 1.07

    def test_circle_lag2_detection(self):
        from wntest.synthetic import ProcessSpec, sample_process

        X = sample_process(ProcessSpec("circle", 3072, seed=3), 50).values
        for row in X:
            s = bp_statistic(row, all_lags(5, 3072))
            assert s.rho[1] >= 0.99
            assert s.q_bp >= 3072 * s.rho[1] ** 2
            assert s.p_value < 1e-12

    def test_zero_autocorrelation_design(self):
        # quarter-period cosine: every adjacent product has a zero
        # factor, so the lag-1 autocorrelation vanishes exactly
        T = np.array([1.0, 0.0, -1.0, 0.0] * 4)
        Z = standardize(T)
        assert acf(Z, 1) == 0.0
        s = bp_statistic(T, LagSet((1,), 1))
        assert s.q_bp == pytest.approx(0.0, abs=1e-12)
        assert s.p_value == pytest.approx(1.0)

    def test_shift_scale_invariance(self):
        rng = np.random.default_rng(4)
        T = rng.standard_normal(256)
        lags = all_lags(10, 256)
        base = bp_statistic(T, lags)
        for a, b in ((2.0, 3.0), (-0.5, 100.0), (1e-6, -7.0)):
            s = bp_statistic(a * T + b, lags)
            assert s.q_bp == pytest.approx(base.q_bp, rel=1e-6)

    def test_monotone_in_lag_set(self):
        rng = np.random.default_rng(5)
        T = rng.standard_normal(512)
        prev = 0.0
        for L in (1, 2, 5, 10, 50):
            q = bp_statistic(T, all_lags(L, 512)).q_bp
            assert q >= prev - 1e-12
            prev = q

    def test_brute_force_equivalence(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            d = int(rng.integers(32, 512))
            T = rng.standard_normal(d)
            L = int(rng.integers(1, min(d - 1, 30)))
            lags = all_lags(L, d)
            s = bp_statistic(T, lags)
            Z = standardize(T)
            q_ref = d * sum(brute_force_acf(Z, l) ** 2 for l in lags.lags)
            assert s.q_bp == pytest.approx(q_ref, abs=1e-10)

    def test_degenerate_propagates(self):
        with pytest.raises(errors.DegenerateSequenceError):
            bp_statistic(np.ones(16), all_lags(2, 16))

    def test_rows_degenerate_scores_inf(self):
        X = np.vstack([np.ones(16), np.random.default_rng(0).standard_normal(16)])
        q = bp_statistic_rows(X, all_lags(2, 16))
        assert q[0] == np.inf and np.isfinite(q[1])

    def test_null_distribution_ks(self):
        rng = np.random.default_rng(7)
        q = bp_statistic_rows(rng.standard_normal((2000, 3072)), all_lags(12, 3072))
        stat = scipy.stats.kstest(q, scipy.stats.chi2(12).cdf).statistic
        assert stat < 0.05


class TestChi2Sf:
    def test_at_zero(self):
        for k in (1, 2, 5, 100):
            assert chi2_sf(0.0, k) == 1.0

    def test_quadrature_anchor(self):
        assert chi2_sf(2.705543, 1) == pytest.approx(0.100, abs=1e-4)

    def test_median_limit(self):
        assert 0.47 < chi2_sf(100, 100) < 0.50

    def test_scipy_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            k = int(rng.integers(1, 200))
            x = float(rng.uniform(0, 3 * k))
            assert chi2_sf(x, k) == pytest.approx(scipy.stats.chi2.sf(x, k), abs=1e-10)

    def test_argument_errors(self):
        with pytest.raises(errors.ArgumentError):
            chi2_sf(-1.0, 3)
        with pytest.raises(errors.ArgumentError):
            chi2_sf(1.0, 0)


class TestCalibrateThreshold:
    def test_interpolated_quantile(self):
        stats = np.arange(1.0, 101.0)
        assert calibrate_threshold(stats, 0.05) == pytest.approx(95.05)

    def test_singleton_and_ties(self):
        assert calibrate_threshold([5.0], 0.3) == 5.0
        assert calibrate_threshold([2.0] * 10, 0.05) == 2.0

    def test_order_statistics_oracle(self):
        rng = np.random.default_rng(9)
        stats = rng.standard_normal(500)
        fpr = 0.1
        s = np.sort(stats)
        pos = (len(s) - 1) * (1 - fpr)
        lo = math.floor(pos)
        ref = s[lo] + (pos - lo) * (s[lo + 1] - s[lo])
        assert calibrate_threshold(stats, fpr) == pytest.approx(ref)

    def test_errors(self):
        with pytest.raises(errors.ArgumentError):
            calibrate_threshold([], 0.05)
        with pytest.raises(errors.ArgumentError):
            calibrate_threshold([1.0], 1.5)
