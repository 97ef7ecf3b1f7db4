import numpy as np
import pytest

from wntest import errors
from wntest.synthetic import (
    ProcessSpec,
    null_calibration,
    sample_process,
    typicality_demo,
    typicality_stat,
)
from wntest.whitenoise import acf, all_lags, bp_statistic, standardize


class TestSampleProcess:
    def test_circle_mean_square_exact(self):
        X = sample_process(ProcessSpec("circle", 64, seed=0), 100).values
        for row in X:
            assert typicality_stat(row) == pytest.approx(1.0, abs=1e-12)

    def test_circle_period_two(self):
        X = sample_process(ProcessSpec("circle", 10, seed=1), 5).values
        assert np.array_equal(X[:, 2:], X[:, :-2])

    def test_circle_odd_d_rejected(self):
        with pytest.raises(errors.ArgumentError):
            ProcessSpec("circle", 7)

    def test_constant(self):
        X = sample_process(ProcessSpec("constant", 16, {"value": 3.5}), 4).values
        assert np.all(X == 3.5)

    def test_ar1_autocorrelation(self):
        X = sample_process(ProcessSpec("ar1", 4096, {"phi": 0.5}, seed=2), 1).values
        z = standardize(X[0])
        assert acf(z, 1) == pytest.approx(0.5, abs=0.1)

    def test_reproducible(self):
        spec = ProcessSpec("iid-gaussian", 32, seed=5)
        assert np.array_equal(sample_process(spec, 10).values, sample_process(spec, 10).values)

    def test_unknown_kind(self):
        with pytest.raises(errors.ArgumentError):
            ProcessSpec("brownian", 8)


class TestTypicality:
    def test_stat_zero_vector(self):
        assert typicality_stat(np.zeros(10)) == 0.0

    def test_stat_iid_concentrates(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            assert 0.9 < typicality_stat(rng.standard_normal(3072)) < 1.1

    def test_demo_high_dimension(self):
        rep = typicality_demo(3072, 2000, seed=4)
        root_d = np.sqrt(3072)
        assert 0.98 * root_d < rep["mean_norm"] < 1.02 * root_d
        assert rep["std_norm"] < 1.5
        assert abs(rep["log_density_gap"] - 1536) < 0.03 * 1536

    def test_demo_low_dimension_rejected(self):
        with pytest.raises(errors.ArgumentError):
            typicality_demo(1, 2000)


class TestNullCalibration:
    def test_high_dimension_calibrated(self):
        rep = null_calibration(3072, 12, 2000, seed=5)
        assert rep["ks_distance"] < 0.05
        assert 0.93 < rep["mean_q_over_k"] < 1.07

    def test_low_dimension_degrades(self):
        # aggregate over seeds: finite-d bias makes the fit strictly worse
        ks_small = np.mean([null_calibration(32, 12, 1000, seed=s)["ks_distance"] for s in range(3)])
        ks_large = np.mean([null_calibration(3072, 12, 1000, seed=s)["ks_distance"] for s in range(3)])
        assert ks_small > ks_large

    def test_single_lag(self):
        rep = null_calibration(10000, 1, 2000, seed=6)
        assert rep["ks_distance"] < 0.03

    def test_trial_floor(self):
        with pytest.raises(errors.ArgumentError):
            null_calibration(64, 2, 10)


def test_circle_defeats_typicality_not_wn():
    X = sample_process(ProcessSpec("circle", 512, seed=7), 200).values
    lags = all_lags(4, 512)
    for row in X:
        assert typicality_stat(row) == pytest.approx(1.0, abs=1e-12)
        assert bp_statistic(row, lags).p_value < 1e-9
