"""Synthetic processes and desk-scale validators.

Includes the Gaussian annulus demonstration, the circle process that
defeats the typicality test but not the white-noise test, and the
chi-squared null calibration check. All generators draw from numpy's
seeded PCG64 generator for exact within-implementation reproducibility.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError
from .tensor_io import RANGE_RESIDUAL, ImageGeometry, SampleMatrix
from .whitenoise import all_lags, bp_statistic_rows, chi2_cdf

KINDS = ("iid-gaussian", "circle", "ar1", "constant")


@dataclass(frozen=True)
class ProcessSpec:
    kind: str
    d: int
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ArgumentError(f"unknown process kind {self.kind!r}")
        if self.d < 1:
            raise ArgumentError("d must be >= 1")
        if self.kind == "circle" and (self.d < 4 or self.d % 2 != 0):
            raise ArgumentError("circle process requires even d >= 4")


def sample_process(spec, n):
    """Draw n samples of the process into a SampleMatrix."""
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "iid-gaussian":
        X = rng.standard_normal((n, spec.d))
    elif spec.kind == "circle":
        # (T1, T2) uniform on the radius-sqrt(2) circle, then repeated
        # with period 2: T_j = T_{j-2}. Mean square is exactly 1.
        theta = rng.uniform(0.0, 2.0 * np.pi, n)
        pair = np.stack([np.sqrt(2.0) * np.cos(theta), np.sqrt(2.0) * np.sin(theta)], axis=1)
        X = np.tile(pair, (1, spec.d // 2))
    elif spec.kind == "ar1":
        phi = float(spec.params.get("phi", 0.5))
        sigma = float(spec.params.get("sigma", 1.0))  # innovation std
        if not -1 < phi < 1:
            raise ArgumentError("ar1 requires |phi| < 1")
        X = np.empty((n, spec.d))
        X[:, 0] = rng.standard_normal(n) * sigma / math.sqrt(1.0 - phi * phi)
        eps = rng.standard_normal((n, spec.d - 1)) * sigma
        for t in range(1, spec.d):
            X[:, t] = phi * X[:, t - 1] + eps[:, t - 1]
    else:  # constant
        X = np.full((n, spec.d), float(spec.params.get("value", 0.0)))
    return SampleMatrix(ImageGeometry(1, spec.d, 1), X, RANGE_RESIDUAL)


def typicality_stat(T):
    """Mean of squares (1/d) * sum T_i^2; near 1 on the typical set."""
    T = np.asarray(T, dtype=np.float64)
    if T.size == 0:
        raise ArgumentError("empty sequence")
    return float((T * T).mean())


def typicality_demo(d, n, seed=0):
    """Gaussian annulus demonstration.

    Samples from the d-dimensional standard normal concentrate at
    radius sqrt(d), yet the log density at the origin exceeds the mean
    inlier log density by d/2.
    """
    if d < 16 or n < 100:
        raise ArgumentError("demo requires d >= 16 and n >= 100")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    norms = np.linalg.norm(X, axis=1)
    gap = float((norms**2).mean() / 2.0)  # log p(0) - mean log p(x)
    return {
        "d": d,
        "n": n,
        "mean_norm": float(norms.mean()),
        "std_norm": float(norms.std()),
        "expected_norm": math.sqrt(d),
        "log_density_gap": gap,
        "log_density_gap_target": d / 2.0,
    }


def null_calibration(d, k_lags, trials, seed=0):
    """KS distance between Box-Pierce statistics of IID Gaussian draws and chi2_k."""
    if trials < 1000:
        raise ArgumentError("need at least 1000 trials")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((trials, d))
    q = np.sort(bp_statistic_rows(X, all_lags(k_lags, d)))
    cdf = np.array([chi2_cdf(x, k_lags) for x in q])
    i = np.arange(1, trials + 1)
    ks = max(np.max(i / trials - cdf), np.max(cdf - (i - 1) / trials))
    return {
        "d": d,
        "k": k_lags,
        "trials": trials,
        "ks_distance": float(ks),
        "mean_q_over_k": float(q.mean() / k_lags),
    }
