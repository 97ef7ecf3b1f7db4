"""Box-Pierce white-noise test over image-aware lag sets.

The statistic for a length-d test sequence T is

    Q = d * sum over chosen lags l of rho_l^2,

with rho_l the lag-l autocorrelation of the standardized sequence.
Under the white-noise null Q is approximately chi-squared with one
degree of freedom per lag. For channel-last image data only lags that
are multiples of channels*width are kept (vertical autocorrelations).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateSequenceError

DEFAULT_MAX_LAG = 1200


@dataclass(frozen=True)
class LagSet:
    lags: tuple  # strictly increasing positive integers
    max_lag: int

    def __post_init__(self):
        if not self.lags:
            raise ArgumentError("lag set must be nonempty")
        if any(l < 1 for l in self.lags) or any(
            b <= a for a, b in zip(self.lags, self.lags[1:])
        ):
            raise ArgumentError("lags must be strictly increasing positive integers")

    def __len__(self):
        return len(self.lags)


@dataclass
class WnStatistic:
    q_bp: float
    k: int            # number of lags
    rho: np.ndarray   # per-lag autocorrelation estimates
    p_value: float


def standardize(T):
    """Rescale to sample mean 0 and variance 1 (divisor d)."""
    T = np.asarray(T, dtype=np.float64)
    mean = T.mean()
    var = ((T - mean) ** 2).mean()
    if var <= 0:
        raise DegenerateSequenceError("zero-variance sequence cannot be standardized")
    return (T - mean) / math.sqrt(var)


def acf(T, l):
    """Lag-l autocorrelation 1/(d-l) * sum_t T_t T_{t+l} of a standardized sequence."""
    T = np.asarray(T, dtype=np.float64)
    d = T.size
    if not 1 <= l < d:
        raise ArgumentError(f"lag {l} out of range [1, {d - 1}]")
    return float(T[: d - l] @ T[l:] / (d - l))


def vertical_lags(geometry, max_lag=DEFAULT_MAX_LAG):
    """Lags that are multiples of channels*width, up to max_lag."""
    step = geometry.channels * geometry.wd
    if max_lag < step:
        raise ArgumentError(f"max lag {max_lag} is below the first vertical lag {step}")
    return LagSet(tuple(range(step, max_lag + 1, step)), max_lag)


def all_lags(max_lag, d):
    """The unrestricted lag set {1, ..., max_lag} for a length-d sequence."""
    if not 1 <= max_lag < d:
        raise ArgumentError(f"max lag {max_lag} out of range [1, {d - 1}]")
    return LagSet(tuple(range(1, max_lag + 1)), max_lag)


def bp_statistic(T, lags):
    """Standardize T and compute the Box-Pierce statistic over the lag set."""
    T = np.asarray(T, dtype=np.float64)
    d = T.size
    if lags.lags[-1] >= d:
        raise ArgumentError(f"max lag {lags.lags[-1]} >= sequence length {d}")
    Z = standardize(T)
    rho = np.array([Z[: d - l] @ Z[l:] / (d - l) for l in lags.lags])
    q = float(d * (rho @ rho))
    k = len(lags)
    return WnStatistic(q, k, rho, chi2_sf(q, k))


def bp_statistic_rows(X, lags):
    """Row-wise Box-Pierce statistics for an (n, d) matrix.

    Degenerate (zero-variance) rows score +inf, the maximal outlier
    score. Returns the (n,) vector of q values.
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    mean = X.mean(axis=1, keepdims=True)
    var = ((X - mean) ** 2).mean(axis=1)
    ok = var > 0
    q = np.full(n, np.inf)
    if ok.any():
        Z = (X[ok] - mean[ok]) / np.sqrt(var[ok])[:, None]
        acc = np.zeros(ok.sum())
        for l in lags.lags:
            rho = (Z[:, : d - l] * Z[:, l:]).sum(axis=1) / (d - l)
            acc += rho * rho
        q[ok] = d * acc
    return q


def _gamma_p_series(a, x):
    """Lower regularized incomplete gamma by power series (x < a + 1)."""
    term = 1.0 / a
    total = term
    n = a
    for _ in range(10000):
        n += 1.0
        term *= x / n
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_contfrac(a, x):
    """Upper regularized incomplete gamma by Lentz continued fraction (x >= a + 1)."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def chi2_sf(x, k):
    """Chi-squared survival function with k degrees of freedom.

    Regularized incomplete gamma Q(k/2, x/2): series below the a+1
    crossover, continued fraction above. Absolute error <= 1e-10.
    """
    if x < 0:
        raise ArgumentError("chi2_sf requires x >= 0")
    if k < 1:
        raise ArgumentError("chi2_sf requires k >= 1")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    a = 0.5 * k
    z = 0.5 * x
    if z < a + 1.0:
        return 1.0 - _gamma_p_series(a, z)
    return _gamma_q_contfrac(a, z)


def chi2_cdf(x, k):
    return 1.0 - chi2_sf(x, k)


def calibrate_threshold(inlier_stats, target_fpr):
    """Empirical (1 - target_fpr) quantile with linear interpolation."""
    stats = np.asarray(inlier_stats, dtype=np.float64)
    if stats.size == 0:
        raise ArgumentError("need at least one inlier statistic")
    if not 0 < target_fpr < 1:
        raise ArgumentError("target_fpr must be in (0, 1)")
    return float(np.quantile(stats, 1.0 - target_fpr))
