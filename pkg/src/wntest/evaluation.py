"""Evaluation harness: AUROC, bootstrap CIs, average ranks, histogram
intersection, and averaged ACF profiles.

Report CSV schema: setting,test,auroc,ci_low,ci_high,n_inlier,n_outlier
Profile CSV schema: lag,mean_rho,std_rho,null_std
"""

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.stats

from .errors import ArgumentError
from .whitenoise import standardize


@dataclass
class EvalReport:
    # (setting, test) -> dict with auroc, ci_low, ci_high, n_inlier, n_outlier
    cells: dict
    average_ranks: dict  # test -> rank
    histogram_intersections: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


def auroc(outlier_scores, inlier_scores):
    """Probability a random outlier scores above a random inlier (ties 0.5).

    Rank-sum implementation; +inf scores are valid and sort last.
    """
    out = np.asarray(outlier_scores, dtype=np.float64)
    inl = np.asarray(inlier_scores, dtype=np.float64)
    if out.size == 0 or inl.size == 0:
        raise ArgumentError("both score lists must be nonempty")
    ranks = scipy.stats.rankdata(np.concatenate([out, inl]))
    u = ranks[: out.size].sum() - out.size * (out.size + 1) / 2.0
    return float(u / (out.size * inl.size))


def auroc_ci(outlier_scores, inlier_scores, trials=1000, seed=0):
    """Seeded 95% percentile-bootstrap confidence interval for the AUROC."""
    out = np.asarray(outlier_scores, dtype=np.float64)
    inl = np.asarray(inlier_scores, dtype=np.float64)
    if out.size == 0 or inl.size == 0:
        raise ArgumentError("both score lists must be nonempty")
    if trials < 200:
        raise ArgumentError("need at least 200 bootstrap trials")
    rng = np.random.default_rng(seed)
    vals = np.empty(trials)
    for t in range(trials):
        vals[t] = auroc(
            out[rng.integers(0, out.size, out.size)],
            inl[rng.integers(0, inl.size, inl.size)],
        )
    low, high = np.percentile(vals, [2.5, 97.5])
    return float(low), float(high)


def average_ranks(table):
    """Average per-setting rank of each test (1 = best AUROC, ties share the mean).

    `table` maps setting -> {test -> auroc}; every setting must cover
    the same tests.
    """
    settings = list(table)
    if not settings:
        raise ArgumentError("empty table")
    tests = sorted(table[settings[0]])
    acc = {t: 0.0 for t in tests}
    for s in settings:
        if sorted(table[s]) != tests:
            raise ArgumentError(f"setting {s!r} does not cover the common test set")
        vals = np.array([table[s][t] for t in tests])
        ranks = scipy.stats.rankdata(-vals)  # descending AUROC
        for t, r in zip(tests, ranks):
            acc[t] += r
    return {t: acc[t] / len(settings) for t in tests}


def histogram_intersection(a, b, bins=50):
    """Overlap of two normalized histograms on a shared equal-width binning."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise ArgumentError("both samples must be nonempty")
    if bins < 1:
        raise ArgumentError("need at least one bin")
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    if lo == hi:
        return 1.0  # all mass in a single shared bin
    edges = np.linspace(lo, hi, bins + 1)
    pa, _ = np.histogram(a, bins=edges)
    pb, _ = np.histogram(b, bins=edges)
    return float(np.minimum(pa / a.size, pb / b.size).sum())


def acf_profile(sequences, max_lag):
    """Mean and across-sample std of the per-lag ACF, plus the null std 1/sqrt(d-l).

    Returns (lags, mean_rho, std_rho, null_std) arrays for lags 1..max_lag.
    """
    seqs = [np.asarray(s, dtype=np.float64) for s in sequences]
    if len(seqs) < 2:
        raise ArgumentError("need at least two sequences")
    d = seqs[0].size
    if not 1 <= max_lag < d:
        raise ArgumentError(f"max lag {max_lag} out of range [1, {d - 1}]")
    Z = np.stack([standardize(s) for s in seqs])
    lags = np.arange(1, max_lag + 1)
    rho = np.empty((len(seqs), max_lag))
    for i, l in enumerate(lags):
        rho[:, i] = (Z[:, : d - l] * Z[:, l:]).sum(axis=1) / (d - l)
    return lags, rho.mean(axis=0), rho.std(axis=0), 1.0 / np.sqrt(d - lags)


def write_report_csv(path, report):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["setting", "test", "auroc", "ci_low", "ci_high", "n_inlier", "n_outlier"])
        for (setting, test), cell in sorted(report.cells.items()):
            w.writerow(
                [
                    setting,
                    test,
                    f"{cell['auroc']:.6f}",
                    f"{cell['ci_low']:.6f}",
                    f"{cell['ci_high']:.6f}",
                    cell["n_inlier"],
                    cell["n_outlier"],
                ]
            )


def write_profile_csv(path, lags, mean_rho, std_rho, null_std):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["lag", "mean_rho", "std_rho", "null_std"])
        for row in zip(lags, mean_rho, std_rho, null_std):
            w.writerow([row[0], f"{row[1]:.8f}", f"{row[2]:.8f}", f"{row[3]:.8f}"])
