"""Null calibration of the Box-Pierce statistic.

For IID Gaussian sequences the statistic over k lags follows chi-squared
with k degrees of freedom; the fit improves with the sequence length d.
Also shows threshold calibration from inlier statistics at a target FPR.
"""

import numpy as np

from wntest.synthetic import null_calibration
from wntest.whitenoise import all_lags, bp_statistic_rows, calibrate_threshold, chi2_sf

for d in (32, 256, 3072):
    rep = null_calibration(d, 12, 2000, seed=0)
    print(f"d={d:5d}: KS distance to chi2_12 = {rep['ks_distance']:.4f}, mean Q/k = {rep['mean_q_over_k']:.3f}")

print("\n--- threshold calibration at 5% FPR ---")
rng = np.random.default_rng(1)
q_inlier = bp_statistic_rows(rng.standard_normal((2000, 3072)), all_lags(12, 3072))
thr = calibrate_threshold(q_inlier, target_fpr=0.05)
print(f"empirical 95% quantile of inlier Q: {thr:.2f}")
print(f"chi2_12 survival at that threshold: {chi2_sf(thr, 12):.4f} (should be near 0.05)")
print(f"realized FPR on fresh inliers     : "
      f"{np.mean(bp_statistic_rows(rng.standard_normal((2000, 3072)), all_lags(12, 3072)) > thr):.4f}")
