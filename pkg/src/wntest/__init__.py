"""White-noise outlier test library.

Residual construction via inverse-Cholesky whitening, Box-Pierce
statistics over image-aware lag sets, likelihood and compressor-ratio
baselines, and an AUROC evaluation harness with synthetic validators.
"""

from .errors import (
    ArgumentError,
    ConfigError,
    DegenerateSequenceError,
    FormatError,
    NumericalError,
    WntestError,
)
from .evaluation import acf_profile, auroc, auroc_ci, average_ranks, histogram_intersection
from .gaussian import GaussianModel, fit_gaussian, gaussian_loglik, whiten
from .scoring import generic_complexity_bits, lh2s_score, lh_score, lr_score
from .synthetic import ProcessSpec, null_calibration, sample_process, typicality_demo, typicality_stat
from .tensor_io import (
    ImageGeometry,
    SampleMatrix,
    flatten_hwc,
    read_cifar10_bin,
    read_container,
    unflatten_hwc,
    write_container,
)
from .whitenoise import (
    LagSet,
    WnStatistic,
    acf,
    all_lags,
    bp_statistic,
    calibrate_threshold,
    chi2_sf,
    standardize,
    vertical_lags,
)

__version__ = "0.1.0"
