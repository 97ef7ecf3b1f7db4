"""Baseline outlier scores: LH, LH-2S and the compressor ratio LR.

All scores follow the "larger means more outlier" orientation.
"""

import io
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import ArgumentError
from .tensor_io import RANGE_RAW, unflatten_hwc

LN2 = float(np.log(2.0))

# PNG encoder settings frozen for the LR score: Pillow's adaptive
# filter heuristic, zlib level 9. Echoed into reports by the CLI.
PNG_COMPRESS_LEVEL = 9
COMPRESSOR_TAG = f"png-deflate-level{PNG_COMPRESS_LEVEL}"


@dataclass
class ScoreTable:
    test: str
    scores: np.ndarray
    labels: list  # per sample: "inlier-test" | "outlier" | "inlier-train"
    orientation: str = "larger score = more outlier"

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if len(self.labels) != self.scores.size:
            raise ArgumentError("labels and scores must have the same length")
        if not self.labels:
            raise ArgumentError("score table must be nonempty")


def lh_score(loglik):
    """Single-sided likelihood score: lower likelihood = more outlier."""
    return -loglik


def lh2s_score(loglik, inlier_median):
    """Two-sided score: absolute deviation of the log-likelihood from the inlier median."""
    return abs(loglik - inlier_median)


def generic_complexity_bits(sample, geometry):
    """Compressed size in bits of a raw-byte image under the frozen PNG settings."""
    sample = np.asarray(sample)
    if sample.min() < 0 or sample.max() > 255 or not np.all(sample == np.round(sample)):
        raise ArgumentError("compressor input must be raw byte values in [0, 255]")
    img = unflatten_hwc(sample.astype(np.uint8), geometry)
    if geometry.channels == 1:
        img = img[:, :, 0]
    buf = io.BytesIO()
    Image.fromarray(img).save(buf, format="PNG", compress_level=PNG_COMPRESS_LEVEL)
    return 8.0 * buf.getbuffer().nbytes


def lr_score(loglik_nats, complexity_bits):
    """Compressor likelihood-ratio score.

    The ratio statistic is loglik + complexity_bits * ln 2 (both terms
    in nats); a lower ratio means more outlier, so the returned score
    is its negation.
    """
    return -(loglik_nats + complexity_bits * LN2)


def batch_scores(matrix, test, model=None, logliks=None, inlier_median=None):
    """Score every row of a SampleMatrix under one of the baseline tests.

    `logliks` is the per-sample log-likelihood vector (nats); for the
    Linear pipeline it comes from gaussian_loglik_rows, for DGM
    pipelines from an imported container.
    """
    if test == "lh":
        return np.asarray([lh_score(v) for v in logliks])
    if test == "lh2s":
        if inlier_median is None:
            raise ArgumentError("lh2s requires the inlier median log-likelihood")
        return np.asarray([lh2s_score(v, inlier_median) for v in logliks])
    if test == "lr":
        if matrix.value_range != RANGE_RAW:
            raise ArgumentError("lr requires raw-byte image data")
        bits = np.asarray(
            [generic_complexity_bits(row, matrix.geometry) for row in matrix.values]
        )
        return np.asarray([lr_score(v, b) for v, b in zip(logliks, bits)])
    raise ArgumentError(f"unknown test {test!r}")
