"""Multivariate Gaussian model: fit, whitening transform, log-density.

The whitened sequence is W = A (x - mu) where A is the inverse of the
lower Cholesky factor of the (shrinkage-regularized) covariance. For
inlier data W is white noise: zero cross-lag covariance, unit variance.
"""

import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ArgumentError, NumericalError
from .tensor_io import ImageGeometry, read_tensor, write_tensor

DEFAULT_EPS = 1e-3


@dataclass
class GaussianModel:
    mu: np.ndarray          # (d,) mean in data units
    chol: np.ndarray        # (d, d) lower triangular, Sigma_reg = chol @ chol.T
    chol_inv: np.ndarray    # (d, d) lower triangular inverse of chol
    log_det_half: float     # sum of log of the Cholesky diagonal
    eps: float              # shrinkage strength used at fit time
    geometry: ImageGeometry | None = None

    @property
    def d(self):
        return self.mu.shape[0]


def fit_gaussian(train, eps=DEFAULT_EPS, geometry=None):
    """Fit mean and regularized covariance to the rows of a SampleMatrix.

    Sigma_reg = Sigma + eps * (trace(Sigma)/d) * I, with Sigma the
    empirical covariance (divisor n-1). Two-pass accumulation in
    float64 for stability at large d.
    """
    X = np.asarray(train.values if hasattr(train, "values") else train, dtype=np.float64)
    if X.ndim != 2:
        raise ArgumentError("training data must be a 2-d array")
    n, d = X.shape
    if n < 2:
        raise ArgumentError(f"need at least 2 training samples, got {n}")
    if eps < 0:
        raise ArgumentError("eps must be >= 0")

    mu = X.mean(axis=0)
    Xc = X - mu
    sigma = (Xc.T @ Xc) / (n - 1)
    tau = np.trace(sigma) / d
    if tau <= 0:
        raise NumericalError("training data has zero total variance; covariance is singular")
    sigma_reg = sigma + (eps * tau) * np.eye(d)

    try:
        chol = scipy.linalg.cholesky(sigma_reg, lower=True)
    except scipy.linalg.LinAlgError as e:
        raise NumericalError(
            f"Cholesky factorization failed (eps={eps}); increase the shrinkage eps"
        ) from e

    chol_inv = scipy.linalg.solve_triangular(chol, np.eye(d), lower=True)
    log_det_half = float(np.sum(np.log(np.diag(chol))))
    if geometry is None:
        geometry = getattr(train, "geometry", None)
    return GaussianModel(mu, chol, chol_inv, log_det_half, float(eps), geometry)


def whiten(model, x):
    """W = A (x - mu) by forward substitution against the Cholesky factor."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.d,):
        raise ArgumentError(f"expected a length-{model.d} vector, got shape {x.shape}")
    return scipy.linalg.solve_triangular(model.chol, x - model.mu, lower=True)


def whiten_rows(model, X):
    """Whiten each row of an (n, d) matrix; returns an (n, d) matrix."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.d:
        raise ArgumentError(f"expected an (n, {model.d}) matrix, got shape {X.shape}")
    return scipy.linalg.solve_triangular(model.chol, (X - model.mu).T, lower=True).T


def gaussian_loglik(model, x):
    """Exact Gaussian log density in nats: -(d/2) log 2pi - log|C| - ||W||^2 / 2."""
    w = whiten(model, x)
    return float(-0.5 * model.d * np.log(2 * np.pi) - model.log_det_half - 0.5 * w @ w)


def gaussian_loglik_rows(model, X):
    """Row-wise gaussian_loglik; returns an (n,) vector."""
    W = whiten_rows(model, X)
    return -0.5 * model.d * np.log(2 * np.pi) - model.log_det_half - 0.5 * (W * W).sum(axis=1)


def save_model(dirpath, model):
    """Persist a model as mu.oodt, chol.oodt and meta.txt key=value lines."""
    os.makedirs(dirpath, exist_ok=True)
    write_tensor(os.path.join(dirpath, "mu.oodt"), model.mu.astype(np.float32))
    write_tensor(os.path.join(dirpath, "chol.oodt"), model.chol.astype(np.float32))
    lines = [f"eps={model.eps!r}"]
    if model.geometry is not None:
        g = model.geometry
        lines.append(f"geometry={g.height}x{g.wd}x{g.channels}")
    with open(os.path.join(dirpath, "meta.txt"), "w") as f:
        f.write("\n".join(lines) + "\n")


def load_model(dirpath):
    mu = read_tensor(os.path.join(dirpath, "mu.oodt")).astype(np.float64)
    chol = read_tensor(os.path.join(dirpath, "chol.oodt")).astype(np.float64)
    meta = {}
    with open(os.path.join(dirpath, "meta.txt")) as f:
        for line in f:
            line = line.strip()
            if line:
                k, _, v = line.partition("=")
                meta[k] = v
    geometry = None
    if "geometry" in meta:
        h, wd, c = (int(s) for s in meta["geometry"].split("x"))
        geometry = ImageGeometry(h, wd, c)
    chol_inv = scipy.linalg.solve_triangular(chol, np.eye(len(mu)), lower=True)
    log_det_half = float(np.sum(np.log(np.diag(chol))))
    return GaussianModel(mu, chol, chol_inv, log_det_half, float(meta.get("eps", "0.0")), geometry)
