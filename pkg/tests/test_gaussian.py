import numpy as np
import pytest

from wntest import errors
from wntest.gaussian import (
    fit_gaussian,
    gaussian_loglik,
    gaussian_loglik_rows,
    load_model,
    save_model,
    whiten,
    whiten_rows,
)
from wntest.synthetic import ProcessSpec, sample_process


def test_fit_diagonal_hand_case():
    rows = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]])
    model = fit_gaussian(rows, eps=0.0)
    assert np.allclose(model.mu, [1.0, 1.0])
    assert np.allclose(model.chol, np.diag([2 / np.sqrt(3)] * 2), atol=1e-12)


def test_fit_degenerate_rows():
    rows = np.ones((5, 3))
    with pytest.raises(errors.NumericalError):
        fit_gaussian(rows, eps=0.0)
    # zero trace: shrinkage cannot save identical rows either
    with pytest.raises(errors.NumericalError):
        fit_gaussian(rows, eps=1e-4)


def test_fit_too_few_samples():
    with pytest.raises(errors.ArgumentError):
        fit_gaussian(np.ones((1, 3)))


def test_cholesky_reconstruction_oracle():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((200, 3))
    model = fit_gaussian(X, eps=0.0)
    sigma = np.cov(X, rowvar=False)
    assert np.max(np.abs(model.chol @ model.chol.T - sigma)) < 1e-10
    # A is the inverse of the factor
    assert np.max(np.abs(model.chol_inv @ model.chol - np.eye(3))) < 1e-8


def test_whiten_identity_and_diagonal():
    d = 4
    rng = np.random.default_rng(0)
    # identity covariance: whiten(x) = x - mu
    Z = rng.standard_normal((20000, d))
    model = fit_gaussian(Z, eps=0.0)
    x = rng.standard_normal(d)
    assert np.allclose(whiten(model, x), x - model.mu, atol=0.05)

    # exact diagonal case built by hand
    model.mu = np.zeros(2)
    model.chol = np.diag([np.sqrt(2.0), 1.0])
    assert np.allclose(whiten_rows(model, np.array([[2.0, 1.0]]))[0], [np.sqrt(2.0), 1.0])


def test_whiten_ar1_covariance_oracle():
    # fit on 10000 samples of an 8-dim AR(1); whitened covariance ~ I
    X = sample_process(ProcessSpec("ar1", 8, {"phi": 0.6}, seed=7), 10000).values
    model = fit_gaussian(X, eps=0.0)
    W = whiten_rows(model, X)
    cov = np.cov(W, rowvar=False)
    assert np.max(np.abs(cov - np.eye(8))) < 0.1


def test_whiten_length_mismatch():
    model = fit_gaussian(np.random.default_rng(0).standard_normal((10, 3)))
    with pytest.raises(errors.ArgumentError):
        whiten(model, np.zeros(4))


def test_loglik_standard_cases():
    rng = np.random.default_rng(0)
    Z = rng.standard_normal((50000, 2))
    model = fit_gaussian(Z, eps=0.0)
    model.mu = np.zeros(2)
    model.chol = np.eye(2)
    model.chol_inv = np.eye(2)
    model.log_det_half = 0.0
    assert gaussian_loglik(model, np.zeros(2)) == pytest.approx(-np.log(2 * np.pi))

    model.mu = np.zeros(1)[:0]  # rebuild as d=1 by hand
    import wntest.gaussian as g

    m1 = g.GaussianModel(np.zeros(1), np.array([[2.0]]), np.array([[0.5]]), np.log(2.0), 0.0)
    assert gaussian_loglik(m1, np.array([2.0])) == pytest.approx(
        -0.5 * np.log(2 * np.pi) - np.log(2.0) - 0.5
    )


def test_loglik_dense_inverse_oracle():
    rng = np.random.default_rng(11)
    X = rng.standard_normal((500, 5)) @ rng.standard_normal((5, 5))
    model = fit_gaussian(X, eps=1e-6)
    sigma_reg = model.chol @ model.chol.T
    inv = np.linalg.inv(sigma_reg)
    _, logdet = np.linalg.slogdet(sigma_reg)
    for _ in range(10):
        x = rng.standard_normal(5)
        diff = x - model.mu
        direct = -0.5 * 5 * np.log(2 * np.pi) - 0.5 * logdet - 0.5 * diff @ inv @ diff
        assert gaussian_loglik(model, x) == pytest.approx(direct, abs=1e-8)


def test_whitening_linearity():
    rng = np.random.default_rng(2)
    model = fit_gaussian(rng.standard_normal((100, 4)))
    x = rng.standard_normal(4)
    for a in (-1.5, 0.0, 0.3, 2.0):
        lhs = whiten(model, a * x + (1 - a) * model.mu)
        assert np.allclose(lhs, a * whiten(model, x), atol=1e-10)


def test_loglik_maximized_at_mean():
    rng = np.random.default_rng(5)
    model = fit_gaussian(rng.standard_normal((100, 4)))
    peak = gaussian_loglik(model, model.mu)
    for _ in range(20):
        assert gaussian_loglik(model, model.mu + rng.standard_normal(4)) <= peak


def test_fit_permutation_invariant():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((50, 3))
    m1 = fit_gaussian(X)
    m2 = fit_gaussian(X[rng.permutation(50)])
    assert np.allclose(m1.mu, m2.mu, atol=1e-12)
    assert np.allclose(m1.chol, m2.chol, atol=1e-10)


def test_model_persistence_round_trip(tmp_path):
    from wntest.tensor_io import ImageGeometry, SampleMatrix

    rng = np.random.default_rng(8)
    m = SampleMatrix(ImageGeometry(1, 6, 1), rng.standard_normal((100, 6)))
    model = fit_gaussian(m, eps=1e-3)
    save_model(tmp_path / "model", model)
    assert (tmp_path / "model" / "mu.oodt").exists()
    assert (tmp_path / "model" / "chol.oodt").exists()
    loaded = load_model(tmp_path / "model")
    assert loaded.eps == model.eps
    assert loaded.geometry == model.geometry
    assert np.allclose(loaded.mu, model.mu, atol=1e-6)
    assert np.allclose(loaded.chol, model.chol, atol=1e-5)
    # loglik agrees closely after the f32 round trip
    x = rng.standard_normal(6)
    assert gaussian_loglik(loaded, x) == pytest.approx(gaussian_loglik(model, x), rel=1e-4)


def test_loglik_rows_matches_scalar():
    rng = np.random.default_rng(9)
    model = fit_gaussian(rng.standard_normal((200, 4)))
    X = rng.standard_normal((7, 4))
    batch = gaussian_loglik_rows(model, X)
    for i in range(7):
        assert batch[i] == pytest.approx(gaussian_loglik(model, X[i]), abs=1e-10)
