"""Autoregression and GP baselines: closed forms, gradients, posteriors."""

import numpy as np
import pytest

from sigreg.baselines import (
    ARModel,
    GPModel,
    ar_design,
    ar_fit,
    ar_predict,
    ar_predict_series,
    baseline_from_dict,
    baseline_to_dict,
    gp_fit,
    gp_log_marginal_likelihood,
    gp_nll_and_grad,
    gp_predict,
    kernel_matrix,
    lag_design,
    se_kernel,
)
from sigreg.datagen import gen_ar
from sigreg.errors import NumericalError


def test_lag_design_layout():
    r = np.arange(10.0)
    L, y, ks = lag_design(r, 3)
    assert np.array_equal(ks, np.arange(2, 9))
    assert np.array_equal(L[0], [2.0, 1.0, 0.0])  # newest lag first
    assert np.array_equal(y, np.arange(3.0, 10.0))
    D, y2, ks2 = ar_design(r, 3)
    assert np.array_equal(D[:, 0], np.ones(7))
    assert np.array_equal(D[:, 1:], L)
    assert np.array_equal(y2, y) and np.array_equal(ks2, ks)
    with pytest.raises(ValueError):
        lag_design(np.arange(3.0), 3)


def test_ar_fit_noise_free_recovery():
    # keep the transient (burn_in=0): the settled orbit is constant and the
    # design loses rank, which ar_fit refuses
    lab = gen_ar(40, phi=(0.2, 0.5, 0.2, -0.1), sigma=0.0, burn_in=0)
    model = ar_fit(lab.ts.r, 3)
    assert np.allclose(model.phi, [0.2, 0.5, 0.2, -0.1], atol=1e-10)
    assert model.sigma2 == pytest.approx(0.0, abs=1e-18)
    settled = gen_ar(400, phi=(0.2, 0.5, 0.2, -0.1), sigma=0.0, burn_in=500)
    with pytest.raises(NumericalError):
        ar_fit(settled.ts.r, 3)


def test_ar_residual_orthogonal_to_design():
    lab = gen_ar(800, seed=3)
    model = ar_fit(lab.ts.r, 3)
    D, y, _ = ar_design(lab.ts.r, 3)
    resid = y - D @ model.phi
    rel = np.abs(D.T @ resid) / (np.linalg.norm(D, axis=0) * np.linalg.norm(resid))
    assert np.max(rel) < 1e-8


def test_ar_predict_paths_agree():
    lab = gen_ar(120, seed=4)
    model = ar_fit(lab.ts.r, 2)
    L, _, ks = lag_design(lab.ts.r, 2)
    one = ar_predict(model, L[5])
    many = ar_predict(model, L)
    assert many[5] == pytest.approx(one)
    ks2, preds = ar_predict_series(model, lab.ts.r)
    assert np.array_equal(ks2, ks)
    assert np.allclose(preds, many, atol=1e-14)


def test_se_kernel_values():
    h, lam = 1.5, 2.0
    assert se_kernel([0.3, 1.0], [0.3, 1.0], h, lam) == pytest.approx(h * h)
    x = np.zeros(2)
    z = np.array([2.0, 0.0])  # |x - z| = lam
    assert se_kernel(x, z, h, lam) == pytest.approx(h * h * np.exp(-1.0))
    assert se_kernel(z, x, h, lam) == pytest.approx(se_kernel(x, z, h, lam))
    K = kernel_matrix(np.array([[0.0], [1.0]]), np.array([[0.0], [1.0]]), h, lam)
    assert np.allclose(K, K.T)
    assert np.all(np.linalg.eigvalsh(K) > -1e-12)


def test_single_point_log_marginal():
    # h = sigma = 1 at one observation y = 0: ll = -log(4 pi) / 2
    model = GPModel(log_h=0.0, log_lam=0.0, log_sigma=0.0, x=[[0.0]], y=[0.0])
    assert gp_log_marginal_likelihood(model) == pytest.approx(
        -0.5 * np.log(4 * np.pi), abs=1e-12
    )


def test_nll_gradient_matches_finite_differences():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(20, 2))
    y = np.sin(X[:, 0]) + 0.1 * rng.normal(size=20)
    theta = np.log([0.8, 1.3, 0.2])
    _, grad = gp_nll_and_grad(theta, X, y)
    eps = 1e-6
    for i in range(3):
        dt = np.zeros(3)
        dt[i] = eps
        f_plus, _ = gp_nll_and_grad(theta + dt, X, y)
        f_minus, _ = gp_nll_and_grad(theta - dt, X, y)
        fd = (f_plus - f_minus) / (2 * eps)
        assert grad[i] == pytest.approx(fd, abs=1e-5)


def test_gp_posterior_against_dense_solve():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(15, 1))
    y = np.cos(X[:, 0])
    model = GPModel(log_h=0.1, log_lam=0.4, log_sigma=np.log(0.3), x=X, y=y)
    h, lam, sig = np.exp([model.log_h, model.log_lam, model.log_sigma])
    Xs = np.array([[0.2], [-1.0], [3.0]])
    K = kernel_matrix(X, X, h, lam)
    V = K + sig * sig * np.eye(15)
    ks = kernel_matrix(Xs, X, h, lam)
    ref_mean = ks @ np.linalg.solve(V, y)
    ref_var = h * h - np.einsum("ij,ji->i", ks, np.linalg.solve(V, ks.T))
    mean, var = gp_predict(model, Xs)
    assert np.allclose(mean, ref_mean, atol=1e-10)
    assert np.allclose(var, ref_var, atol=1e-10)


def test_gp_interpolates_with_tiny_noise():
    X = np.linspace(0, 3, 8)[:, None]
    y = np.sin(X[:, 0])
    model = GPModel(log_h=0.0, log_lam=0.0, log_sigma=np.log(1e-6), x=X, y=y)
    mean, var = gp_predict(model, X)
    assert np.allclose(mean, y, atol=1e-4)
    assert np.all(var < 1e-4)


def test_gp_far_query_reverts_to_prior():
    X = np.zeros((4, 1)) + np.arange(4.0)[:, None]
    y = np.array([1.0, 2.0, 0.5, 1.5])
    model = GPModel(log_h=np.log(1.2), log_lam=0.0, log_sigma=np.log(0.1), x=X, y=y)
    mean, var = gp_predict(model, [[1e4]])
    assert mean[0] == pytest.approx(0.0, abs=1e-10)  # zero prior mean
    assert var[0] == pytest.approx(1.2**2, abs=1e-10)


def test_gp_variance_bounds(rng):
    X = rng.normal(size=(25, 2))
    y = rng.normal(size=25)
    model = GPModel(log_h=0.3, log_lam=0.2, log_sigma=np.log(0.4), x=X, y=y)
    _, var = gp_predict(model, rng.normal(size=(40, 2)))
    h2 = np.exp(2 * model.log_h)
    assert np.all(var >= 0.0)
    assert np.all(var <= h2 + 1e-10)


def test_gp_mean_linear_in_targets(rng):
    X = rng.normal(size=(12, 1))
    y1 = rng.normal(size=12)
    y2 = rng.normal(size=12)
    kw = dict(log_h=0.0, log_lam=0.3, log_sigma=np.log(0.2), x=X)
    Xs = rng.normal(size=(6, 1))
    m1, _ = gp_predict(GPModel(y=y1, **kw), Xs)
    m2, _ = gp_predict(GPModel(y=y2, **kw), Xs)
    m12, _ = gp_predict(GPModel(y=y1 + 2 * y2, **kw), Xs)
    assert np.allclose(m12, m1 + 2 * m2, atol=1e-10)


def test_duplicate_points_need_jitter():
    X = np.zeros((6, 1))  # six copies of one input, zero noise
    y = np.full(6, 0.7)
    model = GPModel(log_h=0.0, log_lam=0.0, log_sigma=np.log(1e-12), x=X, y=y)
    assert model.diagnostics["jitter"] > 0.0
    mean, _ = gp_predict(model, [[0.0]])
    assert np.isfinite(mean[0])


def test_gp_fit_recovers_hyperparameters():
    # sample from a known prior at moderate size; each seed stays inside 0.3
    true = np.log([1.5, 2.0, 0.3])
    h, lam, sig = np.exp(true)
    for seed in (102, 103, 104):
        rng = np.random.default_rng(seed)
        X = rng.uniform(-3, 3, size=(500, 2))
        K = kernel_matrix(X, X, h, lam)
        L = np.linalg.cholesky(K + 1e-10 * np.eye(500))
        y = L @ rng.standard_normal(500) + sig * rng.standard_normal(500)
        model = gp_fit(X, y, seed=0)
        est = np.array([model.log_h, model.log_lam, model.log_sigma])
        assert np.max(np.abs(est - true)) < 0.3


def test_gp_fit_constant_targets():
    model = gp_fit(np.arange(10.0)[:, None], np.ones(10), seed=0)
    assert np.isfinite([model.log_h, model.log_lam, model.log_sigma]).all()
    mean, _ = gp_predict(model, [[4.5]])
    assert np.isfinite(mean[0])


def test_gp_fit_subsamples_large_sets(rng):
    X = rng.normal(size=(120, 1))
    y = np.sin(X[:, 0]) + 0.05 * rng.normal(size=120)
    model = gp_fit(X, y, restarts=1, seed=0, mle_max_points=60)
    assert model.diagnostics["mle_rows"] == 60
    assert model.x.shape == (120, 1)  # posterior still conditions on all rows
    with pytest.raises(ValueError):
        gp_fit(X, y[:-1])
    with pytest.raises(ValueError):
        gp_fit(X[:1], y[:1])


def test_baseline_serialization_roundtrip(rng):
    lab = gen_ar(200, seed=6)
    ar = ar_fit(lab.ts.r, 3)
    back = baseline_from_dict(baseline_to_dict(ar))
    assert isinstance(back, ARModel)
    assert np.array_equal(back.phi, ar.phi)
    assert back.sigma2 == ar.sigma2

    X = rng.normal(size=(10, 2))
    y = rng.normal(size=10)
    gp = GPModel(log_h=0.1, log_lam=0.2, log_sigma=-1.0, x=X, y=y)
    gp2 = baseline_from_dict(baseline_to_dict(gp))
    assert isinstance(gp2, GPModel)
    m1, v1 = gp_predict(gp, [[0.5, -0.5]])
    m2, v2 = gp_predict(gp2, [[0.5, -0.5]])
    assert m1[0] == pytest.approx(m2[0], abs=1e-12)
    assert v1[0] == pytest.approx(v2[0], abs=1e-12)

    with pytest.raises(ValueError):
        baseline_from_dict({"kind": "mystery"})
    with pytest.raises(TypeError):
        baseline_to_dict(object())
