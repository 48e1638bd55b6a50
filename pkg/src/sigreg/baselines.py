"""Classical comparison models: autoregression and exact GP regression.

The AR fit is plain least squares of r_{t+1} on an intercept and the last p
values. The Gaussian process uses a squared-exponential kernel

    k(x_i, x_j) = h^2 * exp(-|x_i - x_j|^2 / lambda^2)

with a learned observation-noise variance sigma^2 folded into
V = K + sigma^2 I; both the marginal likelihood and the posterior use V.
Hyperparameters are maximized in (log h, log lambda, log sigma) with
analytic gradients, L-BFGS-B, and a handful of perturbed restarts. On large
training sets the likelihood surface is optimized on a fixed random subset
(cubic cost), while the final posterior still conditions on every point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.optimize import minimize

from .errors import NumericalError

__all__ = [
    "ARModel",
    "ar_design",
    "ar_fit",
    "ar_predict",
    "ar_predict_series",
    "GPModel",
    "se_kernel",
    "kernel_matrix",
    "gp_log_marginal_likelihood",
    "gp_nll_and_grad",
    "gp_fit",
    "gp_predict",
    "lag_design",
]


# ---------------------------------------------------------------------------
# Autoregression


@dataclass
class ARModel:
    """r_{t+1} ~ phi_0 + sum_i phi_i r_{t-i+1}; phi has length p+1."""

    p: int
    phi: np.ndarray
    sigma2: float
    diagnostics: dict = field(default_factory=dict)


def lag_design(values, p):
    """Rows [r_t, r_{t-1}, ..., r_{t-p+1}] for t = p-1 .. N-2, next values.

    Returns (L, y, k_idx) where row j carries the lags at time k_idx[j] and
    y[j] = r at k_idx[j] + 1.
    """
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.size < p + 1:
        raise ValueError(f"need at least p+1 = {p + 1} observations")
    ks = np.arange(p - 1, v.size - 1)
    L = np.stack([v[ks - i] for i in range(p)], axis=1)
    return L, v[ks + 1], ks


def ar_design(values, p):
    """Design with intercept column: rows [1, r_t, ..., r_{t-p+1}]."""
    L, y, ks = lag_design(values, p)
    return np.column_stack([np.ones(len(y)), L]), y, ks


def ar_fit(values, p):
    """Least-squares autoregression of order p on a value sequence."""
    X, y, _ = ar_design(values, p)
    phi, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise NumericalError(
            f"autoregression design is rank deficient ({rank} < {X.shape[1]})"
        )
    resid = y - X @ phi
    dof = max(len(y) - X.shape[1], 1)
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    k = X.shape[1] - 1
    denom = len(y) - k - 1
    adj = 1.0 - (1.0 - r2) * (len(y) - 1) / denom if denom > 0 else r2
    return ARModel(
        p=p,
        phi=phi,
        sigma2=ss_res / dof,
        diagnostics={"r2": r2, "adjusted_r2": adj, "rows": len(y)},
    )


def ar_predict(model, lags):
    """Forecast from lag rows ordered [r_t, r_{t-1}, ...]."""
    lags = np.atleast_2d(np.asarray(lags, dtype=float))
    if lags.shape[1] != model.p:
        raise ValueError(f"expected {model.p} lagged values per row")
    out = model.phi[0] + lags @ model.phi[1:]
    return out if out.size > 1 else float(out[0])


def ar_predict_series(model, values):
    """One-step forecasts along a sequence; returns (k_idx, predictions)."""
    L, _, ks = lag_design(values, model.p)
    return ks, model.phi[0] + L @ model.phi[1:]


# ---------------------------------------------------------------------------
# Gaussian process with squared-exponential kernel


def se_kernel(xi, xj, h, lam):
    """Squared-exponential kernel for a single pair of (vector) inputs."""
    xi = np.asarray(xi, dtype=float).reshape(-1)
    xj = np.asarray(xj, dtype=float).reshape(-1)
    return h * h * float(np.exp(-np.sum((xi - xj) ** 2) / (lam * lam)))


def _sqdist(A, B):
    a2 = np.sum(A * A, axis=1)[:, None]
    b2 = np.sum(B * B, axis=1)[None, :]
    return np.maximum(a2 + b2 - 2.0 * A @ B.T, 0.0)


def kernel_matrix(A, B, h, lam):
    return h * h * np.exp(-_sqdist(A, B) / (lam * lam))


def _chol_with_jitter(V):
    """Cholesky with an escalating diagonal jitter; reports total jitter used.

    The ladder starts at 1e-10 * mean diagonal and doubles until 1e-4 * mean
    diagonal, after which the matrix is declared un-factorizable.
    """
    n = V.shape[0]
    base = float(np.trace(V)) / n
    jitter = 0.0
    while True:
        try:
            c_low = cho_factor(V + jitter * np.eye(n), lower=True)
            return c_low, jitter
        except np.linalg.LinAlgError:
            jitter = 1e-10 * base if jitter == 0.0 else 2.0 * jitter
            if jitter > 1e-4 * base:
                raise NumericalError(
                    "covariance not positive definite even with maximal jitter"
                ) from None


@dataclass
class GPModel:
    """Fitted GP: hyperparameters plus the cached training factorization."""

    log_h: float
    log_lam: float
    log_sigma: float
    x: np.ndarray
    y: np.ndarray
    prior_mean: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.atleast_2d(np.asarray(self.x, dtype=float))
        self.y = np.asarray(self.y, dtype=float).reshape(-1)
        h, lam, sig = np.exp([self.log_h, self.log_lam, self.log_sigma])
        K = kernel_matrix(self.x, self.x, h, lam)
        V = K + sig * sig * np.eye(len(self.y))
        self._chol, jitter = _chol_with_jitter(V)
        self._alpha = cho_solve(self._chol, self.y - self.prior_mean)
        self.diagnostics.setdefault("jitter", jitter)


def gp_nll_and_grad(theta, X, y, prior_mean=0.0):
    """Negative log marginal likelihood and gradient in log-parameters.

    theta = (log h, log lambda, log sigma). Gradient components use
    d/dtheta log|V| - type identities:
        dLL/dtheta = 0.5 * (alpha^T dV alpha - tr(V^{-1} dV)),
    with dV/dlog h = 2K, dV/dlog lam = 2 K . D / lam^2 (D = squared
    distances), dV/dlog sigma = 2 sigma^2 I.
    """
    log_h, log_lam, log_sigma = theta
    h, lam, sig = np.exp(theta)
    N = len(y)
    D = _sqdist(X, X)
    K = h * h * np.exp(-D / (lam * lam))
    V = K + sig * sig * np.eye(N)
    c, jitter = _chol_with_jitter(V)
    resid = y - prior_mean
    alpha = cho_solve(c, resid)
    logdet = 2.0 * np.sum(np.log(np.diag(c[0])))
    ll = -0.5 * float(resid @ alpha) - 0.5 * logdet - 0.5 * N * np.log(2 * np.pi)
    Vinv = cho_solve(c, np.eye(N))
    M = np.outer(alpha, alpha) - Vinv
    dV_dh = 2.0 * K
    dV_dlam = K * (2.0 * D / (lam * lam))
    dV_dsig = (2.0 * sig * sig) * np.eye(N)
    grad = 0.5 * np.array(
        [np.sum(M * dV_dh), np.sum(M * dV_dlam), np.sum(M * dV_dsig)]
    )
    return -ll, -grad


def gp_log_marginal_likelihood(model):
    """Log marginal likelihood of a fitted model on its own training data."""
    nll, _ = gp_nll_and_grad(
        np.array([model.log_h, model.log_lam, model.log_sigma]),
        model.x,
        model.y,
        model.prior_mean,
    )
    return -nll


def _initial_theta(X, y, rng):
    spread = float(np.std(y))
    h0 = max(spread, 1e-8)
    if X.shape[0] > 1:
        take = X[rng.choice(X.shape[0], size=min(200, X.shape[0]), replace=False)]
        dists = np.sqrt(_sqdist(take, take))
        lam0 = float(np.median(dists[dists > 0])) if np.any(dists > 0) else 1.0
    else:
        lam0 = 1.0
    lam0 = max(lam0, 1e-8)
    sig0 = max(0.3 * spread, 1e-6)
    return np.log([h0, lam0, sig0])


def gp_fit(
    X,
    y,
    restarts=5,
    seed=0,
    mle_max_points=800,
    prior_mean_policy="zero",
):
    """Maximize the marginal likelihood, then condition on the full data.

    With more than mle_max_points rows the optimization runs on a random
    (seeded) subset; exact inference is cubic and the hyperparameter surface
    does not need every point. The returned model always conditions on all of
    X. Restart 0 starts from moment-based values, the rest from log-space
    perturbations.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.shape[0] != y.size:
        raise ValueError("X rows and y length differ")
    if y.size < 2:
        raise ValueError("need at least two observations")
    prior_mean = float(np.mean(y)) if prior_mean_policy == "mean" else 0.0
    rng = np.random.default_rng(seed)
    if X.shape[0] > mle_max_points:
        idx = np.sort(rng.choice(X.shape[0], size=mle_max_points, replace=False))
        X_opt, y_opt = X[idx], y[idx]
    else:
        X_opt, y_opt = X, y
    theta0 = _initial_theta(X_opt, y_opt, rng)
    best = None
    failures = []
    for k in range(restarts):
        start = theta0 if k == 0 else theta0 + rng.normal(0.0, 0.5, size=3)
        try:
            res = minimize(
                gp_nll_and_grad,
                start,
                args=(X_opt, y_opt, prior_mean),
                jac=True,
                method="L-BFGS-B",
                options={"maxiter": 200},
            )
        except NumericalError as exc:
            failures.append(str(exc))
            continue
        if not np.all(np.isfinite(res.x)):
            failures.append("non-finite optimum")
            continue
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        raise NumericalError(
            "every hyperparameter restart failed: " + "; ".join(failures[:3])
        )
    log_h, log_lam, log_sigma = best.x
    model = GPModel(
        log_h=float(log_h),
        log_lam=float(log_lam),
        log_sigma=float(log_sigma),
        x=X,
        y=y,
        prior_mean=prior_mean,
        diagnostics={
            "mle_rows": int(X_opt.shape[0]),
            "mle_loglik": float(-best.fun),
            "restarts": restarts,
        },
    )
    return model


def gp_predict(model, Xstar):
    """Posterior mean and variance at query rows.

    Solves against V = K + sigma^2 I (the noisy covariance), so the variance
    is the latent-function variance: h^2 - |L^{-1} k*|^2, clipped at 0.
    """
    Xstar = np.atleast_2d(np.asarray(Xstar, dtype=float))
    h, lam = np.exp([model.log_h, model.log_lam])
    kstar = kernel_matrix(Xstar, model.x, h, lam)
    mean = model.prior_mean + kstar @ model._alpha
    c, low = model._chol
    v = solve_triangular(c, kstar.T, lower=True)
    var = np.maximum(h * h - np.sum(v * v, axis=0), 0.0)
    return mean, var


# ---------------------------------------------------------------------------
# Persistence (shared JSON shape with the signature model)


def baseline_to_dict(model):
    if isinstance(model, ARModel):
        return {
            "kind": "ar",
            "p": model.p,
            "phi": model.phi.tolist(),
            "sigma2": model.sigma2,
            "diagnostics": model.diagnostics,
        }
    if isinstance(model, GPModel):
        return {
            "kind": "gp",
            "log_h": model.log_h,
            "log_lam": model.log_lam,
            "log_sigma": model.log_sigma,
            "prior_mean": model.prior_mean,
            "x": model.x.tolist(),
            "y": model.y.tolist(),
            "diagnostics": {
                k: v for k, v in model.diagnostics.items() if k != "jitter"
            },
        }
    raise TypeError(f"unsupported model type {type(model).__name__}")


def baseline_from_dict(obj):
    kind = obj.get("kind")
    if kind == "ar":
        return ARModel(
            p=int(obj["p"]),
            phi=np.asarray(obj["phi"], dtype=float),
            sigma2=float(obj["sigma2"]),
            diagnostics=obj.get("diagnostics", {}),
        )
    if kind == "gp":
        return GPModel(
            log_h=float(obj["log_h"]),
            log_lam=float(obj["log_lam"]),
            log_sigma=float(obj["log_sigma"]),
            x=np.asarray(obj["x"], dtype=float),
            y=np.asarray(obj["y"], dtype=float),
            prior_mean=float(obj.get("prior_mean", 0.0)),
            diagnostics=obj.get("diagnostics", {}),
        )
    raise ValueError(f"unknown baseline kind {kind!r}")
