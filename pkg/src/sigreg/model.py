"""Signature-linear regression of a series' future on its windowed past.

The model with parameters (p, q, n, m): slide a window of the last p+1
observations, take the degree-n signature of its (rebased) time-joined
embedding as the feature vector, and regress either the next value r_{k+1}
("reduced" mode, the default) or the full degree-m signature of the next q
observations ("tensor" mode) on it. Everything is ordinary least squares;
signature coordinates of nearby degrees are highly collinear, so the solver
goes through an SVD with optional ridge augmentation instead of normal
equations.

The fitted coefficient matrix is a bona fide linear functional on the
truncated algebra, so conditional moments of the future fall out of the
predicted expected signature: the mean of r_{k+1} is the (2) coordinate and
its variance is 2 * (2,2) - ((2))^2. The general bilinear form of that
variance identity is induced_covariance.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import RankDeficiencyError
from .signatures import signature_batch
from .tensor import (
    all_words,
    apply_form,
    from_vector,
    project,
    shuffle_words,
    total_dim,
)

__all__ = [
    "ESModelSpec",
    "FittedESModel",
    "build_feature_matrix",
    "fit",
    "predict_mean",
    "predict_series",
    "induced_covariance",
    "moments_from_mu",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
]

# Default relative cutoff for small singular values. Signature features are
# functionally dependent (shuffle relations), so sliding-window designs are
# always numerically rank-deficient; directions this far below the top
# singular value carry noise, not signal.
DEFAULT_RCOND = 1e-8


@dataclass(frozen=True)
class ESModelSpec:
    """Shape of the regression: lags, horizon, truncation degrees, policies."""

    p: int
    n: int
    q: int = 1
    m: int = 1
    mode: str = "reduced"
    ridge: float = 0.0
    rebase: str = "shift"
    embedding: str = "time-joined"
    rank_policy: str = "truncate"
    rcond: float = DEFAULT_RCOND

    def __post_init__(self):
        if min(self.p, self.q, self.n, self.m) < 1:
            raise ValueError("p, q, n, m must all be >= 1")
        if self.mode not in ("reduced", "tensor"):
            raise ValueError("mode must be 'reduced' or 'tensor'")
        if self.ridge < 0:
            raise ValueError("ridge must be non-negative")
        if self.rcond <= 0:
            raise ValueError("rcond must be positive")
        if self.rebase not in ("shift", "absolute"):
            raise ValueError("rebase must be 'shift' or 'absolute'")
        if self.embedding not in ("time-joined", "linear"):
            raise ValueError("embedding must be 'time-joined' or 'linear'")
        if self.rank_policy not in ("truncate", "strict"):
            raise ValueError("rank_policy must be 'truncate' or 'strict'")

    @property
    def n_features(self):
        return total_dim(2, self.n)

    @property
    def n_targets(self):
        return 1 if self.mode == "reduced" else total_dim(2, self.m)


def _window_increments(t, r, spec):
    """Increment stack (B, L, 2) for all rows of windows (B, W) of t and r."""
    if spec.rebase == "shift":
        t = t - t[:, :1]
    B, W = t.shape
    if spec.embedding == "time-joined":
        inc = np.zeros((B, 2 * W, 2))
        inc[:, 0, 0] = t[:, 0]
        inc[:, 1, 1] = r[:, 0]
        inc[:, 2::2, 0] = np.diff(t, axis=1)
        inc[:, 3::2, 1] = np.diff(r, axis=1)
    else:
        inc = np.zeros((B, max(W - 1, 1), 2))
        if W > 1:
            inc[:, :, 0] = np.diff(t, axis=1)
            inc[:, :, 1] = np.diff(r, axis=1)
    return inc


def _sliding(a, width, starts):
    return np.stack([a[s : s + width] for s in starts])


def build_feature_matrix(ts, spec):
    """Design matrices for every admissible window position.

    Returns (X, Y, k_idx): row j holds the degree-n signature coordinates of
    the window ending at k = k_idx[j] (points k-p .. k), and Y holds the
    target for predicting past k, either the scalar r_{k+1} or the degree-m
    signature coordinates of points k+1 .. k+q. The empty-word feature column
    is identically 1 and doubles as the intercept.
    """
    N = len(ts)
    if N < spec.p + spec.q + 1:
        raise ValueError(
            f"series of length {N} too short for p={spec.p}, q={spec.q}"
        )
    ks = np.arange(spec.p, N - spec.q)
    past_t = _sliding(ts.t, spec.p + 1, ks - spec.p)
    past_r = _sliding(ts.r, spec.p + 1, ks - spec.p)
    X = signature_batch(_window_increments(past_t, past_r, spec), spec.n)
    if spec.mode == "reduced":
        Y = ts.r[ks + 1][:, None]
    else:
        fut_t = _sliding(ts.t, spec.q, ks + 1)
        fut_r = _sliding(ts.r, spec.q, ks + 1)
        Y = signature_batch(_window_increments(fut_t, fut_r, spec), spec.m)
    return X, Y, ks


def _solve_least_squares(X, Y, spec, feature_words):
    """SVD solve with optional ridge rows; returns (coeffs (F, T), rank, sv)."""
    if spec.ridge > 0:
        F = X.shape[1]
        pen = np.sqrt(spec.ridge) * np.eye(F)
        pen[0, 0] = 0.0  # leave the intercept coordinate unpenalized
        X = np.vstack([X, pen])
        Y = np.vstack([Y, np.zeros((F, Y.shape[1]))])
    coeffs, _, rank, sv = np.linalg.lstsq(X, Y, rcond=spec.rcond)
    if spec.rank_policy == "strict" and rank < X.shape[1]:
        # name the flattest direction so the caller sees what collapsed
        _, _, vt = np.linalg.svd(X, full_matrices=True)
        null = vt[-1]
        top = np.argsort(-np.abs(null))[:4]
        desc = ", ".join(
            f"{null[i]:+.3f}*{''.join(map(str, feature_words[i])) or '()'}"
            for i in top
        )
        raise RankDeficiencyError(
            f"design rank {rank} < {X.shape[1]} features; "
            f"near-null direction ~ {desc}",
            null_direction=null,
        )
    return coeffs, rank, sv


def _fit_stats(X, Y, coeffs, rank):
    resid = Y - X @ coeffs
    ss_res = np.sum(resid**2, axis=0)
    ss_tot = np.sum((Y - Y.mean(axis=0)) ** 2, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(ss_tot > 0, 1.0 - ss_res / ss_tot, 1.0)
    rows = X.shape[0]
    k = X.shape[1] - 1  # explanatory variables beside the intercept column
    denom = rows - k - 1
    adj = 1.0 - (1.0 - r2) * (rows - 1) / denom if denom > 0 else r2
    dof = max(rows - rank, 1)
    return {
        "r2": r2,
        "adjusted_r2": np.minimum(adj, r2),
        "residual_variance": ss_res / dof,
        "rank": int(rank),
        "rows": int(rows),
    }


@dataclass
class FittedESModel:
    """Least-squares fit: coefficients is (n_targets, n_features)."""

    spec: ESModelSpec
    coefficients: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    @property
    def feature_words(self):
        return all_words(2, self.spec.n)

    @property
    def target_words(self):
        return None if self.spec.mode == "reduced" else all_words(2, self.spec.m)

    def features_for(self, window):
        if len(window) != self.spec.p + 1:
            raise ValueError(
                f"window must hold exactly p+1 = {self.spec.p + 1} points"
            )
        inc = _window_increments(
            window.t[None, :], window.r[None, :], self.spec
        )
        return signature_batch(inc, self.spec.n)[0]

    def predict_from_features(self, X):
        """Predictions for rows of precomputed features (used in backtests)."""
        out = np.asarray(X) @ self.coefficients.T
        return out[:, 0] if self.spec.mode == "reduced" else out


def fit(ts, spec):
    """Fit the model on every admissible window of the series."""
    X, Y, _ = build_feature_matrix(ts, spec)
    coeffs, rank, _ = _solve_least_squares(X, Y, spec, all_words(2, spec.n))
    stats = _fit_stats(X, Y, coeffs, rank)
    return FittedESModel(spec=spec, coefficients=coeffs.T, diagnostics=stats)


def predict_mean(model, window):
    """Predicted conditional mean for one window of p+1 points.

    Reduced mode returns the scalar forecast of the next value; tensor mode
    returns the predicted expected signature of the next q points as a
    tensor, with the empty-word coordinate pinned to 1.
    """
    x = model.features_for(window)
    out = model.coefficients @ x
    if model.spec.mode == "reduced":
        return float(out[0])
    out[0] = 1.0
    return from_vector(out, 2, model.spec.m)


def predict_series(model, ts):
    """One-step predictions along a whole series.

    Returns (k_idx, predictions): entry j forecasts observation k_idx[j] + 1
    from the window ending at k_idx[j]. Tensor-mode predictions come back as
    coordinate rows (empty-word column pinned to 1).
    """
    spec = model.spec
    N = len(ts)
    if N < spec.p + 1:
        raise ValueError("series shorter than one window")
    ks = np.arange(spec.p, N)
    t = _sliding(ts.t, spec.p + 1, ks - spec.p)
    r = _sliding(ts.r, spec.p + 1, ks - spec.p)
    X = signature_batch(_window_increments(t, r, spec), spec.n)
    preds = model.predict_from_features(X)
    if spec.mode == "tensor":
        preds[:, 0] = 1.0
    return ks, preds


def induced_covariance(mu, I, J):
    """Covariance of two signature coordinates from the expected signature.

    Cov(pi_I, pi_J) = (pi_I shuffle pi_J)(mu) - pi_I(mu) * pi_J(mu). When mu
    is the exact signature of a single deterministic path this vanishes
    identically (the shuffle identity), which is a useful sanity check.
    """
    I, J = tuple(I), tuple(J)
    if len(I) + len(J) > mu.n:
        raise ValueError(
            f"need degree >= {len(I) + len(J)}, expected signature has {mu.n}"
        )
    cross = apply_form(shuffle_words(I, J, mu.d), mu)
    return cross - project(mu, I) * project(mu, J)


def moments_from_mu(mu):
    """(mean, variance) of the next value from its expected signature.

    mean = (2) coordinate, variance = 2 * (2,2) - ((2))^2; needs degree >= 2.
    """
    if mu.n < 2:
        raise ValueError("expected signature must have degree >= 2")
    m = project(mu, (2,))
    var = 2.0 * project(mu, (2, 2)) - m * m
    return m, var


# ---------------------------------------------------------------------------
# Persistence


def model_to_dict(model):
    spec = asdict(model.spec)
    return {
        "kind": "es",
        "spec": spec,
        "feature_words": [list(w) for w in model.feature_words],
        "target": "r_next"
        if model.spec.mode == "reduced"
        else [list(w) for w in model.target_words],
        "coefficients": model.coefficients.tolist(),
        "diagnostics": {
            k: (v.tolist() if isinstance(v, np.ndarray) else v)
            for k, v in model.diagnostics.items()
        },
    }


def model_from_dict(obj):
    if obj.get("kind") != "es":
        raise ValueError(f"not a signature regression model: kind={obj.get('kind')!r}")
    spec = ESModelSpec(**obj["spec"])
    coeffs = np.asarray(obj["coefficients"], dtype=float)
    if coeffs.shape != (spec.n_targets, spec.n_features):
        raise ValueError("coefficient shape does not match the model spec")
    return FittedESModel(
        spec=spec, coefficients=coeffs, diagnostics=obj.get("diagnostics", {})
    )


def save_model(model, path):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path):
    with open(path) as fh:
        return model_from_dict(json.load(fh))
