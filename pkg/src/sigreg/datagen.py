"""Seeded synthetic data: AR, polynomial AR, a regime mixture, ARCH, and a
Stratonovich diffusion driven by (t, W_t).

Every generator records the true one-step conditional mean alongside the
samples, because the cross-validation experiments score predictions against
that mean rather than against the noisy next observation. Discrete-time
series live on the integer grid t = 0, 1, 2, ...; recurrences start from
zeros and discard a burn-in prefix. Noise is standard normal scaled by a
configurable sigma (default 0.7, chosen so the plain-AR dataset produces
hold-out errors on the scale the downstream comparisons expect).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .paths import TimeSeries

__all__ = [
    "LabeledSeries",
    "DiffusionSet",
    "DEFAULT_SIGMA",
    "DEFAULT_AR_PHI",
    "gen_ar",
    "gen_poly_ar",
    "gen_mix_poly_ar",
    "gen_arch",
    "gen_diffusion",
    "generate",
]

DEFAULT_SIGMA = 0.7
DEFAULT_BURN_IN = 200
DEFAULT_AR_PHI = (0.0, 0.6, 0.15, -0.1)
DEFAULT_ARCH_ALPHA = (0.2, 0.3)
DEFAULT_ARCH_BETA = (0.0, 0.5)
EXPLOSION_LIMIT = 1e8


@dataclass(frozen=True, eq=False)
class LabeledSeries:
    """A series plus the true conditional means (and variances when known).

    true_means[k] is E[r_{k+1} | history up to k]; the last entry forecasts
    the observation just past the end of the series.
    """

    ts: TimeSeries
    true_means: np.ndarray
    true_vars: np.ndarray | None = None

    def __post_init__(self):
        if len(self.true_means) != len(self.ts):
            raise ValueError("true_means must align with the series")
        if self.true_vars is not None and len(self.true_vars) != len(self.ts):
            raise ValueError("true_vars must align with the series")


def _run_recurrence(mean_fn, state_len, n, sigma, seed, burn_in):
    """Drive x_j = mean(state) + sigma * z_j from a zero state.

    Returns (values, means) where means[k] is the conditional mean of the
    observation one past index k (so it lines up with LabeledSeries).
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if burn_in < 0:
        raise ValueError("burn-in must be non-negative")
    rng = np.random.default_rng(seed)
    total = burn_in + n
    z = rng.standard_normal(total)
    x = np.empty(total)
    means = np.empty(total + 1)
    state = np.zeros(state_len)  # (x_{j-1}, x_{j-2}, ...)
    for j in range(total):
        means[j] = mean_fn(state)
        x[j] = means[j] + sigma * z[j]
        if abs(x[j]) > EXPLOSION_LIMIT:
            raise NumericalError(
                f"recurrence exploded at step {j} (|x| > {EXPLOSION_LIMIT:g})"
            )
        state = np.concatenate([[x[j]], state[:-1]])
    means[total] = mean_fn(state)
    values = x[burn_in:]
    return values, means[burn_in + 1 : total + 1]


def _as_labeled(values, means, true_vars=None):
    t = np.arange(values.size, dtype=float)
    return LabeledSeries(TimeSeries(t, values), means, true_vars)


def gen_ar(
    n,
    phi=DEFAULT_AR_PHI,
    sigma=DEFAULT_SIGMA,
    seed=0,
    burn_in=DEFAULT_BURN_IN,
):
    """Linear autoregression r_{t+1} = phi_0 + sum_i phi_i r_{t-i+1} + noise."""
    phi = np.asarray(phi, dtype=float)
    if phi.size < 2:
        raise ValueError("phi must hold an intercept and at least one lag")
    p = phi.size - 1
    companion = np.zeros((p, p))
    companion[0] = phi[1:]
    if p > 1:
        companion[1:, :-1] = np.eye(p - 1)
    radius = np.max(np.abs(np.linalg.eigvals(companion)))
    if radius >= 1.0:
        warnings.warn(
            f"autoregression is non-stationary (spectral radius {radius:.3f})",
            stacklevel=2,
        )

    def mean_fn(state):
        return phi[0] + float(phi[1:] @ state[:p])

    return _as_labeled(*_run_recurrence(mean_fn, p, n, sigma, seed, burn_in))


def _poly_ar_mean(s):
    """Quadratic conditional mean given state s = (r_t, r_{t-1}, r_{t-2})."""
    return 0.2 * s[2] + 0.1 * s[0] * (s[1] - s[0])


def _mix_poly_ar_mean(s):
    # ties (r_t = 0) fall in the lower branch c = 0.8
    c = 0.4 if s[0] > 0 else 0.8
    return -0.6 * s[2] - 0.15 * s[1] + c * s[0] - 0.015 * s[1] ** 2


def gen_poly_ar(n, sigma=DEFAULT_SIGMA, seed=0, burn_in=DEFAULT_BURN_IN):
    """Quadratic mean: m_t = 0.2 r_{t-2} + 0.1 r_t (r_{t-1} - r_t)."""
    return _as_labeled(*_run_recurrence(_poly_ar_mean, 3, n, sigma, seed, burn_in))


def gen_mix_poly_ar(n, sigma=DEFAULT_SIGMA, seed=0, burn_in=DEFAULT_BURN_IN):
    """Two quadratic regimes switched on the sign of the current value.

    m_t = -0.6 r_{t-2} - 0.15 r_{t-1} + c r_t - 0.015 r_{t-1}^2 with c = 0.4
    when r_t > 0 and c = 0.8 otherwise.
    """
    return _as_labeled(
        *_run_recurrence(_mix_poly_ar_mean, 3, n, sigma, seed, burn_in)
    )


def gen_arch(
    n,
    alpha=DEFAULT_ARCH_ALPHA,
    beta=DEFAULT_ARCH_BETA,
    seed=0,
    burn_in=DEFAULT_BURN_IN,
):
    """ARCH noise around a linear mean.

    r_k = mu_k + eps_k with mu_k = beta_0 + sum_i beta_i r_{k-i},
    eps_k = sigma_k z_k and sigma_k^2 = alpha_0 + sum_i alpha_i eps_{k-i}^2.
    Records both the conditional mean and the conditional variance.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if alpha.size < 1 or alpha[0] <= 0:
        raise ValueError("alpha_0 must be positive")
    if np.any(alpha[1:] < 0):
        raise ValueError("alpha_i must be non-negative")
    if alpha.size > 1 and np.any(alpha[1:] >= 1.0):
        warnings.warn(
            "ARCH coefficient >= 1: unconditional variance is infinite",
            stacklevel=2,
        )
    q = alpha.size - 1
    pb = beta.size - 1
    rng = np.random.default_rng(seed)
    total = burn_in + n
    z = rng.standard_normal(total)
    x = np.empty(total)
    mus = np.empty(total + 1)
    vars_ = np.empty(total + 1)
    r_state = np.zeros(max(pb, 1))
    e_state = np.zeros(max(q, 1))
    for j in range(total):
        mus[j] = beta[0] + float(beta[1:] @ r_state[:pb]) if pb else float(beta[0])
        vars_[j] = alpha[0] + float(alpha[1:] @ (e_state[:q] ** 2)) if q else float(alpha[0])
        eps = np.sqrt(vars_[j]) * z[j]
        x[j] = mus[j] + eps
        if abs(x[j]) > EXPLOSION_LIMIT:
            raise NumericalError(f"ARCH recurrence exploded at step {j}")
        r_state = np.concatenate([[x[j]], r_state[:-1]])
        e_state = np.concatenate([[eps], e_state[:-1]])
    mus[total] = beta[0] + float(beta[1:] @ r_state[:pb]) if pb else float(beta[0])
    vars_[total] = (
        alpha[0] + float(alpha[1:] @ (e_state[:q] ** 2)) if q else float(alpha[0])
    )
    return _as_labeled(
        x[burn_in:], mus[burn_in + 1 :], vars_[burn_in + 1 :]
    )


@dataclass(frozen=True, eq=False)
class DiffusionSet:
    """Simulated driver paths (t, W_t) with terminal responses Y_T."""

    paths: list
    terminal: np.ndarray
    resampled: int

    def increments(self):
        """Stacked segment increments of all drivers, shape (B, steps, 2)."""
        out = np.empty((len(self.paths), len(self.paths[0]) - 1, 2))
        for i, ts in enumerate(self.paths):
            out[i, :, 0] = np.diff(ts.t)
            out[i, :, 1] = np.diff(ts.r)
        return out


def _heun_terminal(dW, step, a, b, y_cap=1e6):
    """Heun terminal values for given Brownian increments, rows = paths.

    Predictor-corrector on dY = a (1 - Y) dX1 + b Y^2 dX2 with X1 = t and
    dX2 = the supplied increments; second-order in step for a fixed polygonal
    driver. Rows that overflow y_cap are zeroed and flagged in the ok mask.
    """
    rows, n_steps = dW.shape
    y = np.zeros(rows)
    ok = np.ones(rows, dtype=bool)
    for i in range(n_steps):
        f = a * (1.0 - y)
        g = b * y * y
        ybar = y + f * step + g * dW[:, i]
        fbar = a * (1.0 - ybar)
        gbar = b * ybar * ybar
        y = y + 0.5 * (f + fbar) * step + 0.5 * (g + gbar) * dW[:, i]
        bad = ~np.isfinite(y) | (np.abs(y) > y_cap)
        if np.any(bad):
            ok &= ~bad
            y = np.where(bad, 0.0, y)
    return y, ok


def gen_diffusion(
    samples,
    T=0.25,
    step=None,
    a=1.0,
    b=2.0,
    seed=0,
    y_cap=1e6,
    max_resample_rounds=50,
):
    """Stratonovich dY = a (1 - Y) dX1 + b Y^2 dX2 along X = (t, W_t), Y_0 = 0.

    Integrated with the Heun predictor-corrector, which converges to the
    Stratonovich solution; the drift step doubles as the exact ODE when b = 0.
    The Y^2 term can blow up on extreme Brownian excursions, so trajectories
    exceeding y_cap are re-drawn (deterministically, continuing the generator
    stream) and counted in the result.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    if step is None:
        step = T / 500.0
    if step > T / 10.0:
        raise ValueError("step too coarse; need step <= T/10")
    n_steps = int(round(T / step))
    rng = np.random.default_rng(seed)
    t_grid = step * np.arange(n_steps + 1)

    def integrate(dW):
        return _heun_terminal(dW, step, a, b, y_cap)

    dW = np.sqrt(step) * rng.standard_normal((samples, n_steps))
    y, ok = integrate(dW)
    resampled = 0
    rounds = 0
    while not np.all(ok):
        rounds += 1
        if rounds > max_resample_rounds:
            raise NumericalError(
                "diffusion keeps exploding; lower the step or the horizon"
            )
        bad = np.nonzero(~ok)[0]
        resampled += bad.size
        fresh = np.sqrt(step) * rng.standard_normal((bad.size, n_steps))
        y_new, ok_new = integrate(fresh)
        dW[bad] = fresh
        y[bad] = y_new
        ok[bad] = ok_new
    paths = [
        TimeSeries(t_grid, np.concatenate([[0.0], np.cumsum(dW[i])]))
        for i in range(samples)
    ]
    return DiffusionSet(paths=paths, terminal=y, resampled=resampled)


def generate(kind, n, sigma=DEFAULT_SIGMA, seed=0, burn_in=DEFAULT_BURN_IN, **kw):
    """Name-based dispatch used by the command line."""
    if kind == "ar":
        return gen_ar(n, kw.get("phi", DEFAULT_AR_PHI), sigma, seed, burn_in)
    if kind == "poly_ar":
        return gen_poly_ar(n, sigma, seed, burn_in)
    if kind == "mix_poly_ar":
        return gen_mix_poly_ar(n, sigma, seed, burn_in)
    if kind == "arch":
        return gen_arch(
            n,
            kw.get("alpha", DEFAULT_ARCH_ALPHA),
            kw.get("beta", DEFAULT_ARCH_BETA),
            seed,
            burn_in,
        )
    raise ValueError(f"unknown generator kind {kind!r}")
