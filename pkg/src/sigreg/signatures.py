"""Truncated signatures of piecewise-linear paths.

A straight segment with increment v has signature exp(v); concatenating
segments multiplies their signatures in the tensor algebra. That identity is
the entire computation here, plus a batched variant over many equal-length
increment sequences (used for sliding-window features, where per-window
Python overhead would dominate).

An independent brute-force quadrature oracle approximates individual iterated
integrals directly from the definition; it is deliberately naive (first
order) and exists to cross-check the algebraic path.
"""

from __future__ import annotations

import numpy as np

from .paths import embed_piecewise_linear, embed_time_joined
from .tensor import tensor_exp, tensor_mul, unit_tensor

__all__ = [
    "signature",
    "signature_of_time_series",
    "signature_batch",
    "time_joined_increments",
    "oracle_iterated_integral",
]


def signature(path, n):
    """Signature of a piecewise-linear path, truncated at degree n.

    Ordered product of exp(segment increment) over the segments; level 0 is
    1 and level 1 is the total increment. Zero segments are skipped.
    """
    if n < 0:
        raise ValueError("truncation degree must be non-negative")
    acc = unit_tensor(path.d, n)
    for v in path.increments():
        if np.any(v):
            acc = tensor_mul(acc, tensor_exp(v, n))
    return acc


def time_joined_increments(ts):
    """Segment increments of the time-joined embedding, with a time anchor.

    Layout: (t_0, 0) anchor, (0, r_0) initial rise, then per step the
    horizontal (dt, 0) and vertical (0, dr) moves. The anchor runs the time
    coordinate from 0 up to t_0, so the signature carries absolute
    timestamps; it is a zero segment (and a no-op) whenever the window was
    rebased to start at 0.
    """
    t, r = ts.t, ts.r
    m = t.size
    inc = np.zeros((2 * m, 2))
    inc[0, 0] = t[0]
    inc[1, 1] = r[0]
    if m > 1:
        inc[2::2, 0] = np.diff(t)
        inc[3::2, 1] = np.diff(r)
    return inc


def signature_of_time_series(ts, n):
    """Signature of the time-joined embedding of a series.

    Computed directly as exp(t_0 e1) (X) exp(r_0 e2) (X) prod over steps of
    exp(dt e1) (X) exp(dr e2). For series starting at t_0 = 0 this equals
    signature(embed_time_joined(ts), n) exactly; for t_0 > 0 the leading
    factor additionally anchors the time coordinate at its absolute value,
    which series reconstruction from the signature relies on.
    """
    acc = unit_tensor(2, n)
    for v in time_joined_increments(ts):
        if np.any(v):
            acc = tensor_mul(acc, tensor_exp(v, n))
    return acc


def signature_batch(increments, n):
    """Signatures of B increment sequences at once.

    increments has shape (B, L, d): B paths, each of L straight segments.
    Returns shape (B, total_dim(d, n)), rows flattened level-major in the
    same order as tensor.as_vector. Columns 0..total_dim(d, m)-1 are exactly
    the degree-m truncation for any m <= n, so lower degrees come free by
    slicing.
    """
    inc = np.asarray(increments, dtype=float)
    if inc.ndim != 3:
        raise ValueError("increments must have shape (B, L, d)")
    B, L, d = inc.shape
    levels = [np.ones((B, 1))] + [np.zeros((B, d**k)) for k in range(1, n + 1)]
    for seg in range(L):
        v = inc[:, seg, :]
        if not np.any(v):
            continue
        # exp levels of this segment: E[k] = v^{(X) k} / k!
        exps = [np.ones((B, 1))]
        for k in range(1, n + 1):
            prev = exps[k - 1]
            exps.append(
                (prev[:, :, None] * v[:, None, :]).reshape(B, -1) / k
            )
        new = []
        for k in range(n + 1):
            acc = np.zeros((B, d**k))
            for j in range(k + 1):
                left = levels[j]
                right = exps[k - j]
                acc += (left[:, :, None] * right[:, None, :]).reshape(B, -1)
            new.append(acc)
        levels = new
    return np.concatenate(levels, axis=1)


def _series_signature_vector(ts, n):
    """as_vector(signature_of_time_series(ts, n)) via the batch kernel."""
    inc = time_joined_increments(ts)
    return signature_batch(inc[None, :, :], n)[0]


def oracle_iterated_integral(path, w, steps):
    """Direct quadrature of one coordinate iterated integral.

    Approximates the integral of dX^{(i_1)} ... dX^{(i_k)} over the ordered
    simplex by a left-endpoint Riemann recursion on a uniform parameter grid
    with the given number of steps. First-order accurate: halving the step
    roughly halves the error. Meant as an independent oracle, not for
    production use.
    """
    w = tuple(w)
    if steps < 10 * max(len(w), 1):
        raise ValueError("steps must be at least 10x the word length")
    if not w:
        return 1.0
    for letter in w:
        if not 1 <= letter <= path.d:
            raise ValueError(f"letter {letter} outside path dimension {path.d}")
    s = np.linspace(0.0, path.n_segments, steps + 1)
    pts = path.point_at(s)
    dX = np.diff(pts, axis=0)
    # F_j at grid node k = integral over u_1 < ... < u_j < s_k
    F = np.ones(steps + 1)
    for letter in w:
        contrib = F[:-1] * dX[:, letter - 1]
        F = np.concatenate([[0.0], np.cumsum(contrib)])
    return float(F[-1])


def embed_series(ts, embedding="time-joined"):
    """Dispatch helper: embed a series with the named embedding."""
    if embedding == "time-joined":
        return embed_time_joined(ts)
    if embedding == "linear":
        return embed_piecewise_linear(ts)
    raise ValueError(f"unknown embedding {embedding!r}")
