"""Inverting signatures: series reconstruction and mixture-weight recovery.

Two exact inverse problems. First, the time-joined signature of a series
determines the series: the coordinates of words (1, ..., 1, 2) with k-1 ones,
scaled by (k-1)!, equal sum_i t_i^{k-1} * dr_i, so the value jumps dr solve a
Vandermonde system in the observation times. Second, given finitely many
pairwise distinct signatures, shuffle-built linear forms sigma_i satisfying
sigma_i(S_j) = delta_ij extract mixture weights from an expected signature.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericalError
from .paths import TimeSeries
from .tensor import (
    LinearForm,
    apply_form,
    form_add,
    form_scale,
    form_shuffle_mul,
    project,
    unit_form,
    words_of_length,
)

__all__ = [
    "reconstruct_time_series",
    "build_separating_forms",
    "recover_mixture_weights",
]

CONDITION_LIMIT = 1e12
MAX_MIXTURE_COMPONENTS = 16


def reconstruct_time_series(sig, times):
    """Recover the series observed at the given times from its signature.

    The signature must come from the time-joined embedding (with the absolute
    time anchor) of a series observed exactly at ``times``, truncated at
    degree >= len(times). Solves T dr = A with T[k, i] = t_i^k and
    A[k] = k! * coordinate of (1, ..., 1, 2) with k ones, then cumulative-sums
    the jumps into values.
    """
    times = np.asarray(times, dtype=float).reshape(-1)
    m = times.size
    if m < 1:
        raise ValueError("need at least one observation time")
    if m > 1 and not np.all(np.diff(times) > 0):
        raise ValueError("times must be strictly increasing")
    if sig.n < m:
        raise ValueError(
            f"signature degree {sig.n} too low to reconstruct {m} points"
        )
    A = np.array(
        [
            math.factorial(k) * project(sig, (1,) * k + (2,))
            for k in range(m)
        ]
    )
    T = np.vander(times, N=m, increasing=True).T
    cond = np.linalg.cond(T)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise NumericalError(
            f"ill-conditioned reconstruction system (cond ~ {cond:.3e}); "
            "times too close or series too long"
        )
    jumps = np.linalg.solve(T, A)
    return TimeSeries(times, np.cumsum(jumps))


def _find_separating_word(si, sj, max_degree):
    """Smallest word (by degree, then storage order) splitting two signatures."""
    scale = 1.0
    for k in range(1, max_degree + 1):
        diffs = si.levels[k] - sj.levels[k]
        scale = max(scale, np.abs(si.levels[k]).max(), np.abs(sj.levels[k]).max())
        hits = np.nonzero(np.abs(diffs) > 1e-12 * scale)[0]
        if hits.size:
            return words_of_length(si.d, k)[hits[0]]
    return None


def build_separating_forms(signatures):
    """Linear forms sigma_i with sigma_i(S_j) = delta_ij on the given list.

    Each sigma_i is the shuffle product over j != i of the affine factor
    a_ij * <empty word> + b_ij * <separating word I_ij>, where

        a_ij = pi(S_j) / (pi(S_j) - pi(S_i)),   b_ij = -1 / (pi(S_j) - pi(S_i))

    with pi the coordinate of I_ij. The factor is 1 on S_i and 0 on S_j, and
    shuffle products multiply pointwise on signatures, so the product kills
    every other component. An empty product (single signature) is the unit
    form. Raises ValueError when two signatures cannot be told apart at the
    available degree.
    """
    sigs = list(signatures)
    if not sigs:
        raise ValueError("need at least one signature")
    if len(sigs) > MAX_MIXTURE_COMPONENTS:
        raise ValueError(
            f"{len(sigs)} components exceed the supported maximum of "
            f"{MAX_MIXTURE_COMPONENTS} (shuffle expansion grows combinatorially)"
        )
    d = sigs[0].d
    if any(s.d != d for s in sigs):
        raise ValueError("signatures must share one alphabet dimension")
    max_degree = min(s.n for s in sigs)
    forms = []
    for i, si in enumerate(sigs):
        sigma = unit_form(d)
        for j, sj in enumerate(sigs):
            if j == i:
                continue
            w = _find_separating_word(si, sj, max_degree)
            if w is None:
                raise ValueError(
                    f"signatures {i} and {j} agree on all words up to degree "
                    f"{max_degree}; cannot separate at this truncation"
                )
            pi_i = project(si, w)
            pi_j = project(sj, w)
            a = pi_j / (pi_j - pi_i)
            b = -1.0 / (pi_j - pi_i)
            factor = form_add(
                form_scale(a, unit_form(d)), LinearForm(d, {w: b})
            )
            sigma = form_shuffle_mul(sigma, factor)
        forms.append(sigma)
    return forms


def recover_mixture_weights(expected_sig, signatures):
    """Weights lambda_i from an expected signature sum_i lambda_i S_i.

    Evaluates the separating forms on the expected signature. For a true
    mixture the result is non-negative and sums to 1 up to numerical error.
    """
    forms = build_separating_forms(signatures)
    needed = max(f.degree for f in forms)
    if expected_sig.n < needed:
        raise ValueError(
            f"expected signature degree {expected_sig.n} below the "
            f"separating-form degree {needed}"
        )
    return np.array([apply_form(f, expected_sig) for f in forms])
