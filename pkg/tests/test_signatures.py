"""Signature computation against direct quadrature and closed forms."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_path, random_series
from sigreg.paths import PiecewiseLinearPath, TimeSeries, embed_time_joined
from sigreg.signatures import (
    embed_series,
    oracle_iterated_integral,
    signature,
    signature_batch,
    signature_of_time_series,
    time_joined_increments,
)
from sigreg.tensor import as_vector, tensor_exp, tensor_mul, total_dim, word_index


def coord(sig, w):
    return sig.levels[len(w)][word_index(w, sig.d)]


def test_single_segment_is_exponential():
    v = np.array([0.3, -1.1])
    path = PiecewiseLinearPath(np.vstack([np.zeros(2), v]))
    sig = signature(path, 4)
    ref = tensor_exp(v, 4)
    for a, b in zip(sig.levels, ref.levels):
        assert np.allclose(a, b, atol=1e-14)


def test_opposite_segments_cancel():
    v = np.array([0.7, 0.2])
    path = PiecewiseLinearPath(np.vstack([np.zeros(2), v, np.zeros(2)]))
    sig = signature(path, 4)
    assert sig.levels[0][0] == pytest.approx(1.0)
    for lev in sig.levels[1:]:
        assert np.allclose(lev, 0.0, atol=1e-14)


def test_chen_concatenation(rng):
    left = random_path(rng, max_segments=4)
    shift = left.vertices[-1]
    tail = random_path(rng, max_segments=4)
    right_verts = tail.vertices + shift
    glued = PiecewiseLinearPath(np.vstack([left.vertices, right_verts[1:]]))
    prod = tensor_mul(signature(left, 3), signature(PiecewiseLinearPath(right_verts), 3))
    sig = signature(glued, 3)
    for a, b in zip(sig.levels, prod.levels):
        assert np.allclose(a, b, atol=1e-12)


def test_unit_step_series_level_two():
    ts = TimeSeries(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    sig = signature_of_time_series(ts, 2)
    assert coord(sig, (1,)) == pytest.approx(1.0)
    assert coord(sig, (2,)) == pytest.approx(1.0)
    assert coord(sig, (1, 2)) == pytest.approx(1.0)  # time moves first
    assert coord(sig, (2, 1)) == pytest.approx(0.0)
    assert coord(sig, (1, 1)) == pytest.approx(0.5)
    assert coord(sig, (2, 2)) == pytest.approx(0.5)


def test_anchored_two_point_series():
    ts = TimeSeries(np.array([1.0, 2.0]), np.array([2.0, 5.0]))
    sig = signature_of_time_series(ts, 2)
    assert coord(sig, (2,)) == pytest.approx(5.0)
    assert coord(sig, (1, 2)) == pytest.approx(8.0)


def test_value_coordinate_telescopes(rng):
    for _ in range(5):
        ts = random_series(rng, int(rng.integers(2, 9)))
        sig = signature_of_time_series(ts, 2)
        assert coord(sig, (2,)) == pytest.approx(ts.r[-1], abs=1e-12)
        assert coord(sig, (1,)) == pytest.approx(ts.t[-1], abs=1e-12)


def test_series_signature_matches_path_signature(rng):
    # with t_0 = 0 the anchor is a zero segment, so both routes agree
    ts = random_series(rng, 6)
    ts = TimeSeries(ts.t - ts.t[0], ts.r)
    a = signature_of_time_series(ts, 3)
    b = signature(embed_time_joined(ts), 3)
    for x, y in zip(a.levels, b.levels):
        assert np.allclose(x, y, atol=1e-12)


def test_time_joined_increment_layout():
    ts = TimeSeries(np.array([2.0, 3.0, 4.5]), np.array([1.0, -1.0, 0.5]))
    inc = time_joined_increments(ts)
    assert inc.shape == (6, 2)
    assert np.array_equal(inc[0], [2.0, 0.0])
    assert np.array_equal(inc[1], [0.0, 1.0])
    assert np.array_equal(inc[2], [1.0, 0.0])
    assert np.array_equal(inc[3], [0.0, -2.0])
    assert np.array_equal(inc[4], [1.5, 0.0])
    assert np.array_equal(inc[5], [0.0, 1.5])
    assert np.sum(inc[:, 0]) == pytest.approx(ts.t[-1])
    assert np.sum(inc[:, 1]) == pytest.approx(ts.r[-1])


def test_signature_degree_zero_and_validation(rng):
    path = random_path(rng)
    sig = signature(path, 0)
    assert sig.n == 0 and sig.levels[0][0] == 1.0
    with pytest.raises(ValueError):
        signature(path, -1)


def test_batch_matches_loop(rng):
    B, L = 5, 7
    inc = rng.normal(0.0, 0.4, size=(B, L, 2))
    inc[2, 3] = 0.0  # zero segment inside a batch row
    out = signature_batch(inc, 3)
    assert out.shape == (B, total_dim(2, 3))
    for b in range(B):
        verts = np.vstack([np.zeros(2), np.cumsum(inc[b], axis=0)])
        ref = as_vector(signature(PiecewiseLinearPath(verts), 3))
        assert np.allclose(out[b], ref, atol=1e-12)


def test_batch_prefix_gives_lower_degree(rng):
    inc = rng.normal(0.0, 0.4, size=(3, 5, 2))
    hi = signature_batch(inc, 4)
    lo = signature_batch(inc, 2)
    assert np.allclose(hi[:, : total_dim(2, 2)], lo, atol=1e-14)


def test_batch_shape_validation():
    with pytest.raises(ValueError):
        signature_batch(np.zeros((4, 2)), 2)


def test_oracle_first_coordinate_exact(rng):
    path = random_path(rng, max_segments=5)
    total = np.sum(path.increments(), axis=0)
    assert oracle_iterated_integral(path, (1,), 50) == pytest.approx(
        total[0], abs=1e-12
    )


def test_oracle_repeated_letter_closed_form(rng):
    # pi^(2,2) = (net rise)^2 / 2 for any path; quadrature converges to it
    path = random_path(rng, max_segments=5)
    closed = np.sum(path.increments(), axis=0)[1] ** 2 / 2
    coarse = abs(oracle_iterated_integral(path, (2, 2), 20000) - closed)
    fine = abs(oracle_iterated_integral(path, (2, 2), 80000) - closed)
    assert fine < coarse / 2
    assert fine < 1e-4


def test_oracle_first_order_convergence(rng):
    path = random_path(rng, max_segments=4)
    w = (1, 2)
    exact = coord(signature(path, 2), w)
    e1 = abs(oracle_iterated_integral(path, w, 2000) - exact)
    e2 = abs(oracle_iterated_integral(path, w, 4000) - exact)
    assert e2 < e1
    assert e1 / max(e2, 1e-300) == pytest.approx(2.0, rel=0.25)


def test_oracle_agrees_to_high_accuracy():
    # small path, many steps: quadrature error well below 1e-9
    rng = np.random.default_rng(7)
    steps = rng.normal(0.0, 0.005, size=(3, 2))
    path = PiecewiseLinearPath(np.vstack([np.zeros(2), np.cumsum(steps, axis=0)]))
    sig = signature(path, 3)
    for w in [(1, 2), (2, 1), (1, 1, 2), (2, 2, 1)]:
        approx = oracle_iterated_integral(path, w, 2**19)
        assert abs(approx - coord(sig, w)) <= 1e-9


def test_oracle_step_requirement(rng):
    path = random_path(rng)
    with pytest.raises(ValueError):
        oracle_iterated_integral(path, (1, 2, 1), 25)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_signature_matches_oracle_property(seed, n_seg):
    rng = np.random.default_rng(seed)
    path = random_path(rng, max_segments=n_seg, scale=0.2)
    sig = signature(path, 2)
    for w in [(1, 2), (2, 1), (1, 1)]:
        approx = oracle_iterated_integral(path, w, 4000)
        assert abs(approx - coord(sig, w)) < 5e-3


def test_embed_series_dispatch(rng):
    ts = random_series(rng, 4)
    assert embed_series(ts).vertices.shape == (8, 2)
    assert embed_series(ts, "linear").vertices.shape == (4, 2)
    with pytest.raises(ValueError):
        embed_series(ts, "cubic")
