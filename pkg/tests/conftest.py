"""Shared helpers: seeded random paths and series for property tests."""

import numpy as np
import pytest

from sigreg.paths import PiecewiseLinearPath, TimeSeries


def random_path(rng, max_segments=8, d=2, scale=0.3):
    """Random piecewise-linear path with 1..max_segments segments."""
    n_seg = int(rng.integers(1, max_segments + 1))
    steps = rng.normal(0.0, scale, size=(n_seg, d))
    verts = np.vstack([np.zeros(d), np.cumsum(steps, axis=0)])
    return PiecewiseLinearPath(verts)


def random_series(rng, length, t_scale=1.0, r_scale=1.0):
    """Random series with strictly increasing times (gaps in [0.2, 1.5])."""
    gaps = rng.uniform(0.2, 1.5, size=length)
    t = t_scale * np.cumsum(gaps)
    r = rng.normal(0.0, r_scale, size=length)
    return TimeSeries(t, r)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
