"""Time series and their piecewise-linear path embeddings.

The central embedding is the 2-D time-joined staircase: starting from
(t_0, 0), rise to the first value, then alternate horizontal time moves and
vertical value jumps. Its signature determines the series, which is what the
recovery module exploits. A plain piecewise-linear interpolation (t_i, r_i)
is also provided.

Paths are parameterized with unit time per segment; signatures do not depend
on the parameterization, only on the traversed polyline.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TimeSeries",
    "PiecewiseLinearPath",
    "embed_time_joined",
    "embed_piecewise_linear",
    "rebase_window",
    "read_series_csv",
    "write_series_csv",
]


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Scalar observations r at strictly increasing timestamps t."""

    t: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float).reshape(-1)
        r = np.asarray(self.r, dtype=float).reshape(-1)
        if t.size != r.size:
            raise ValueError("t and r must have equal length")
        if t.size < 1:
            raise ValueError("time series must contain at least one point")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(r))):
            raise ValueError("time series contains non-finite entries")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("timestamps must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "r", r)

    def __len__(self):
        return self.t.size

    @classmethod
    def from_points(cls, points):
        pts = list(points)
        return cls(np.array([p[0] for p in pts]), np.array([p[1] for p in pts]))

    def points(self):
        return list(zip(self.t.tolist(), self.r.tolist()))

    def window(self, start, stop):
        """Sub-series of indices start..stop-1."""
        return TimeSeries(self.t[start:stop], self.r[start:stop])


@dataclass(frozen=True, eq=False)
class PiecewiseLinearPath:
    """Polyline in R^d; vertices is (V, d) with V >= 2.

    Consecutive vertices may coincide: zero segments contribute the identity
    to the signature.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.shape[0] < 2:
            raise ValueError("path needs at least two vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("path contains non-finite vertices")
        object.__setattr__(self, "vertices", v)

    @property
    def d(self):
        return self.vertices.shape[1]

    @property
    def n_segments(self):
        return self.vertices.shape[0] - 1

    def increments(self):
        """Per-segment increment vectors, shape (n_segments, d)."""
        return np.diff(self.vertices, axis=0)

    def point_at(self, s):
        """Position at parameter s in [0, n_segments] (linear in between)."""
        s = np.asarray(s, dtype=float)
        grid = np.arange(self.vertices.shape[0], dtype=float)
        return np.stack(
            [np.interp(s, grid, self.vertices[:, j]) for j in range(self.d)],
            axis=-1,
        )


def embed_time_joined(ts):
    """Staircase embedding of a series into R^2.

    Vertex sequence: (t_0, 0), (t_0, r_0), then for each later point first the
    horizontal move to (t_{i+1}, r_i) and then the vertical jump to
    (t_{i+1}, r_{i+1}). The value coordinate starts at 0 so that the path, and
    hence its signature, pins down the actual levels r_i rather than only
    their increments. Output has exactly 2*(len-1) + 2 vertices.
    """
    t, r = ts.t, ts.r
    verts = [(t[0], 0.0), (t[0], r[0])]
    for i in range(1, t.size):
        verts.append((t[i], r[i - 1]))
        verts.append((t[i], r[i]))
    return PiecewiseLinearPath(np.array(verts))


def embed_piecewise_linear(ts):
    """Linear interpolation of (t_i, r_i) as a 2-D path.

    A single-point series degenerates to one zero segment.
    """
    verts = np.column_stack([ts.t, ts.r])
    if verts.shape[0] == 1:
        verts = np.vstack([verts, verts])
    return PiecewiseLinearPath(verts)


def rebase_window(ts, origin_policy="shift"):
    """Shift timestamps so the window starts at 0, or pass through unchanged.

    Sliding-window features need "shift" to stay stationary; "absolute" keeps
    the raw timestamps (and makes the embedded signature remember them).
    """
    if origin_policy == "shift":
        return TimeSeries(ts.t - ts.t[0], ts.r)
    if origin_policy == "absolute":
        return TimeSeries(ts.t.copy(), ts.r.copy())
    raise ValueError(f"unknown origin policy {origin_policy!r}")


def write_series_csv(ts, path, true_means=None, true_vars=None):
    """Write a series as CSV with header t,r (plus m_true / v_true if given)."""
    header = ["t", "r"]
    cols = [ts.t, ts.r]
    if true_means is not None:
        header.append("m_true")
        cols.append(np.asarray(true_means, dtype=float))
    if true_vars is not None:
        header.append("v_true")
        cols.append(np.asarray(true_vars, dtype=float))
    for c in cols[1:]:
        if c.size != ts.t.size:
            raise ValueError("auxiliary columns must match the series length")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*cols):
            writer.writerow([repr(float(x)) for x in row])


def read_series_csv(path):
    """Read a series CSV; returns (TimeSeries, extras dict).

    The file must carry columns named t and r; any other columns (for example
    m_true from the generators) come back in the extras dict as float arrays.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if "t" not in header or "r" not in header:
            raise ValueError(f"{path}: expected columns t and r, got {header}")
        rows = [row for row in reader if row]
    data = np.array([[float(x) for x in row] for row in rows], dtype=float)
    if data.size == 0:
        raise ValueError(f"{path}: no data rows")
    cols = {name: data[:, i] for i, name in enumerate(header)}
    ts = TimeSeries(cols.pop("t"), cols.pop("r"))
    return ts, cols
