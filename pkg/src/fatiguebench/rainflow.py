"""Rainflow cycle counting and the rainflow matrix.

Cycles are extracted with the four-point rule; whatever remains on the stack
(the residual) is counted as half cycles, one per consecutive pair.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .signal import LevelGrid, TurningPoints

__all__ = ["Cycle", "RainflowMatrix", "count_cycles", "build_rfm", "histograms", "cycle_arrays"]


@dataclass(frozen=True)
class Cycle:
    """One counted (half) cycle.

    ``start_idx``/``end_idx`` index the source series at the two extrema
    forming the cycle; damage is attributed to ``end_idx``.
    """

    amplitude: float
    mean: float
    weight: float
    start_idx: int
    end_idx: int

    @property
    def range(self):
        return 2.0 * self.amplitude

    @property
    def lo(self):
        return self.mean - self.amplitude

    @property
    def hi(self):
        return self.mean + self.amplitude


def _cycle(a, b, ia, ib, weight):
    return Cycle(abs(b - a) / 2.0, (a + b) / 2.0, weight, int(ia), int(ib))


def count_cycles(tp):
    """Rainflow count of a turning-point sequence.

    Parameters
    ----------
    tp : TurningPoints or array-like
        Alternating extrema. A plain array is treated as values with
        indices ``0..n-1``.

    Returns
    -------
    list of Cycle
        Closed cycles (weight 1.0) in the order they close, followed by the
        residual half cycles (weight 0.5) in time order.
    """
    if not isinstance(tp, TurningPoints):
        tp = TurningPoints.from_values(tp)
    v, idx = tp.v, tp.idx
    if len(v) < 2:
        return []

    full = []
    stack = []  # positions into v
    for p in range(len(v)):
        stack.append(p)
        while len(stack) >= 4:
            a, b, c, d = (v[i] for i in stack[-4:])
            inner = abs(c - b)
            if inner <= abs(b - a) and inner <= abs(d - c):
                i1, i2 = stack[-3], stack[-2]
                full.append(_cycle(v[i1], v[i2], idx[i1], idx[i2], 1.0))
                del stack[-3:-1]
            else:
                break
    half = [_cycle(v[i], v[j], idx[i], idx[j], 0.5) for i, j in zip(stack[:-1], stack[1:])]
    return full + half


def cycle_arrays(cycles):
    """Columns ``(amplitude, mean, weight, start_idx, end_idx)`` as arrays."""
    if not cycles:
        z = np.zeros(0)
        return z, z, z, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    amp = np.array([c.amplitude for c in cycles])
    mean = np.array([c.mean for c in cycles])
    w = np.array([c.weight for c in cycles])
    i0 = np.array([c.start_idx for c in cycles], dtype=np.int64)
    i1 = np.array([c.end_idx for c in cycles], dtype=np.int64)
    return amp, mean, w, i0, i1


@dataclass(frozen=True)
class RainflowMatrix:
    """Cycle counts binned by (min level, max level).

    ``counts[i, j]`` holds the weighted number of cycles whose minimum falls
    in bin ``i`` and maximum in bin ``j``. The matrix is strictly upper
    triangular.
    """

    counts: np.ndarray
    grid: LevelGrid

    def __post_init__(self):
        c = np.array(self.counts, dtype=float)
        n = self.grid.n_levels
        if c.shape != (n, n):
            raise ValueError(f"counts must be {n}x{n}")
        if np.any(c < 0):
            raise ValueError("counts must be nonnegative")
        if np.any(np.tril(c) != 0):
            raise ValueError("rainflow matrix must be strictly upper triangular")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def total(self):
        return float(self.counts.sum())

    def to_csv(self, path):
        np.savetxt(path, self.counts, delimiter=",", fmt="%.17g")

    def to_json(self):
        return json.dumps({"grid": self.grid.to_dict(), "counts": self.counts.tolist()})

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        g = d["grid"]
        return cls(np.array(d["counts"]), LevelGrid(g["n_levels"], g["lo"], g["hi"]))


def build_rfm(cycles, grid):
    """Bin cycles into a rainflow matrix on ``grid``.

    Cycles whose extrema fall into the same bin cannot be represented in a
    strictly triangular matrix and are dropped; this only happens when the
    cycle range is below one bin width.
    """
    counts = np.zeros((grid.n_levels, grid.n_levels))
    if cycles:
        amp, mean, w, _, _ = cycle_arrays(cycles)
        lo = grid.bin_of(mean - amp)
        hi = grid.bin_of(mean + amp)
        keep = hi > lo
        np.add.at(counts, (lo[keep], hi[keep]), w[keep])
    return RainflowMatrix(counts, grid)


def histograms(cycles, n_bins=10):
    """Weighted amplitude and mean histograms.

    Returns
    -------
    (amp_counts, amp_edges), (mean_counts, mean_edges)
        ``numpy.histogram`` style pairs. Empty input gives empty arrays.
    """
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    if not cycles:
        e = np.zeros(0)
        return (e, e), (e, e)
    amp, mean, w, _, _ = cycle_arrays(cycles)
    return _hist(amp, w, n_bins), _hist(mean, w, n_bins)


def _hist(x, w, n_bins):
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    return np.histogram(x, bins=n_bins, range=(lo, hi), weights=w)
