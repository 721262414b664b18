"""Load-history containers, CSV ingestion, turning points and level grids.

Every estimator in the package consumes a :class:`TimeSeries` or the
:class:`TurningPoints` skeleton extracted from it.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, NonFiniteValue, NonMonotoneTime, OutOfGrid

__all__ = [
    "TimeSeries",
    "TurningPoints",
    "LevelGrid",
    "DiscreteTPSeries",
    "load_series",
    "extract_turning_points",
    "discretize",
]


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TimeSeries:
    """Sampled load history.

    Parameters
    ----------
    t : array-like
        Sample times in seconds, strictly increasing.
    v : array-like
        Load values (stress, moment, ...) in user units.
    label : str
        Channel name.
    """

    t: np.ndarray
    v: np.ndarray
    label: str = "load"

    def __post_init__(self):
        t = _frozen(self.t)
        v = _frozen(self.v)
        if t.ndim != 1 or v.ndim != 1 or len(t) != len(v):
            raise DataError("t and v must be 1-D arrays of equal length")
        if len(t) < 2:
            raise DataError("a time series needs at least 2 samples")
        bad = np.flatnonzero(~np.isfinite(v))
        if bad.size:
            raise NonFiniteValue(f"non-finite load value at sample {bad[0]}", index=int(bad[0]))
        bad = np.flatnonzero(~np.isfinite(t))
        if bad.size:
            raise NonFiniteValue(f"non-finite time at sample {bad[0]}", index=int(bad[0]))
        bad = np.flatnonzero(np.diff(t) <= 0)
        if bad.size:
            raise NonMonotoneTime(f"time not strictly increasing at sample {bad[0] + 1}",
                                  index=int(bad[0] + 1))
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)

    @classmethod
    def from_values(cls, v, dt=1.0, label="load"):
        """Build a series with uniform spacing ``dt`` starting at 0."""
        v = np.asarray(v, dtype=float)
        return cls(np.arange(len(v)) * dt, v, label)

    def __len__(self):
        return len(self.v)

    @property
    def duration(self):
        return float(self.t[-1] - self.t[0])


@dataclass(frozen=True)
class TurningPoints:
    """Alternating extrema of a load history.

    ``idx`` points into the source series, ``v`` holds the extremum values.
    """

    idx: np.ndarray
    v: np.ndarray
    source_len: int

    def __post_init__(self):
        object.__setattr__(self, "idx", _frozen(self.idx, dtype=np.int64))
        object.__setattr__(self, "v", _frozen(self.v))

    def __len__(self):
        return len(self.v)

    @classmethod
    def from_values(cls, v):
        """Wrap an already alternating value sequence (indices 0..n-1)."""
        v = np.asarray(v, dtype=float)
        return cls(np.arange(len(v)), v, len(v))


@dataclass(frozen=True)
class LevelGrid:
    """Uniform discretization of ``[lo, hi]`` into ``n_levels`` bins."""

    n_levels: int
    lo: float
    hi: float
    edges: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.n_levels) != self.n_levels or self.n_levels < 1:
            raise ValueError("n_levels must be a positive integer")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise ValueError("grid needs finite lo < hi")
        object.__setattr__(self, "n_levels", int(self.n_levels))
        object.__setattr__(self, "edges", _frozen(np.linspace(self.lo, self.hi, self.n_levels + 1)))

    @classmethod
    def covering(cls, values, n_levels):
        """Smallest grid spanning ``values``; degenerate ranges are widened by 1."""
        lo, hi = float(np.min(values)), float(np.max(values))
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        return cls(n_levels, lo, hi)

    @property
    def width(self):
        return (self.hi - self.lo) / self.n_levels

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def bin_of(self, values):
        """Bin index of each value; the last bin includes its right edge."""
        values = np.asarray(values, dtype=float)
        outside = np.flatnonzero((values < self.lo) | (values > self.hi) | ~np.isfinite(values))
        if outside.size:
            i = int(outside[0])
            raise OutOfGrid(f"value {values.flat[i]!r} at index {i} outside [{self.lo}, {self.hi}]",
                            index=i)
        b = np.floor((values - self.lo) / self.width).astype(np.int64)
        return np.clip(b, 0, self.n_levels - 1)

    def to_dict(self):
        return {"n_levels": self.n_levels, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class DiscreteTPSeries:
    """Turning points expressed as level (bin) indices of a grid."""

    bins: np.ndarray
    idx: np.ndarray
    grid: LevelGrid

    def __post_init__(self):
        object.__setattr__(self, "bins", _frozen(self.bins, dtype=np.int64))
        object.__setattr__(self, "idx", _frozen(self.idx, dtype=np.int64))

    def __len__(self):
        return len(self.bins)

    def values(self):
        """Bin-center load value of every point."""
        return self.grid.centers[self.bins]


def load_series(path, columns=(0, 1), delimiter=",", label=None):
    """Read a two-column (time, value) CSV file.

    Parameters
    ----------
    path : str or Path
        UTF-8 text file. A header row is optional and detected when its
        selected fields are not numeric.
    columns : pair of (str or int)
        Time and value columns, by header name or 0-based index.
    delimiter : str
        Field separator.
    label : str, optional
        Channel label; defaults to the value column header or ``"load"``.

    Raises
    ------
    DataError
        Malformed rows (with line number), too few samples.
    NonMonotoneTime, NonFiniteValue
        Contract violations of :class:`TimeSeries`.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [(n, r) for n, r in enumerate(csv.reader(fh, delimiter=delimiter), start=1)
                if r and any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: empty file")

    header = None
    first = rows[0][1]
    if any(isinstance(c, str) for c in columns) or not _numeric_row(first, columns):
        header = [c.strip() for c in first]
        rows = rows[1:]
    cols = []
    for c in columns:
        if isinstance(c, str):
            if header is None or c not in header:
                raise DataError(f"{path}: column {c!r} not found in header")
            cols.append(header.index(c))
        else:
            cols.append(int(c))
    ti, vi = cols

    t, v = [], []
    for line, row in rows:
        try:
            tt = float(row[ti])
            vv = float(row[vi])
        except (IndexError, ValueError):
            raise DataError(f"{path}:{line}: malformed row {delimiter.join(row)!r}", line=line)
        if not math.isfinite(tt) or not math.isfinite(vv):
            raise NonFiniteValue(f"{path}:{line}: non-finite value", index=len(v), line=line)
        if t and tt <= t[-1]:
            raise NonMonotoneTime(f"{path}:{line}: time {tt} not after {t[-1]}", index=len(t), line=line)
        t.append(tt)
        v.append(vv)
    if len(t) < 2:
        raise DataError(f"{path}: fewer than 2 samples")
    if label is None:
        label = header[vi] if header else "load"
    return TimeSeries(np.array(t), np.array(v), label)


def _numeric_row(row, columns):
    try:
        for c in columns:
            float(row[int(c)])
    except (IndexError, ValueError):
        return False
    return True


def _extrema(v):
    """Positions (into ``v``) of alternating extrema, endpoints included.

    Plateaus collapse to their first sample.
    """
    n = len(v)
    if n < 2:
        return np.arange(n)
    d = np.diff(v)
    moving = np.flatnonzero(d != 0)
    if moving.size == 0:
        return np.array([0])
    sgn = np.sign(d[moving])
    # extremum sits where the earlier of two opposite nonzero steps ends
    rev = moving[:-1][sgn[1:] != sgn[:-1]] + 1
    keep = np.concatenate(([0], rev, [n - 1]))
    return np.unique(keep)


def _alternate(vals):
    """Re-enforce strict alternation on a value sequence; returns kept positions."""
    pos = _extrema(vals)
    return pos


def extract_turning_points(s, min_range=0.0):
    """Alternating extrema of a load history.

    Parameters
    ----------
    s : TimeSeries or array-like
        The load history. Only the value sequence matters.
    min_range : float
        Interior extrema pairs whose range is below this are removed, smallest
        first, until none remain. 0 keeps every extremum.

    Returns
    -------
    TurningPoints
        Always contains the first and last sample.
    """
    if min_range < 0:
        raise ValueError("min_range must be >= 0")
    if isinstance(s, (TimeSeries, TurningPoints)):
        v = np.asarray(s.v, dtype=float)
    else:
        v = np.asarray(s, dtype=float)
    pos = _extrema(v)
    if min_range > 0 and len(pos) > 3:
        pos = _range_filter(v, pos, min_range)
    base_idx = s.idx if isinstance(s, TurningPoints) else np.arange(len(v))
    src_len = s.source_len if isinstance(s, TurningPoints) else len(v)
    return TurningPoints(base_idx[pos], v[pos], src_len)


def _range_filter(v, pos, h):
    pos = list(pos)
    while len(pos) > 3:
        vals = v[pos]
        r = np.abs(np.diff(vals))[1:-1]  # pairs with both points interior
        if r.size == 0:
            break
        j = int(np.argmin(r))
        if r[j] >= h:
            break
        del pos[j + 1:j + 3]
        keep = _extrema(v[pos])
        pos = [pos[k] for k in keep]
    return np.array(pos, dtype=np.int64)


def discretize(tp, grid):
    """Map turning points onto the bins of ``grid``.

    Consecutive equal bins merge and dominated points are dropped so the
    bin sequence alternates strictly.
    """
    bins = grid.bin_of(tp.v)
    keep = _alternate(bins.astype(float))
    return DiscreteTPSeries(bins[keep], np.asarray(tp.idx)[keep], grid)
