"""S-N curve, Palmgren-Miner accumulation and equivalent damage load."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DomainError
from .rainflow import cycle_arrays

__all__ = ["SNCurve", "DamageSeries", "cycles_to_failure", "miner_damage", "damage_series", "edl"]

CONVENTIONS = ("amplitude", "range")


@dataclass(frozen=True)
class SNCurve:
    """Power-law S-N curve ``s**k * N = K``.

    ``s_convention`` says whether ``s`` is a cycle amplitude or a cycle range.
    """

    k: float
    K: float
    s_convention: str = "amplitude"

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise DomainError(f"S-N exponent k must be positive, got {self.k}")
        if not (self.K > 0 and math.isfinite(self.K)):
            raise DomainError(f"S-N constant K must be positive, got {self.K}")
        if self.s_convention not in CONVENTIONS:
            raise DomainError(f"s_convention must be one of {CONVENTIONS}")

    def with_convention(self, conv):
        """Same material expressed in another convention.

        A range is twice an amplitude, so ``K`` scales by ``2**k``.
        """
        if conv == self.s_convention:
            return self
        factor = 2.0 ** self.k
        K = self.K * factor if conv == "range" else self.K / factor
        return SNCurve(self.k, K, conv)

    def load_of(self, amplitude):
        """The S-N load variable for a cycle of the given amplitude."""
        amplitude = np.asarray(amplitude, dtype=float)
        return 2.0 * amplitude if self.s_convention == "range" else amplitude

    def cycle_damage(self, amplitude):
        return self.load_of(amplitude) ** self.k / self.K


def cycles_to_failure(s, sn):
    """``N = K / s**k``; raises :class:`DomainError` for ``s <= 0``."""
    if not s > 0:
        raise DomainError(f"load level must be positive, got {s}")
    return sn.K / s ** sn.k


def _increments(cycles, sn):
    amp, _, w, _, end = cycle_arrays(cycles)
    return w * sn.cycle_damage(amp), end


def miner_damage(cycles, sn):
    """Linear damage sum ``D = sum(weight * s**k / K)`` over counted cycles."""
    if not cycles:
        return 0.0
    inc, end = _increments(cycles, sn)
    # same grouping and order as damage_series, so both agree bit for bit
    return float(np.cumsum(np.bincount(end, weights=inc))[-1])


@dataclass(frozen=True)
class DamageSeries:
    """Instantaneous and accumulated damage on a time axis."""

    t: np.ndarray
    increment: np.ndarray
    accumulated: np.ndarray

    @classmethod
    def from_increments(cls, t, increment):
        increment = np.asarray(increment, dtype=float)
        return cls(np.asarray(t, dtype=float), increment, np.cumsum(increment))

    @property
    def final(self):
        return float(self.accumulated[-1]) if len(self.accumulated) else 0.0

    def scaled(self, c):
        return DamageSeries.from_increments(self.t, self.increment * c)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "increment", "accumulated"])
            for row in zip(self.t, self.increment, self.accumulated):
                w.writerow([repr(float(x)) for x in row])


def damage_series(cycles, sn, source):
    """Damage increments placed at the time of each cycle's closing extremum.

    Parameters
    ----------
    cycles : list of Cycle
    sn : SNCurve
    source : TimeSeries
        Supplies the time axis; cycle indices must lie inside it.
    """
    t = np.asarray(source.t)
    inc = np.zeros(len(t))
    if cycles:
        d, end = _increments(cycles, sn)
        if end.min() < 0 or end.max() >= len(t):
            raise DataError("cycle index outside the source series")
        inc = np.bincount(end, weights=d, minlength=len(t))
    return DamageSeries.from_increments(t, inc)


def edl(total_damage, duration, f_eq, sn):
    """Equivalent damage load.

    The constant load (in the curve's convention) that, cycled at ``f_eq`` Hz
    for ``duration`` seconds, produces ``total_damage``.
    """
    if total_damage < 0 or not math.isfinite(total_damage):
        raise DomainError("total damage must be >= 0")
    if not duration > 0 or not f_eq > 0:
        raise DomainError("duration and f_eq must be positive")
    return (sn.K * total_damage / (f_eq * duration)) ** (1.0 / sn.k)
