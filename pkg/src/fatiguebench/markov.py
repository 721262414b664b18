"""Markov turning-point model built from a rainflow matrix.

States ``0..n-1`` are minima at level ``i``; states ``n..2n-1`` are maxima at
level ``j``. A minimum only moves to a higher maximum and a maximum only to a
lower minimum, mirroring the strict upper triangle of the rainflow matrix.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .damage import DamageSeries, damage_series
from .errors import DataError, DomainError
from .rainflow import count_cycles
from .signal import DiscreteTPSeries, LevelGrid, TimeSeries, TurningPoints

log = logging.getLogger(__name__)

__all__ = [
    "MarkovModel",
    "IntensityMatrix",
    "rfm_to_markov",
    "intensity",
    "stationary",
    "simulate",
    "transition_frequencies",
    "mc_damage",
]

ROW_TOL = 1e-12


@dataclass(frozen=True)
class MarkovModel:
    """Row-stochastic transition matrix over ``2n`` min/max states."""

    P: np.ndarray
    grid: LevelGrid

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        n2 = 2 * self.grid.n_levels
        if P.shape != (n2, n2):
            raise ValueError(f"P must be {n2}x{n2}")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > ROW_TOL):
            raise ValueError("P must be row-stochastic")
        P.setflags(write=False)
        object.__setattr__(self, "P", P)

    @property
    def n_levels(self):
        return self.grid.n_levels

    @property
    def levels(self):
        return self.grid.centers

    @property
    def absorbing(self):
        return np.diag(self.P) == 1.0

    def state_level(self, states):
        """Level index of each state."""
        return np.asarray(states) % self.n_levels

    def to_json(self):
        return json.dumps({"grid": self.grid.to_dict(), "levels": self.levels.tolist(),
                           "P": self.P.tolist()})

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        g = d["grid"]
        return cls(np.array(d["P"]), LevelGrid(g["n_levels"], g["lo"], g["hi"]))


@dataclass(frozen=True)
class IntensityMatrix:
    Q: np.ndarray
    rate: float


def rfm_to_markov(rfm):
    """Min/max alternating chain with transitions proportional to RFM counts.

    From minimum ``i`` the chain goes to maximum ``j`` with probability
    proportional to ``counts[i, j]``; from maximum ``j`` to minimum ``i``
    proportional to the same entry. States with no counts become absorbing.
    """
    C = np.asarray(rfm.counts, dtype=float)
    if np.any(np.tril(C) != 0):
        raise DataError("rainflow matrix must be strictly upper triangular")
    if not C.sum() > 0:
        raise DataError("rainflow matrix is all zero")
    n = C.shape[0]
    P = np.zeros((2 * n, 2 * n))
    P[:n, n:] = C
    P[n:, :n] = C.T
    tot = P.sum(axis=1)
    empty = tot == 0
    if np.any(empty):
        log.warning("%d unreachable states made absorbing", int(empty.sum()))
    P[~empty] /= tot[~empty, None]
    P[empty, :] = 0.0
    P[empty, np.flatnonzero(empty)] = 1.0
    # renormalize so rows sum to 1 within rounding of a single division
    P[~empty] /= P[~empty].sum(axis=1, keepdims=True)
    return MarkovModel(P, rfm.grid)


def intensity(model, rate):
    """Generator ``Q = rate * (P - I)`` of the continuous-time chain."""
    if not rate > 0:
        raise DomainError("rate must be positive")
    P = np.asarray(model.P if isinstance(model, MarkovModel) else model, dtype=float)
    Q = rate * (P - np.eye(P.shape[0]))
    # exact zero row sums: fix the diagonal from the off-diagonal entries
    off = Q.copy()
    np.fill_diagonal(off, 0.0)
    np.fill_diagonal(Q, -off.sum(axis=1))
    return IntensityMatrix(Q, float(rate))


def stationary(model, tol=1e-10, max_iter=100_000):
    """Stationary law of the chain started uniformly on non-absorbing states.

    Power iteration on the lazy chain ``(P + I) / 2``, which has the same
    fixed points and no period-2 oscillation.
    """
    P = model.P
    live = ~model.absorbing
    pi = live / live.sum() if live.any() else np.full(len(P), 1.0 / len(P))
    lazy = 0.5 * (P + np.eye(len(P)))
    for _ in range(max_iter):
        nxt = pi @ lazy
        if np.abs(nxt - pi).sum() < tol:
            return nxt / nxt.sum()
        pi = nxt
    log.warning("stationary distribution did not converge to %g", tol)
    return pi / pi.sum()


def simulate(model, n_steps, seed, return_states=False):
    """Simulate ``n_steps`` turning points of the embedded discrete chain.

    Uses a PCG64 generator seeded with ``seed``; the sequence is reproducible
    across platforms. The first state is drawn from :func:`stationary`.

    Returns
    -------
    DiscreteTPSeries
        Level indices (``idx`` is the step number). With ``return_states``
        also the raw state sequence.
    """
    if n_steps < 2:
        raise DomainError("n_steps must be >= 2")
    rng = np.random.Generator(np.random.PCG64(seed))
    cum = np.cumsum(model.P, axis=1)
    cum[:, -1] = 1.0
    u = rng.random(n_steps)
    pi_cum = np.cumsum(stationary(model))
    pi_cum[-1] = 1.0
    absorbing = model.absorbing
    states = np.empty(n_steps, dtype=np.int64)
    s = int(np.searchsorted(pi_cum, u[0], side="right"))
    states[0] = s
    n = n_steps
    for i in range(1, n_steps):
        if absorbing[s]:
            log.warning("chain trapped in absorbing state %d after %d steps; truncating", s, i)
            n = i
            break
        s = int(np.searchsorted(cum[s], u[i], side="right"))
        states[i] = s
    states = states[:n]
    sim = DiscreteTPSeries(model.state_level(states), np.arange(n), model.grid)
    return (sim, states) if return_states else sim


def transition_frequencies(states, n_states):
    """Empirical joint transition frequencies ``F[a, b]`` (summing to 1)."""
    states = np.asarray(states)
    F = np.zeros((n_states, n_states))
    np.add.at(F, (states[:-1], states[1:]), 1.0)
    return F / max(F.sum(), 1.0)


def mc_damage(sim, model, sn, duration=None, times=None):
    """Miner damage of a simulated turning-point sequence.

    Level indices become bin-center values, which are rainflow counted and
    accumulated. The time axis is the step number, uniform over ``duration``
    seconds, or the first ``len(sim)`` entries of ``times``.
    """
    vals = model.levels[np.asarray(sim.bins)]
    n = len(vals)
    if times is not None:
        t = np.asarray(times, dtype=float)[:n]
    elif duration is None:
        t = np.arange(n, dtype=float)
    else:
        t = np.linspace(0.0, float(duration), n) if n > 1 else np.zeros(1)
    if n < 2:
        return DamageSeries.from_increments(t, np.zeros(n))
    cycles = count_cycles(TurningPoints.from_values(vals))
    return damage_series(cycles, sn, TimeSeries(t, vals))
