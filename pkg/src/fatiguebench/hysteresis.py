"""Preisach relay-bank damage estimator.

A bank of weighted two-threshold relays is driven sample by sample; the
accumulated damage is the total variation of the weighted relay output.
Works online: each update touches every relay once and keeps no history.
"""
from __future__ import annotations

import json
import logging
import math

import numpy as np
from scipy.optimize import brentq

from .damage import DamageSeries
from .errors import DataError, DomainError
from .signal import TimeSeries, TurningPoints

log = logging.getLogger(__name__)

__all__ = [
    "Relay",
    "RelayBank",
    "relay_step",
    "preisach_bound",
    "make_paper_bank",
    "make_uniform_bank",
    "stream_update",
    "accumulated_damage",
    "calibrate_to_reference",
    "THREE_RELAY_THRESHOLD",
]

THREE_RELAY_THRESHOLD = 0.66


class Relay:
    """Two-threshold switch: on at ``v >= tau``, off at ``v <= mu``, else hold."""

    __slots__ = ("mu", "tau", "w")

    def __init__(self, mu, tau, w=0):
        if mu > tau:
            raise DomainError("relay needs mu <= tau")
        if w not in (0, 1):
            raise DomainError("relay state must be 0 or 1")
        self.mu, self.tau, self.w = float(mu), float(tau), int(w)

    def __repr__(self):
        return f"Relay(mu={self.mu!r}, tau={self.tau!r}, w={self.w})"


def relay_step(r, v):
    # the switch-on branch is checked first so a degenerate mu == tau relay
    # is on at v == tau
    if v >= r.tau:
        r.w = 1
    elif v <= r.mu:
        r.w = 0
    return r.w


def initial_state(mu, tau):
    """Relays below the anti-diagonal (``mu + tau < 0``) start switched on."""
    return (np.asarray(mu) + np.asarray(tau) < 0).astype(np.int8)


class RelayBank:
    """Weighted parallel connection of relays over the Preisach triangle.

    Parameters
    ----------
    mu, tau : array-like
        Lower and upper thresholds with ``-M <= mu <= tau <= M``.
    weights : array-like
        Nonnegative relay weights.
    M : float
        Bound of the Preisach plane; inputs beyond ``+-M`` are clamped.
    w : array-like, optional
        Initial states; defaults to :func:`initial_state`.
    """

    def __init__(self, mu, tau, weights, M, w=None):
        mu = np.asarray(mu, dtype=float)
        tau = np.asarray(tau, dtype=float)
        nu = np.asarray(weights, dtype=float)
        if not (mu.shape == tau.shape == nu.shape and mu.ndim == 1):
            raise DataError("mu, tau and weights must be 1-D arrays of equal length")
        if not M > 0:
            raise DomainError("Preisach bound M must be positive")
        eps = 1e-12 * M
        if np.any(mu > tau) or np.any(mu < -M - eps) or np.any(tau > M + eps):
            raise DomainError("thresholds must satisfy -M <= mu <= tau <= M")
        if np.any(nu < 0):
            raise DomainError("relay weights must be nonnegative")
        self.mu, self.tau, self.nu, self.M = mu, tau, nu, float(M)
        self.w = initial_state(mu, tau) if w is None else np.asarray(w, dtype=np.int8).copy()
        self.last_output = float(self.nu @ self.w)
        self.n_clamped = 0

    def __len__(self):
        return len(self.mu)

    @property
    def relays(self):
        return [Relay(m, t, int(w)) for m, t, w in zip(self.mu, self.tau, self.w)]

    def output(self):
        return float(self.nu @ self.w)

    def scale(self, c):
        """Multiply every weight by ``c`` in place."""
        self.nu = self.nu * c
        self.last_output = self.output()
        return self

    def copy(self):
        b = RelayBank(self.mu, self.tau, self.nu, self.M, self.w)
        b.n_clamped = self.n_clamped
        return b

    def snapshot(self):
        """JSON checkpoint of thresholds, weights and states."""
        return json.dumps({"M": self.M, "mu": self.mu.tolist(), "tau": self.tau.tolist(),
                           "nu": self.nu.tolist(), "w": self.w.tolist(),
                           "last_output": self.last_output})

    @classmethod
    def restore(cls, text):
        d = json.loads(text)
        b = cls(d["mu"], d["tau"], d["nu"], d["M"], d["w"])
        b.last_output = float(d["last_output"])
        return b


def preisach_bound(s, absolute=True):
    """Bound ``M`` of the Preisach plane for a load history.

    The default reads the bound as ``max(|min s|, |max s|)``. ``absolute=False``
    gives the literal ``max(min s, max s)``, which is just ``max s``.
    """
    v = np.asarray(s.v if isinstance(s, (TimeSeries, TurningPoints)) else s, dtype=float)
    if v.size == 0:
        raise DataError("empty series")
    lo, hi = float(v.min()), float(v.max())
    return max(abs(lo), abs(hi)) if absolute else max(lo, hi)


def _golden_weight():
    # real root of a + a**2 + a**3 = 1
    return brentq(lambda a: a + a * a + a ** 3 - 1.0, 0.0, 1.0, xtol=1e-16, rtol=1e-15)


def make_paper_bank(M):
    """Three relays at ``+-0.66 M`` with weights ``a, a**2, a**3`` summing to 1."""
    if not M > 0:
        raise DomainError("M must be positive")
    c = THREE_RELAY_THRESHOLD * M
    mu = np.array([-c, c, -c])
    tau = np.array([c, c, -c])
    a = _golden_weight()
    return RelayBank(mu, tau, np.array([a, a * a, a ** 3]), M)


def make_uniform_bank(n_levels, M, sn):
    """Relays on every grid pair of a uniform ``n_levels`` grid over ``[-M, M]``.

    The weight of relay ``(x_i, x_j)`` is half the mixed second difference of
    the per-cycle damage ``D(mu, tau)`` (zero for ``tau <= mu``), so that a
    closed loop between grid points ``x_a < x_b`` switches relays up and down
    with total variation exactly ``D(x_a, x_b)``.
    """
    if int(n_levels) != n_levels or n_levels < 2:
        raise DomainError("n_levels must be an integer >= 2")
    if not M > 0:
        raise DomainError("M must be positive")
    n = int(n_levels)
    x = np.linspace(-M, M, n)

    def D(i, j):
        # per-cycle damage between grid points, zero off the upper triangle
        i, j = np.asarray(i), np.asarray(j)
        amp = np.where(j > i, (x[np.clip(j, 0, n - 1)] - x[np.clip(i, 0, n - 1)]) / 2.0, 0.0)
        return np.where(j > i, sn.cycle_damage(amp), 0.0)

    i, j = np.triu_indices(n, k=1)
    nu = 0.5 * (D(i, j) - D(i + 1, j) - D(i, j - 1) + D(i + 1, j - 1))
    # linear damage laws give exact zeros that rounding can push below 0
    nu[(nu < 0) & (nu > -1e-12 * np.abs(nu).max())] = 0.0
    return RelayBank(x[i], x[j], nu, M)


def stream_update(bank, v):
    """Feed one sample; returns ``(output, damage_increment)``."""
    if v > bank.M or v < -bank.M:
        if bank.n_clamped == 0:
            log.warning("input %g outside Preisach bound %g; clamping", v, bank.M)
        bank.n_clamped += 1
        v = min(max(v, -bank.M), bank.M)
    up = v >= bank.tau
    down = (v <= bank.mu) & ~up
    w = bank.w
    w[up] = 1
    w[down] = 0
    h = float(bank.nu @ w)
    delta = abs(h - bank.last_output)
    bank.last_output = h
    return h, delta


def accumulated_damage(bank, s):
    """Fold :func:`stream_update` over a series.

    Increments are stamped at the sample that caused them: times of a
    :class:`TimeSeries`, source indices of :class:`TurningPoints`, or
    positions for a plain array. The bank is updated in place.
    """
    if isinstance(s, TimeSeries):
        v, t = s.v, s.t
    elif isinstance(s, TurningPoints):
        v, t = s.v, s.idx.astype(float)
    else:
        v = np.asarray(s, dtype=float)
        t = np.arange(len(v), dtype=float)
    inc = np.empty(len(v))
    for n, x in enumerate(v):
        inc[n] = stream_update(bank, float(x))[1]
    return DamageSeries.from_increments(t, inc)


def calibrate_to_reference(series_damage, reference_final):
    """Factor ``c`` so that ``c * final`` equals ``reference_final``."""
    final = series_damage.final if isinstance(series_damage, DamageSeries) else float(series_damage)
    if not final > 0 or not math.isfinite(final):
        raise DomainError("hysteresis damage is zero; cannot calibrate")
    return reference_final / final
