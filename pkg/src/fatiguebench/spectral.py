"""Frequency-domain damage rates from spectral moments.

Moments use the angular-frequency convention
``lambda_m = integral (2 pi f)**m G(f) df`` over a one-sided PSD in Hz, which
makes ``lambda_0`` the variance of the load and ``lambda_2`` the variance of
its time derivative.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import signal as sps
from scipy.special import gamma

from .errors import DataError, DegenerateSignal, DomainError

log = logging.getLogger(__name__)

__all__ = [
    "PSD",
    "SpectralMoments",
    "BandwidthParams",
    "estimate_psd",
    "spectral_moments",
    "bandwidth_params",
    "narrowband_rate",
    "benasciutti_b",
    "benasciutti_factor",
    "benasciutti_rate",
    "REFERENCE_MOMENTS",
]

NARROW_BAND_EPS = 1e-9


@dataclass(frozen=True)
class PSD:
    """One-sided power spectral density (load**2 / Hz) on a frequency grid."""

    f: np.ndarray
    G: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        G = np.asarray(self.G, dtype=float)
        if f.shape != G.shape or f.ndim != 1:
            raise DataError("f and G must be 1-D arrays of equal length")
        if f.size and (f[0] < 0 or np.any(np.diff(f) <= 0)):
            raise DataError("frequencies must be nonnegative and increasing")
        if np.any(G < 0):
            raise DataError("PSD values must be nonnegative")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "G", G)

    def to_csv(self, path):
        np.savetxt(path, np.column_stack([self.f, self.G]), delimiter=",",
                   header="f,G", comments="", fmt="%.17g")


@dataclass(frozen=True)
class SpectralMoments:
    lambda0: float
    lambda1: float
    lambda2: float
    lambda4: float

    def as_tuple(self):
        return (self.lambda0, self.lambda1, self.lambda2, self.lambda4)

    def to_json(self):
        return json.dumps(asdict(self))


@dataclass(frozen=True)
class BandwidthParams:
    alpha1: float
    alpha2: float


# lambda_0, lambda_1, lambda_2, lambda_4 of the 600 s tower-bending-moment
# record used as reference material; lambda_1 < 0 cannot come from the
# angular-frequency convention above and is kept verbatim.
REFERENCE_MOMENTS = SpectralMoments(4.4071e14, -3.949e7, 2.2904e11, 2.1263e11)
REFERENCE_BENASCIUTTI_RATE = 4.0024e-12


def _default_segment(n):
    seg = 2 ** int(math.floor(math.log2(max(n // 8, 1))))
    return max(seg, min(n, 16))


def estimate_psd(s, segment_len=None, overlap=0.5, window="hann"):
    """Averaged, tapered, overlapping periodogram (Welch).

    Parameters
    ----------
    s : TimeSeries
        Must be uniformly sampled (relative dt spread below 1e-9).
    segment_len : int, optional
        Samples per segment; default is the largest power of two not above
        ``len(s) / 8``.
    overlap : float
        Fraction of overlap between segments, in [0, 1).
    window : str
        Any taper name accepted by :func:`scipy.signal.get_window`.

    Returns
    -------
    PSD
        One-sided, scaled so that its integral over f is the variance.
    """
    t = np.asarray(s.t, dtype=float)
    v = np.asarray(s.v, dtype=float)
    dt = np.diff(t)
    if np.ptp(dt) > 1e-9 * abs(dt.mean()):
        raise DataError("PSD estimation needs uniformly sampled data")
    n = len(v)
    if segment_len is None:
        segment_len = _default_segment(n)
    segment_len = int(segment_len)
    if segment_len > n:
        raise DataError(f"segment length {segment_len} exceeds series length {n}")
    if segment_len < 2:
        raise DataError("segment length must be >= 2")
    if not 0 <= overlap < 1:
        raise DomainError("overlap must be in [0, 1)")
    fs = 1.0 / dt.mean()
    f, G = sps.welch(v, fs=fs, window=window, nperseg=segment_len,
                     noverlap=int(round(overlap * segment_len)), detrend="constant",
                     scaling="density", return_onesided=True)
    meta = {"estimator": "welch", "segment_len": segment_len, "overlap": overlap,
            "window": window, "fs": fs}
    return PSD(f, np.maximum(G, 0.0), meta)


def spectral_moments(psd):
    """Moments of orders 0, 1, 2 and 4 by trapezoidal quadrature."""
    if len(psd.f) == 0:
        raise DataError("empty PSD")
    w = 2.0 * np.pi * psd.f
    lam = [float(np.trapezoid(w ** m * psd.G, psd.f)) for m in (0, 1, 2, 4)]
    return SpectralMoments(*lam)


def bandwidth_params(m):
    """``alpha1 = l1/sqrt(l0 l2)`` and ``alpha2 = l2/sqrt(l0 l4)``."""
    if not (m.lambda0 > 0 and m.lambda2 > 0 and m.lambda4 > 0):
        raise DegenerateSignal("bandwidth parameters need positive lambda0, lambda2, lambda4")
    a1 = m.lambda1 / math.sqrt(m.lambda0 * m.lambda2)
    a2 = m.lambda2 / math.sqrt(m.lambda0 * m.lambda4)
    return BandwidthParams(a1, a2)


def narrowband_rate(m, sn, peak_rate=True):
    """Narrow-band damage rate (per second) for a Gaussian load.

    ``(1/2pi) sqrt(l4/l2) (2 sqrt(2 l0))**k Gamma(1 + k/2) / K``. The factor
    ``2 sqrt(2 l0)`` scales a Rayleigh range, so ``sn`` is taken in range
    convention (an amplitude curve is converted first).

    With ``peak_rate=False`` the mean zero-upcrossing rate ``sqrt(l2/l0)``
    replaces the peak rate ``sqrt(l4/l2)``.
    """
    if not m.lambda2 > 0:
        raise DomainError("narrow-band rate needs lambda2 > 0")
    if m.lambda0 < 0 or m.lambda4 < 0:
        raise DomainError("negative even moment")
    sn = sn.with_convention("range")
    freq = math.sqrt(m.lambda4 / m.lambda2) if peak_rate else math.sqrt(m.lambda2 / m.lambda0)
    return float(freq / (2.0 * math.pi) * (2.0 * math.sqrt(2.0 * m.lambda0)) ** sn.k
            * gamma(1.0 + sn.k / 2.0) / sn.K)


def benasciutti_b(alpha1, alpha2):
    num = (alpha1 - alpha2) * (
        1.112 * (1.0 + alpha1 * alpha2 - (alpha1 + alpha2)) * math.exp(2.11 * alpha2)
        + (alpha1 - alpha2))
    return num / (alpha2 - 1.0) ** 2


def benasciutti_factor(bw, k):
    """Correction ``b + (1 - b) alpha2**(k + 1)``; exactly 1 at ``alpha2 == 1``."""
    if abs(bw.alpha2 - 1.0) < NARROW_BAND_EPS:
        return 1.0
    b = benasciutti_b(bw.alpha1, bw.alpha2)
    return b + (1.0 - b) * bw.alpha2 ** (k + 1.0)


def benasciutti_rate(m, sn, return_factor=False):
    """Narrow-band rate times the bandwidth correction factor.

    A factor outside [0, 1] is logged, not clipped.
    """
    bw = bandwidth_params(m)
    fac = benasciutti_factor(bw, sn.k)
    if not 0.0 <= fac <= 1.0:
        log.warning("Benasciutti correction factor %.6g outside [0, 1] "
                    "(alpha1=%.6g, alpha2=%.6g)", fac, bw.alpha1, bw.alpha2)
    rate = narrowband_rate(m, sn) * fac
    return (rate, fac) if return_factor else rate
