"""Reference load signals so every check runs without external data."""
from __future__ import annotations

import numpy as np

from .errors import DomainError
from .signal import TimeSeries

__all__ = ["sine", "bandpassed_noise", "white_noise"]


def _time(fs, dur):
    if not fs > 0 or not dur > 0:
        raise DomainError("fs and dur must be positive")
    n = int(round(fs * dur))
    if n < 2:
        raise DomainError("signal would have fewer than 2 samples")
    return np.arange(n) / fs


def sine(amp, freq, fs, dur, phase=0.0, offset=0.0):
    t = _time(fs, dur)
    return TimeSeries(t, offset + amp * np.sin(2 * np.pi * freq * t + phase), "sine")


def white_noise(std, fs, dur, seed):
    t = _time(fs, dur)
    rng = np.random.Generator(np.random.PCG64(seed))
    return TimeSeries(t, std * rng.standard_normal(len(t)), "white")


def bandpassed_noise(f0, rel_bw, fs, dur, seed, std=1.0):
    """Gaussian noise passed through an ideal band-pass filter.

    Parameters
    ----------
    f0 : float
        Center frequency in Hz.
    rel_bw : float
        Full bandwidth as a fraction of ``f0``.
    std : float
        Target standard deviation of the output.
    """
    if not 0 < rel_bw < 2:
        raise DomainError("relative bandwidth must be in (0, 2)")
    if not 0 < f0 * (1 + rel_bw / 2) < fs / 2:
        raise DomainError("band must lie below the Nyquist frequency")
    t = _time(fs, dur)
    rng = np.random.Generator(np.random.PCG64(seed))
    X = np.fft.rfft(rng.standard_normal(len(t)))
    f = np.fft.rfftfreq(len(t), 1.0 / fs)
    X[np.abs(f - f0) > 0.5 * rel_bw * f0] = 0.0
    x = np.fft.irfft(X, n=len(t))
    sd = x.std()
    if sd == 0:
        raise DomainError("band contains no frequency bins; increase dur or rel_bw")
    return TimeSeries(t, std * (x - x.mean()) / sd, "bandpassed")
