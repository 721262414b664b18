"""
Linear damage accumulation and the equivalent load
===================================================

"""
import numpy as np

from fatiguebench import SNCurve, count_cycles, damage_series, edl, extract_turning_points
from fatiguebench.synth import bandpassed_noise

# steel-like curve with slope 4, stated for load amplitudes
sn = SNCurve(k=4, K=1e12)
s = bandpassed_noise(f0=0.5, rel_bw=0.4, fs=10.0, dur=600.0, seed=11, std=80.0)

cycles = count_cycles(extract_turning_points(s))
ds = damage_series(cycles, sn, s)
print(f"damage after {s.duration:.0f} s: {ds.final:.4e}")

# damage is counted when a cycle closes, so the curve is a staircase
for frac in (0.25, 0.5, 0.75, 1.0):
    i = int(frac * (len(ds.t) - 1))
    print(f"  t = {ds.t[i]:6.1f} s  D = {ds.accumulated[i]:.4e}")

# one constant-amplitude load at 1 Hz giving the same damage
s_eq = edl(ds.final, s.duration, 1.0, sn)
print(f"equivalent amplitude at 1 Hz: {s_eq:.2f}")

# the same material stated for ranges gives twice the load and the same damage
rng_sn = sn.with_convention("range")
print(f"range convention: EDL {edl(ds.final, s.duration, 1.0, rng_sn):.2f}, "
      f"damage {damage_series(cycles, rng_sn, s).final:.4e}")

# doubling the loads multiplies damage by 2**k
s2 = type(s)(s.t, 2 * s.v)
print("scaling check:", np.isclose(damage_series(count_cycles(extract_turning_points(s2)),
                                                 sn, s2).final, 16 * ds.final))
