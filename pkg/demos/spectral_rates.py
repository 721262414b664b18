"""
Damage rates from the power spectral density
============================================

"""
from fatiguebench import (SNCurve, bandwidth_params, benasciutti_rate, count_cycles,
                          estimate_psd, extract_turning_points, miner_damage,
                          narrowband_rate, spectral_moments)
from fatiguebench.synth import bandpassed_noise

sn = SNCurve(k=4, K=1.0, s_convention="range")

# from a narrow band to a broad one: the narrow-band rate grows conservative
for rel_bw in (0.05, 0.5, 1.2):
    s = bandpassed_noise(f0=1.0, rel_bw=rel_bw, fs=20.0, dur=5000.0, seed=1)
    m = spectral_moments(estimate_psd(s))
    bw = bandwidth_params(m)
    d_rfc = miner_damage(count_cycles(extract_turning_points(s)), sn) / s.duration
    d_nb = narrowband_rate(m, sn)
    d_b, fac = benasciutti_rate(m, sn, return_factor=True)
    print(f"bandwidth {rel_bw:4.2f}: alpha1 {bw.alpha1:.3f} alpha2 {bw.alpha2:.3f}")
    print(f"    rainflow {d_rfc:.4f}/s  narrow-band {d_nb:.4f}/s  corrected {d_b:.4f}/s "
          f"(factor {fac:.3f})")
