"""
Online damage with a bank of relays
===================================

"""
import numpy as np

from fatiguebench import (SNCurve, count_cycles, extract_turning_points, make_uniform_bank,
                          miner_damage, preisach_bound, stream_update)
from fatiguebench.hysteresis import RelayBank, make_paper_bank
from fatiguebench.synth import bandpassed_noise

sn = SNCurve(k=4, K=1.0)
s = bandpassed_noise(f0=1.0, rel_bw=0.8, fs=20.0, dur=300.0, seed=8)
M = preisach_bound(s)
ref = miner_damage(count_cycles(extract_turning_points(s)), sn)

# samples arrive one at a time; the bank keeps no history beyond relay states
bank = make_uniform_bank(48, M, sn)
total = 0.0
half = len(s) // 2
for v in s.v[:half]:
    total += stream_update(bank, v)[1]

# checkpoint, restore and carry on as if nothing happened
bank = RelayBank.restore(bank.snapshot())
for v in s.v[half:]:
    total += stream_update(bank, v)[1]
print(f"rainflow damage {ref:.4f}, 48-level relay bank {total:.4f}")

# finer grids close the gap
for n in (8, 16, 32, 64, 128):
    b = make_uniform_bank(n, M, sn)
    d = sum(stream_update(b, v)[1] for v in s.v)
    print(f"  {n:4d} levels: relative error {abs(d - ref) / ref:.3f}")

# the three-relay bank has no damage semantics; it only ranks histories
b3 = make_paper_bank(M)
print("three-relay weights:", np.round(b3.nu, 6), "sum", b3.nu.sum())
