"""
Rainflow counting on a short load history
=========================================

"""
import numpy as np

from fatiguebench import (LevelGrid, TurningPoints, build_rfm, count_cycles, discretize,
                          extract_turning_points, histograms)
from fatiguebench.synth import bandpassed_noise

# the textbook nine-point history
v = np.array([-2, 1, -3, 5, -1, 3, -4, 4, -2], dtype=float)
for c in count_cycles(TurningPoints.from_values(v)):
    kind = "full" if c.weight == 1 else "half"
    print(f"{kind:4s} range {c.range:4.1f}  mean {c.mean:5.2f}  points {c.start_idx}-{c.end_idx}")

# a random-ish signal: plateaus and noise collapse to turning points first
s = bandpassed_noise(f0=1.0, rel_bw=0.6, fs=20.0, dur=120.0, seed=4)
tp = extract_turning_points(s, min_range=0.1)
cycles = count_cycles(tp)
print(f"\n{len(s)} samples -> {len(tp)} turning points -> {len(cycles)} cycles")

# rainflow matrix on 8 levels (rows: minimum level, columns: maximum level)
grid = LevelGrid.covering(tp.v, 8)
dtp = discretize(tp, grid)
rfm = build_rfm(count_cycles(TurningPoints(dtp.idx, dtp.values(), len(s))), grid)
np.set_printoptions(linewidth=120)
print(rfm.counts)

(amp, amp_edges), _ = histograms(cycles, 6)
for n, lo, hi in zip(amp, amp_edges[:-1], amp_edges[1:]):
    print(f"amplitude {lo:5.2f}..{hi:5.2f}: {n:6.1f} cycles")
