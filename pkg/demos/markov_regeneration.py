"""
Regenerating load histories from a rainflow matrix
==================================================

"""
import numpy as np

from fatiguebench import (LevelGrid, SNCurve, TurningPoints, build_rfm, count_cycles,
                          discretize, extract_turning_points, miner_damage)
from fatiguebench.markov import intensity, mc_damage, rfm_to_markov, simulate, stationary
from fatiguebench.synth import bandpassed_noise

sn = SNCurve(k=4, K=1.0)
s = bandpassed_noise(f0=1.0, rel_bw=0.8, fs=20.0, dur=600.0, seed=3)
tp = extract_turning_points(s)

# discretize to 10 levels and build the matrix the chain will be fitted to
grid = LevelGrid.covering(tp.v, 10)
dtp = discretize(tp, grid)
source = count_cycles(TurningPoints(dtp.idx, dtp.values(), len(s)))
rfm = build_rfm(source, grid)
model = rfm_to_markov(rfm)
print(f"{int(rfm.total)} counted cycles, {len(model.P)} states, "
      f"{int(model.absorbing.sum())} absorbing")

pi = stationary(model)
print("most visited levels:", np.argsort(pi)[::-1][:4] % grid.n_levels)

# continuous-time view at the observed turning-point rate
Q = intensity(model, rate=(len(tp) - 1) / s.duration)
print(f"generator row sums within {np.abs(Q.Q.sum(axis=1)).max():.1e} of zero")

# an ensemble of regenerated histories, each as long as the source
finals = [mc_damage(simulate(model, len(tp), seed), model, sn).final for seed in range(50)]
ref = miner_damage(source, sn)
print(f"source damage {ref:.4f}, ensemble mean {np.mean(finals):.4f} "
      f"+- {np.std(finals) / np.sqrt(len(finals)):.4f}")
