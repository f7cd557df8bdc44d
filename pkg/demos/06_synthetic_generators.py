"""Synthetic packet-count generators.

Both generators are seeded, so the same parameters give the same
series every time.
"""
import numpy as np

from trafficarma import SynthParams, gen_cyclical, gen_seasonal

p = SynthParams(n_bins=60, base_rate=100, amplitude=40, period_steps=12, noise_sd=0, seed=9)
s = gen_seasonal(p)
print("seasonal, no noise:", s.counts[:12].tolist())
print("repeats every 12 steps:", np.array_equal(s.counts[:12], s.counts[12:24]))

c = gen_cyclical(SynthParams(n_bins=120, base_rate=100, smoothing=8, noise_sd=2, seed=9))
print("cyclical:", c.counts[:12].tolist())
print("deterministic:", gen_cyclical(SynthParams(n_bins=120, base_rate=100, smoothing=8, noise_sd=2, seed=9)) == c)
