"""Labelling traffic as Seasonal or Cyclical and choosing an order.

Seasonal traffic repeats with a fixed period; cyclical traffic rises
and falls without one.
"""
from trafficarma import SynthParams, classify_pattern, gen_cyclical, gen_seasonal, select_order

seasonal = gen_seasonal(SynthParams(amplitude=50, period_steps=20, noise_sd=5, seed=1))
cyclical = gen_cyclical(SynthParams(smoothing=10, noise_sd=3, seed=1))

for name, series in [("seasonal", seasonal), ("cyclical", cyclical)]:
    label = classify_pattern(series)
    print(f"{name:9s} -> {label.kind.value:8s} period={label.period_steps} order={select_order(label)}")
