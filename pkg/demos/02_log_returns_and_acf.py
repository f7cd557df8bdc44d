"""Log returns of packet counts and their autocorrelation.

Counts are shifted by one before the log so empty steps are allowed.
The transform is invertible given the first count.
"""
import numpy as np

from trafficarma import BinnedSeries, acf, invert_log_return, log_return
from trafficarma.series import significance_band

counts = BinnedSeries([100, 120, 90, 0, 45, 110])
r = log_return(counts)
print("returns:", np.round(r.values, 4).tolist())
print("reconstructed:", np.round(invert_log_return(r), 9).tolist())

# %% ACF of white noise stays inside the 95% band most of the time.
rng = np.random.default_rng(3)
x = rng.normal(size=2500)
vec = acf(x, 40)
band = significance_band(len(x))
inside = np.mean(np.abs(vec.values[1:]) <= band)
print(f"band {band:.4f}, fraction of lags inside: {inside:.2f}")

# %% A periodic series has ACF near one at its period.
t = np.arange(400)
wave = np.sin(2 * np.pi * t / 25)
print("acf at lag 25:", round(acf(wave, 30).values[25], 3))
