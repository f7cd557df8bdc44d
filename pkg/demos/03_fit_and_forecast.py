"""Fitting an ARMA model and forecasting a few steps ahead.

Data are simulated from a known ARMA(2,1) so the estimates can be
checked against the truth.
"""
import numpy as np

from trafficarma import ArmaModel, check_roots, fit, forecast, simulate

truth = ArmaModel(theta=(0.5, -0.3), phi=(0.4,), sigma2=1.0)
x = simulate(truth, 20_000, seed=11)

# %% Hannan-Rissanen start, then conditional least-squares refinement.
model, resid = fit(x, 2, 1)
print("theta:", np.round(model.theta, 3), "phi:", np.round(model.phi, 3))
print("sigma2:", round(model.sigma2, 3), "burn-in:", resid.burn_in)
print(check_roots(model))

# %% Forecasts decay towards the zero mean.
print("next 5:", np.round(forecast(model, x, resid.values, 5), 4).tolist())

# %% Models round-trip through JSON.
assert ArmaModel.from_json(model.to_json()) == model
print(model.to_json())
