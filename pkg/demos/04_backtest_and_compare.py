"""Rolling-window backtests and picking an order by MSE.

Each origin fits on the trailing window and forecasts 5 steps; blocks
of three rounds cover 15 steps.
"""
from trafficarma import BacktestConfig, SynthParams, compare_orders, gen_seasonal, log_return, rolling_backtest
from trafficarma.report import render_report

counts = gen_seasonal(SynthParams(n_bins=600, base_rate=100, amplitude=50, period_steps=20, noise_sd=5, seed=2))
r = log_return(counts)

cfg = BacktestConfig(window=120, order=(2, 1))
res = rolling_backtest(r, cfg)
print(f"{len(res.origins)} origins, mse {res.mse:.6g}")
print("first origins:", res.origins[:6])

# %% Compare the two candidate orders over identical origins.
cmp = compare_orders(r, cfg, [(2, 1), (3, 0)])
print(render_report([("seasonal", o, m) for o, m in cmp.scores]))
