"""Rolling-origin multi-step backtests scored by MSE on log returns.

Origins start at ``window - 1`` and advance by ``horizon``.  Each
evaluation block holds ``total_ahead // horizon`` rounds (15 steps as
three 5-step forecasts by default) and blocks are repeated for as long
as complete blocks fit in the series.  At every origin the model is
fitted on exactly the trailing ``window`` values, so no forecast target
ever leaks into its own fitting window.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import IO, Optional, Sequence

import numpy as np

from . import arma
from .errors import EmptyInput, EmptyOrders, LengthMismatch, NumericError, ParameterError, TooShort
from .series import ReturnSeries


def mse(actual: Sequence[float], predicted: Sequence[float]) -> float:
    """Mean of squared differences between `actual` and `predicted`."""
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.shape != p.shape:
        raise LengthMismatch(f"length mismatch: {a.shape} vs {p.shape}")
    if a.size == 0:
        raise EmptyInput("mse of empty sequences")
    d = a - p
    return float(np.dot(d, d) / d.size)


@dataclass(frozen=True)
class BacktestConfig:
    window: int
    horizon: int = 5
    total_ahead: int = 15
    order: tuple = (3, 0)
    refit: bool = True
    fit_options: arma.FitOptions = field(default_factory=arma.FitOptions)

    def __post_init__(self):
        p, q = self.order
        object.__setattr__(self, "order", (int(p), int(q)))
        if self.horizon < 1 or self.total_ahead < 1:
            raise ParameterError("horizon and total_ahead must be positive")
        if self.total_ahead % self.horizon:
            raise ParameterError("total_ahead must be a multiple of horizon")
        if p < 0 or q < 0:
            raise ParameterError("orders must be non-negative")
        if self.window < 10 * (p + q + 1):
            raise ParameterError(
                f"window {self.window} too small for ARMA({p},{q}); need >= {10 * (p + q + 1)}"
            )

    @property
    def rounds_per_block(self):
        return self.total_ahead // self.horizon


@dataclass
class BacktestResult:
    config: BacktestConfig
    origins: list
    predicted: np.ndarray
    actual: np.ndarray
    mse: float
    per_origin_mse: list
    model_snapshots: list
    stability_flags: list

    def to_dict(self):
        cfg = self.config
        return {
            "window": cfg.window,
            "horizon": cfg.horizon,
            "total_ahead": cfg.total_ahead,
            "order": list(cfg.order),
            "refit": cfg.refit,
            "mse": self.mse,
            "origins": list(self.origins),
            "per_origin_mse": list(self.per_origin_mse),
            "predicted": [float(v) for v in self.predicted],
            "actual": [float(v) for v in self.actual],
            "model_snapshots": [m.to_dict() for m in self.model_snapshots],
            "stability_flags": list(self.stability_flags),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def write_csv(self, fh: IO[str]) -> None:
        h = self.config.horizon
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["origin", "offset", "actual", "predicted"])
        for i, o in enumerate(self.origins):
            for k in range(h):
                j = i * h + k
                writer.writerow([o, k + 1, repr(float(self.actual[j])), repr(float(self.predicted[j]))])


def origin_schedule(n: int, cfg: BacktestConfig) -> list[int]:
    """Forecast origins for a series of `n` returns (complete blocks only)."""
    blocks = (n - cfg.window) // cfg.total_ahead
    first = cfg.window - 1
    return [first + r * cfg.horizon for r in range(blocks * cfg.rounds_per_block)]


def rolling_backtest(
    returns, cfg: BacktestConfig, model: Optional[arma.ArmaModel] = None
) -> BacktestResult:
    """Rolling-window backtest of one ARMA order.

    With ``cfg.refit`` false the model is fitted once on the first
    window (or `model` is used as given) and only the residuals are
    recomputed at each origin.
    """
    values = returns.values if isinstance(returns, ReturnSeries) else np.asarray(returns, dtype=float)
    n = len(values)
    if n < cfg.window + cfg.total_ahead:
        raise TooShort(
            f"need at least window + total_ahead = {cfg.window + cfg.total_ahead} returns, got {n}"
        )
    p, q = cfg.order
    h = cfg.horizon
    origins = origin_schedule(n, cfg)
    predicted = np.empty(len(origins) * h)
    actual = np.empty(len(origins) * h)
    per_origin, snapshots, flags = [], [], []
    fixed = model
    if fixed is not None and fixed.order != cfg.order:
        raise ParameterError(f"model order {fixed.order} does not match config {cfg.order}")
    for i, o in enumerate(origins):
        hist = values[o - cfg.window + 1:o + 1]
        try:
            if fixed is None or cfg.refit:
                current, resid = arma.fit(hist, p, q, cfg.fit_options)
                if not cfg.refit:
                    fixed = current
            else:
                current = fixed
                resid = arma.residuals(current, hist)
        except NumericError as exc:
            exc.origin = o
            exc.args = (f"origin {o}: {exc}",)
            raise
        fc = arma.forecast(current, hist, resid, h)
        target = values[o + 1:o + 1 + h]
        predicted[i * h:(i + 1) * h] = fc
        actual[i * h:(i + 1) * h] = target
        per_origin.append(mse(target, fc))
        snapshots.append(current)
        flags.append(arma.check_roots(current).ar_stable)
    return BacktestResult(
        config=cfg,
        origins=origins,
        predicted=predicted,
        actual=actual,
        mse=mse(actual, predicted),
        per_origin_mse=per_origin,
        model_snapshots=snapshots,
        stability_flags=flags,
    )


@dataclass(frozen=True)
class OrderComparison:
    scores: list  # [(order, mse), ...] in input order
    best: tuple

    def to_dict(self, label=None):
        d = {
            "scores": [{"order": list(o), "mse": m} for o, m in self.scores],
            "best": list(self.best),
        }
        if label is not None:
            d = {"label": label, **d}
        return d


def compare_orders(returns, cfg_base: BacktestConfig, orders: Sequence[tuple]) -> OrderComparison:
    """Backtest each order over the same origins and pick the lowest MSE.

    Ties go to the order listed first.
    """
    if not orders:
        raise EmptyOrders("no orders to compare")
    scores = []
    for order in orders:
        cfg = BacktestConfig(
            cfg_base.window, cfg_base.horizon, cfg_base.total_ahead, tuple(order),
            cfg_base.refit, cfg_base.fit_options,
        )
        scores.append((cfg.order, rolling_backtest(returns, cfg).mse))
    best = min(scores, key=lambda s: s[1])[0]
    return OrderComparison(scores, best)
