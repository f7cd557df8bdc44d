"""Seeded synthetic traffic count generators.

Two shapes stand in for real captures: a noisy sinusoid (seasonal
traffic with a fixed period) and a smoothed, re-centred random walk
(wavelike traffic with no fixed period).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .ingest import BinnedSeries


@dataclass(frozen=True)
class SynthParams:
    n_bins: int = 600
    base_rate: float = 100.0
    amplitude: float = 0.0
    period_steps: int = 20
    smoothing: int = 10
    noise_sd: float = 0.0
    seed: int = 0
    step_seconds: float = 30.0

    def __post_init__(self):
        if self.n_bins < 1:
            raise ParameterError("n_bins must be positive")
        if not self.base_rate > 0:
            raise ParameterError("base_rate must be positive")
        if self.amplitude < 0 or self.noise_sd < 0:
            raise ParameterError("amplitude and noise_sd must be non-negative")
        if self.amplitude > self.base_rate:
            raise ParameterError("amplitude must not exceed base_rate")


def _rng(seed):
    return np.random.default_rng(int(seed) & 0xFFFF_FFFF_FFFF_FFFF)


def _to_counts(rates, step_seconds):
    # np.rint rounds half to even
    return BinnedSeries(np.maximum(0.0, np.rint(rates)).astype(np.int64), step_seconds)


def gen_seasonal(params: SynthParams) -> BinnedSeries:
    """``max(0, round(base + amplitude*sin(2*pi*t/period) + noise))``."""
    P = params.period_steps
    if P < 2:
        raise ParameterError("period_steps must be >= 2")
    if params.n_bins < 3 * P:
        raise ParameterError("n_bins must be at least 3 * period_steps")
    t = np.arange(params.n_bins)
    # phase from t mod P so noiseless output repeats exactly
    wave = params.amplitude * np.sin(2 * np.pi * (t % P) / P)
    noise = _rng(params.seed).normal(0.0, params.noise_sd, size=params.n_bins)
    return _to_counts(params.base_rate + wave + noise, params.step_seconds)


def gen_cyclical(params: SynthParams) -> BinnedSeries:
    """Base rate plus a ``smoothing``-wide moving average of a random walk."""
    w = params.smoothing
    if w < 1:
        raise ParameterError("smoothing must be >= 1")
    if params.n_bins < 10 * w:
        raise ParameterError("n_bins must be at least 10 * smoothing")
    steps = _rng(params.seed).normal(0.0, params.noise_sd, size=params.n_bins + w - 1)
    walk = np.cumsum(steps)
    smooth = np.convolve(walk, np.full(w, 1.0 / w), mode="valid")
    smooth -= smooth.mean()
    return _to_counts(params.base_rate + smooth, params.step_seconds)
