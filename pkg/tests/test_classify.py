import json

import numpy as np
import pytest

from trafficarma.classify import (
    PatternKind, PatternLabel, classify_pattern, classify_returns, select_order,
)
from trafficarma.errors import TooShort, ZeroVariance
from trafficarma.ingest import BinnedSeries
from trafficarma.series import log_return, significance_band


def periodogram_period(values):
    """Period (in steps) of the strongest non-DC Fourier component."""
    x = np.asarray(values) - np.mean(values)
    power = np.abs(np.fft.rfft(x)) ** 2
    freqs = np.fft.rfftfreq(len(x))
    k = 1 + int(np.argmax(power[1:]))
    return 1.0 / freqs[k]


def sine_counts(seed, n=600, period=20):
    rng = np.random.default_rng(seed)
    t = np.arange(n)
    return BinnedSeries(100 + 50 * np.round(np.sin(2 * np.pi * t / period)) + np.rint(rng.normal(0, 2, n)))


def smoothed_walk(seed, n=600):
    rng = np.random.default_rng(seed)
    walk = np.cumsum(rng.standard_normal(n + 9))
    smooth = np.convolve(walk, np.ones(10) / 10, mode="valid")
    return BinnedSeries(np.rint(smooth - smooth.min() + 50))


def test_sine_counts_seasonal_with_period_20():
    series = sine_counts(0)
    oracle = periodogram_period(log_return(series).values)
    assert oracle == pytest.approx(20, abs=0.5)
    label = classify_pattern(series)
    assert label.kind is PatternKind.SEASONAL
    assert abs(label.period_steps - oracle) <= 1
    assert label.peak_acf > significance_band(len(series) - 1)


def test_poisson_noise_mostly_cyclical():
    labels = [
        classify_pattern(BinnedSeries(np.random.default_rng(s).poisson(100, 600))).kind
        for s in range(100)
    ]
    assert labels.count(PatternKind.CYCLICAL) >= 90


def test_smoothed_random_walk_mostly_cyclical():
    labels = [classify_pattern(smoothed_walk(s)).kind for s in range(100)]
    assert labels.count(PatternKind.CYCLICAL) >= 90


@pytest.mark.parametrize("k", [2, 3])
def test_integer_scaling_rarely_changes_label(k):
    from trafficarma.synth import SynthParams, gen_cyclical, gen_seasonal

    same = 0
    for s in range(100):
        gen = gen_seasonal if s % 2 else gen_cyclical
        series = gen(SynthParams(amplitude=50, noise_sd=5 if s % 2 else 3, seed=s))
        counts = np.maximum(series.counts, 1)
        a = classify_pattern(BinnedSeries(counts)).kind
        b = classify_pattern(BinnedSeries(counts * k)).kind
        same += a is b
    assert same >= 95


def test_deterministic():
    series = sine_counts(3)
    assert classify_pattern(series) == classify_pattern(series)


def test_errors():
    with pytest.raises(TooShort):
        classify_pattern(BinnedSeries(np.arange(29)))
    with pytest.raises(ZeroVariance):
        classify_pattern(BinnedSeries(np.full(60, 7)))


def test_select_order():
    assert select_order(PatternLabel(PatternKind.SEASONAL, 20, 0.7)) == (2, 1)
    assert select_order(PatternLabel(PatternKind.SEASONAL, 7, 0.3)) == (2, 1)
    assert select_order(PatternLabel(PatternKind.CYCLICAL)) == (3, 0)


def test_label_invariants_and_json():
    with pytest.raises(ValueError):
        PatternLabel(PatternKind.SEASONAL, None)
    with pytest.raises(ValueError):
        PatternLabel(PatternKind.CYCLICAL, 4)
    assert json.loads(PatternLabel(PatternKind.SEASONAL, 20, 0.5).to_json()) == {
        "kind": "Seasonal", "period_steps": 20, "peak_acf": 0.5,
    }
    assert json.loads(PatternLabel(PatternKind.CYCLICAL).to_json())["period_steps"] is None


def test_classify_returns_needs_a_negative_dip():
    # monotone-decaying ACF (random walk-like returns): never seasonal
    x = np.cumsum(np.random.default_rng(0).standard_normal(300))
    assert classify_returns(x).kind is PatternKind.CYCLICAL
