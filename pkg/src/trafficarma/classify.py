"""Seasonal / cyclical labelling of traffic and the matching ARMA order."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import TooShort
from .ingest import BinnedSeries
from .series import acf, log_return, significance_band

MIN_BINS = 30
MAX_LAG_CAP = 200

SEASONAL_ORDER = (2, 1)
CYCLICAL_ORDER = (3, 0)


class PatternKind(str, enum.Enum):
    SEASONAL = "Seasonal"
    CYCLICAL = "Cyclical"


@dataclass(frozen=True)
class PatternLabel:
    kind: PatternKind
    period_steps: Optional[int] = None
    peak_acf: float = float("nan")

    def __post_init__(self):
        if self.kind is PatternKind.SEASONAL and (self.period_steps is None or self.period_steps < 2):
            raise ValueError("seasonal labels need period_steps >= 2")
        if self.kind is PatternKind.CYCLICAL and self.period_steps is not None:
            raise ValueError("cyclical labels carry no period")

    def to_dict(self):
        peak = self.peak_acf
        return {
            "kind": self.kind.value,
            "period_steps": self.period_steps,
            "peak_acf": None if np.isnan(peak) else peak,
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def bartlett_band(rho, lag, n):
    """95% band at `lag` for an ACF whose lags below `lag` may be nonzero.

    ``1.96 * sqrt((1 + 2 * sum_{k<lag} rho_k**2) / n)``; equals the
    white-noise band ``1.96 / sqrt(n)`` at lag 1.
    """
    upto = min(lag, len(rho))
    return significance_band(n) * float(np.sqrt(1.0 + 2.0 * np.sum(rho[1:upto] ** 2)))


def classify_returns(values) -> PatternLabel:
    """Label a log-return series by its first significant ACF peak.

    Candidate periods start after the ACF first turns negative, so the
    slow decay of short-range correlation is never mistaken for a
    period.  Local maxima beyond that point are tried in lag order; the
    first one that clears the Bartlett band, and whose ACF near twice
    the lag clears it too, is the period.  A sub-period echo (e.g. two
    spikes per cycle) fails the harmonic check and the scan moves on.
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    max_lag = min(n // 3, MAX_LAG_CAP)
    if max_lag < 3:
        raise TooShort("series too short to classify")
    rho = acf(values, max_lag).values
    negative = np.flatnonzero(rho[1:] < 0)
    if negative.size == 0:
        return PatternLabel(PatternKind.CYCLICAL)
    for lag in range(max(2, int(negative[0]) + 2), max_lag):
        if not (rho[lag] > rho[lag - 1] and rho[lag] >= rho[lag + 1]):
            continue
        if rho[lag] <= bartlett_band(rho, lag, n):
            continue
        harmonic = [k for k in (2 * lag - 1, 2 * lag, 2 * lag + 1) if k <= max_lag]
        if harmonic and max(rho[k] for k in harmonic) > bartlett_band(rho, 2 * lag, n):
            return PatternLabel(PatternKind.SEASONAL, lag, float(rho[lag]))
    return PatternLabel(PatternKind.CYCLICAL)


def classify_pattern(series: BinnedSeries, shift: int = 1) -> PatternLabel:
    if len(series.counts) < MIN_BINS:
        raise TooShort(f"classification needs at least {MIN_BINS} bins")
    return classify_returns(log_return(series, shift).values)


def select_order(label: PatternLabel) -> tuple[int, int]:
    return SEASONAL_ORDER if label.kind is PatternKind.SEASONAL else CYCLICAL_ORDER
