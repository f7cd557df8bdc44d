"""Log returns of binned counts, their inverse, and the sample ACF."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .errors import EmptyInput, MalformedRow, ParameterError, TooShort, ZeroVariance
from .ingest import BinnedSeries


def _frozen(values):
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ReturnSeries:
    """Log returns of shifted counts.

    ``values[t] = ln((counts[t+1] + shift) / (counts[t] + shift))``;
    ``anchor_count`` is ``counts[0]``, which is all the inverse needs.
    """

    values: np.ndarray
    anchor_count: int = 0
    shift: int = 1

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 1:
            raise ValueError("values must be 1-d")
        if not np.all(np.isfinite(values)):
            raise ValueError("log returns must be finite")
        if self.anchor_count < 0:
            raise ValueError("anchor_count must be non-negative")
        if self.shift < 1:
            raise ValueError("shift must be a positive integer")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class AcfVector:
    values: np.ndarray
    n: int

    @property
    def max_lag(self):
        return len(self.values) - 1


def log_return(series: BinnedSeries, shift: int = 1) -> ReturnSeries:
    counts = np.asarray(series.counts)
    if len(counts) < 2:
        raise TooShort("log returns need at least 2 bins")
    if int(shift) != shift or shift < 1:
        raise ParameterError("shift must be a positive integer")
    shifted = counts.astype(float) + shift
    values = np.log(shifted[1:] / shifted[:-1])
    return ReturnSeries(values, int(counts[0]), int(shift))


def invert_log_return(returns: ReturnSeries) -> np.ndarray:
    """Rebuild the (real-valued) count path from its log returns.

    Forecast returns appended to ``returns.values`` come back as
    fractional counts; nothing is rounded here.
    """
    out = np.empty(len(returns.values) + 1)
    level = float(returns.anchor_count)
    out[0] = level
    s = returns.shift
    for t, r in enumerate(returns.values):
        level = (level + s) * math.exp(r) - s
        out[t + 1] = level
    return out


def acf(x: Sequence[float], max_lag: int) -> AcfVector:
    """Biased sample autocorrelation for lags ``0..max_lag``.

    Dividing every lag by the full sum of squares (rather than by the
    number of overlapping pairs) keeps ``|acf[k]| <= 1``.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if max_lag < 1:
        raise ParameterError("max_lag must be positive")
    if n < max_lag + 2:
        raise TooShort(f"need at least {max_lag + 2} points for max_lag={max_lag}, got {n}")
    d = x - x.mean()
    denom = np.dot(d, d)
    if denom == 0.0 or np.all(x == x[0]):
        raise ZeroVariance("series is constant")
    values = np.empty(max_lag + 1)
    values[0] = 1.0
    for k in range(1, max_lag + 1):
        values[k] = np.dot(d[k:], d[:-k]) / denom
    values.flags.writeable = False
    return AcfVector(values, n)


def significance_band(n: int) -> float:
    """95% white-noise band ``1.96 / sqrt(n)``."""
    return 1.96 / math.sqrt(n)


def write_returns_csv(returns: ReturnSeries, fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t", "log_return"])
    for t, v in enumerate(returns.values):
        writer.writerow([t, repr(float(v))])


def read_returns_csv(fh: IO[str], anchor_count: int = 0, shift: int = 1) -> ReturnSeries:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["t", "log_return"]:
        raise MalformedRow(1, "expected header t,log_return")
    values = []
    for row in reader:
        if not row:
            continue
        try:
            values.append(float(row[1]))
        except (IndexError, ValueError):
            raise MalformedRow(reader.line_num) from None
    if not values:
        raise EmptyInput("return series has no rows")
    return ReturnSeries(np.array(values), anchor_count, shift)


def write_acf_csv(vec: AcfVector, fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["lag", "acf"])
    for k, v in enumerate(vec.values):
        writer.writerow([k, repr(float(v))])
