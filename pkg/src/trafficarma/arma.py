"""Zero-mean ARMA(p, q) models.

The model is

    x_t = sum_i theta_i x_{t-i} + sum_j phi_j e_{t-j} + e_t

with no intercept.  Pure AR models are fitted by ordinary least squares;
models with an MA part use the Hannan-Rissanen two-stage regression
followed (optionally) by Gauss-Newton minimisation of the conditional
sum of squares.  Residuals are always computed conditionally, i.e. with
pre-sample values of x and e set to zero.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.signal import lfilter

from .errors import LengthMismatch, ParameterError, SingularDesign, TooShort, ZeroVariance

# roots closer to the unit circle than this count as non-stationary
ROOT_MARGIN = 1e-9
# sigma2 floor for fits whose residuals vanish (noiseless input)
_SIGMA2_FLOOR = np.finfo(float).tiny
_MAX_STEP_HALVINGS = 30


@dataclass(frozen=True)
class ArmaModel:
    theta: tuple = ()
    phi: tuple = ()
    sigma2: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(float(v) for v in self.theta))
        object.__setattr__(self, "phi", tuple(float(v) for v in self.phi))
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2!r}")

    @property
    def p(self):
        return len(self.theta)

    @property
    def q(self):
        return len(self.phi)

    @property
    def order(self):
        return (self.p, self.q)

    @property
    def ar_poly(self):
        """Coefficients of ``1 - theta_1 z - ... - theta_p z^p`` (ascending)."""
        return np.r_[1.0, -np.asarray(self.theta, dtype=float)]

    @property
    def ma_poly(self):
        """Coefficients of ``1 + phi_1 z + ... + phi_q z^q`` (ascending)."""
        return np.r_[1.0, np.asarray(self.phi, dtype=float)]

    def to_dict(self):
        return {
            "p": self.p,
            "q": self.q,
            "theta": list(self.theta),
            "phi": list(self.phi),
            "mu": self.mu,
            "sigma2": self.sigma2,
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        model = cls(tuple(d["theta"]), tuple(d["phi"]), float(d["sigma2"]), float(d.get("mu", 0.0)))
        if model.p != d.get("p", model.p) or model.q != d.get("q", model.q):
            raise ParameterError("model orders do not match coefficient counts")
        return model

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ResidualSeries:
    """Conditional residuals aligned with the series they came from.

    The first ``burn_in`` values depend on the zero pre-sample
    initialisation and are left out of variance estimates.
    """

    values: np.ndarray
    burn_in: int = 0

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class FitOptions:
    long_ar_order: Optional[int] = None  # None picks max(p+q, ceil(2 ln n))
    refine: bool = True
    max_refine_iters: int = 50
    refine_tol: float = 1e-8

    def __post_init__(self):
        if self.long_ar_order is not None and self.long_ar_order < 1:
            raise ParameterError("long_ar_order must be positive")
        if self.max_refine_iters < 1 or not self.refine_tol > 0:
            raise ParameterError("max_refine_iters and refine_tol must be positive")


@dataclass(frozen=True)
class StabilityReport:
    ar_stable: bool
    ma_invertible: bool
    min_ar_root_modulus: float
    min_ma_root_modulus: float


def _lagged(x, lags, start):
    """Columns ``x[t-1], ..., x[t-lags]`` for rows ``t = start .. n-1``."""
    n = len(x)
    return np.column_stack([x[start - i:n - i] for i in range(1, lags + 1)]) if lags else np.empty((n - start, 0))


def _ols(design, target):
    if design.shape[0] < design.shape[1] or design.shape[1] == 0:
        if design.shape[1] == 0:
            return np.empty(0)
        raise SingularDesign("fewer regression rows than parameters")
    coef, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < design.shape[1]:
        raise SingularDesign(f"design matrix has rank {rank} < {design.shape[1]}")
    return coef


def _check_series(x, p, q):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ParameterError("series must be 1-d")
    if p < 0 or q < 0:
        raise ParameterError("orders must be non-negative")
    need = 10 * (p + q + 1)
    if len(x) < need:
        raise TooShort(f"ARMA({p},{q}) needs at least {need} points, got {len(x)}")
    if not np.all(np.isfinite(x)):
        raise ParameterError("series contains non-finite values")
    if np.all(x == x[0]):
        raise ZeroVariance("series is constant")
    return x


def long_ar_order(n, p, q):
    return max(p + q, math.ceil(2 * math.log(n)))


def fit_ar_ols(x, p):
    """Least-squares AR(p) coefficients, no intercept."""
    x = np.asarray(x, dtype=float)
    return _ols(_lagged(x, p, p), x[p:])


def hannan_rissanen(x, p, q, long_order):
    """Two-stage least-squares ARMA(p, q) estimate.

    Stage one fits a long AR(`long_order`) to obtain proxy innovations;
    stage two regresses ``x_t`` on ``p`` lags of x and ``q`` lags of
    those proxies.  With ``q == 0`` this reduces to :func:`fit_ar_ols`.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if q == 0:
        return fit_ar_ols(x, p), np.empty(0)
    L = long_order
    a = _ols(_lagged(x, L, L), x[L:])
    proxy = np.zeros(n)
    proxy[L:] = x[L:] - _lagged(x, L, L) @ a
    start = max(p, L + q)
    design = np.hstack([_lagged(x, p, start), _lagged(proxy, q, start)])
    coef = _ols(design, x[start:])
    return coef[:p], coef[p:]


def _css_residuals(x, theta, phi):
    return lfilter(np.r_[1.0, -theta], np.r_[1.0, phi], x)


def invertible_ma(phi):
    """Reflect MA roots inside the unit circle to their reciprocals.

    The reflected polynomial has the same autocovariance shape, and the
    conditional residual recursion no longer blows up on it.
    """
    phi = np.asarray(phi, dtype=float)
    coeffs = np.trim_zeros(np.r_[1.0, phi], "b")
    if len(coeffs) <= 1:
        return phi
    roots = np.roots(coeffs[::-1])
    inside = np.abs(roots) < 1.0
    if not inside.any():
        return phi
    roots[inside] = 1.0 / np.conj(roots[inside])
    poly = np.real(np.poly(roots))[::-1]
    poly = poly / poly[0]
    out = np.zeros(len(phi))
    out[:len(poly) - 1] = poly[1:]
    return out


def _refine_css(x, theta, phi, opts):
    """Gauss-Newton on the conditional sum of squares, with step halving."""
    p, q = len(theta), len(phi)
    n = len(x)
    start = max(p, q)
    beta = np.r_[theta, phi]
    e = _css_residuals(x, theta, phi)
    sse = float(np.dot(e[start:], e[start:]))
    for _ in range(opts.max_refine_iters):
        ma = np.r_[1.0, beta[p:]]
        u = lfilter([1.0], ma, x)
        v = lfilter([1.0], ma, e)
        cols = [np.r_[np.zeros(i), u[:n - i]] for i in range(1, p + 1)]
        cols += [np.r_[np.zeros(j), v[:n - j]] for j in range(1, q + 1)]
        # -J: derivative of e_t with respect to (theta, phi), negated
        neg_jac = np.column_stack(cols)[start:]
        step, _, rank, _ = np.linalg.lstsq(neg_jac, e[start:], rcond=None)
        if rank < p + q or not np.all(np.isfinite(step)):
            break
        scale = 1.0
        for _ in range(_MAX_STEP_HALVINGS):
            trial = beta + scale * step
            e_trial = _css_residuals(x, trial[:p], trial[p:])
            sse_trial = float(np.dot(e_trial[start:], e_trial[start:]))
            if np.isfinite(sse_trial) and sse_trial <= sse:
                break
            scale *= 0.5
        else:
            break
        moved = float(np.max(np.abs(trial - beta)))
        beta, e, sse = trial, e_trial, sse_trial
        if moved < opts.refine_tol:
            break
    return beta[:p], beta[p:]


def fit(x: Sequence[float], p: int, q: int, opts: FitOptions | None = None):
    """Estimate a zero-mean ARMA(p, q) model.

    Parameters
    ----------
    x : array_like
        Observed series, typically log returns.
    p, q : int
        AR and MA orders.
    opts : FitOptions, optional

    Returns
    -------
    model : ArmaModel
    resid : ResidualSeries
        Conditional residuals of the fitted model over `x`.
    """
    opts = opts or FitOptions()
    x = _check_series(x, p, q)
    n = len(x)
    if opts.long_ar_order is None:
        L = long_ar_order(n, p, q)
    else:
        L = opts.long_ar_order
        if L < p + q:
            raise ParameterError(f"long_ar_order {L} < p + q = {p + q}")
    theta, phi = hannan_rissanen(x, p, q, L)
    if q > 0 and opts.refine:
        theta, phi = _refine_css(x, theta, invertible_ma(phi), opts)
    e = _css_residuals(x, theta, phi)
    burn = max(p, q)
    tail = e[burn:]
    sigma2 = max(float(np.dot(tail, tail) / len(tail)), _SIGMA2_FLOOR)
    model = ArmaModel(tuple(theta), tuple(phi), sigma2)
    return model, ResidualSeries(e, burn)


def residuals(model: ArmaModel, x: Sequence[float]) -> ResidualSeries:
    x = np.asarray(x, dtype=float)
    burn = max(model.p, model.q)
    if len(x) < burn + 1:
        raise TooShort(f"need at least {burn + 1} points, got {len(x)}")
    return ResidualSeries(lfilter(model.ar_poly, model.ma_poly, x), burn)


def _seed_sequence(seed):
    return np.random.default_rng(int(seed) & 0xFFFF_FFFF_FFFF_FFFF)


def simulate(model: ArmaModel, n: int, seed: int, burn: int = 500) -> np.ndarray:
    """Draw a Gaussian ARMA path of length `n` after `burn` warm-up steps.

    An unstable model still simulates, with a ``RuntimeWarning``.
    """
    if n < 1 or burn < 0:
        raise ParameterError("n must be >= 1 and burn >= 0")
    if not check_roots(model).ar_stable:
        warnings.warn("simulating a non-stationary AR polynomial", RuntimeWarning, stacklevel=2)
    rng = _seed_sequence(seed)
    eps = rng.normal(0.0, math.sqrt(model.sigma2), size=burn + n)
    x = lfilter(model.ma_poly, model.ar_poly, eps)
    return x[burn:]


def forecast(model: ArmaModel, history, hist_residuals, h: int) -> np.ndarray:
    """Recursive h-step forecast from the end of `history`.

    Future innovations are replaced by their expectation, zero, and
    forecasts feed back as lagged values beyond the last observation.
    """
    p, q = model.p, model.q
    history = np.asarray(history, dtype=float)
    if isinstance(hist_residuals, ResidualSeries):
        hist_residuals = hist_residuals.values
    resid = np.asarray(hist_residuals, dtype=float)
    if h < 1:
        raise ParameterError("h must be >= 1")
    if len(history) < p:
        raise TooShort(f"forecast needs at least {p} history values, got {len(history)}")
    if len(resid) != len(history):
        raise LengthMismatch("residuals must be aligned with history")
    xs = [float(v) for v in history[len(history) - p:]] if p else []
    es = [0.0] * max(0, q - len(resid)) + ([float(v) for v in resid[max(0, len(resid) - q):]] if q else [])
    out = np.empty(h)
    for k in range(h):
        acc = 0.0
        for i in range(1, p + 1):
            acc += model.theta[i - 1] * xs[-i]
        for j in range(1, q + 1):
            acc += model.phi[j - 1] * es[-j]
        out[k] = acc
        if p:
            xs.append(acc)
        if q:
            es.append(0.0)
    return out


def _min_root_modulus(ascending):
    coeffs = np.trim_zeros(np.asarray(ascending, dtype=float), "b")
    if len(coeffs) <= 1:
        return math.inf
    return float(np.min(np.abs(np.roots(coeffs[::-1]))))


def check_roots(model: ArmaModel) -> StabilityReport:
    ar_mod = _min_root_modulus(model.ar_poly)
    ma_mod = _min_root_modulus(model.ma_poly)
    return StabilityReport(
        ar_stable=ar_mod > 1 + ROOT_MARGIN,
        ma_invertible=ma_mod > 1 + ROOT_MARGIN,
        min_ar_root_modulus=ar_mod,
        min_ma_root_modulus=ma_mod,
    )
