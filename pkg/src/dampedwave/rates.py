"""Decay-rate fits and long-time classification of norm time series.

A series is a pair of 1-d arrays (t, values) with strictly increasing t;
values are norms, so they are expected nonnegative.  Two regression models
match the two theoretical decay laws:

    polynomial   value ~ (1+t)^(-lambda)          log value vs log(1+t)
    stretched    value ~ C exp(-c t^(1-alpha))    log value vs t^(1-alpha)

Classification looks only at the tail window and is scale invariant: all
thresholds are relative to the global series maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RateFit",
    "NonPositiveValuesError",
    "InsufficientSamplesError",
    "InvalidAlphaError",
    "fit_polynomial_decay",
    "fit_stretched_exponential",
    "theoretical_lambda_sup",
    "classify_longtime",
    "CONVERGED",
    "NON_EQUILIBRIUM",
    "OSCILLATING",
]

CONVERGED = "converged-to-equilibrium"
NON_EQUILIBRIUM = "non-equilibrium-plateau"
OSCILLATING = "oscillating"


class NonPositiveValuesError(ValueError):
    """Negative values in a norm series; log fits are undefined."""


class InsufficientSamplesError(ValueError):
    """Fewer usable samples than the fit or classification needs."""


class InvalidAlphaError(ValueError):
    """Stretched-exponential exponent needs alpha in [0, 1)."""


@dataclass(frozen=True)
class RateFit:
    """A fitted decay model or a tail classification.

    model is one of "polynomial", "stretched_exponential", "plateau",
    "oscillating"; params holds the model's named constants; r_squared is
    None for the two classification models.
    """

    model: str
    params: dict
    r_squared: float | None
    window: tuple[float, float]
    label: str | None = None


def _as_series(t, values) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.shape != v.shape:
        raise ValueError("series must be two 1-d arrays of equal length")
    if np.any(np.diff(t) <= 0):
        raise ValueError("sample times must be strictly increasing")
    return t, v


def _windowed_log_samples(t, values, window):
    """Window the series and drop round-off-level values from log fits."""
    t, v = _as_series(t, values)
    if window is None:
        window = (float(t[0]), float(t[-1]))
    lo, hi = window
    mask = (t >= lo) & (t <= hi)
    t, v = t[mask], v[mask]
    if np.any(v < 0):
        raise NonPositiveValuesError("norm series has negative entries")
    floor = 10.0 * np.finfo(float).eps * (float(np.max(v)) if v.size else 0.0)
    keep = v > floor
    t, v = t[keep], v[keep]
    if len(t) < 10:
        raise InsufficientSamplesError(f"only {len(t)} usable samples in window {window}")
    return t, v, (lo, hi)


def _r_squared(y: np.ndarray, fitted: np.ndarray) -> float:
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res < 1e-300 else 0.0
    return 1.0 - ss_res / ss_tot


def fit_polynomial_decay(t, values, window=None) -> RateFit:
    """Least-squares fit of log(value) against log(1+t); lambda = -slope."""
    t, v, window = _windowed_log_samples(t, values, window)
    x = np.log1p(t)
    y = np.log(v)
    coeffs = np.polyfit(x, y, 1)
    r2 = _r_squared(y, np.polyval(coeffs, x))
    return RateFit(
        model="polynomial",
        params={"lambda": float(-coeffs[0]), "amplitude": float(math.exp(coeffs[1]))},
        r_squared=r2,
        window=window,
    )


def fit_stretched_exponential(t, values, alpha: float, window=None) -> RateFit:
    """Least-squares fit of log(value) against t^(1-alpha).

    Returns the decay constant c = -slope and amplitude C = exp(intercept);
    alpha = 0 is the plain exponential fit.
    """
    if not 0.0 <= alpha < 1.0:
        raise InvalidAlphaError(f"alpha = {alpha} outside [0, 1)")
    t, v, window = _windowed_log_samples(t, values, window)
    x = t ** (1.0 - alpha)
    y = np.log(v)
    coeffs = np.polyfit(x, y, 1)
    r2 = _r_squared(y, np.polyval(coeffs, x))
    return RateFit(
        model="stretched_exponential",
        params={
            "c": float(-coeffs[0]),
            "C": float(math.exp(coeffs[1])),
            "exponent": 1.0 - alpha,
        },
        r_squared=r2,
        window=window,
    )


def theoretical_lambda_sup(theta: float, alpha: float):
    """Supremum of guaranteed polynomial decay exponents, (theta - (1-theta) alpha)/(1 - 2 theta).

    Returns math.inf for theta = 1/2 (the exponential branch applies) and
    None when alpha falls outside the admissibility window, i.e. when
    theta - (1-theta) alpha <= 0.
    """
    if not 0.0 < theta <= 0.5:
        raise ValueError("theta must lie in (0, 1/2]")
    if alpha < 0.0:
        raise ValueError("alpha must be nonnegative")
    if theta == 0.5:
        return math.inf
    numerator = theta - (1.0 - theta) * alpha
    if numerator <= 0.0:
        return None
    return numerator / (1.0 - 2.0 * theta)


def classify_longtime(
    t,
    values,
    equilibrium_levels=(0.0,),
    osc_frac: float = 0.2,
    eq_tol: float = 0.02,
    tail_frac: float = 0.25,
) -> RateFit:
    """Label the tail of a norm series: converged, oscillating, or stuck.

    Over the tail window (last tail_frac of the time span), with A the
    global series maximum, m the tail mean, and ptp the tail peak-to-peak:

    1. converged-to-equilibrium when m sits within eq_tol * A of a supplied
       equilibrium level and the tail has settled (ptp <= 2 eq_tol * A);
    2. otherwise oscillating when ptp >= osc_frac * m, i.e. the tail swings
       by a sizeable fraction of its own level;
    3. otherwise a plateau at m away from every offered level.

    All thresholds are relative, so scaling the series and the levels by a
    common positive factor never changes the label.  The oscillation test
    compares ptp with the tail's own mean rather than with A: a damped run
    whose tail rings at a small fraction of the early peak is still
    oscillating, while a slow monotone creep toward a level is not.
    """
    t, v = _as_series(t, values)
    if not 0.0 < tail_frac <= 0.25:
        raise ValueError("tail_frac must lie in (0, 1/4]")
    span = float(t[-1] - t[0])
    if span <= 0.0 or len(t) < 8:
        raise InsufficientSamplesError("series too short to classify")
    tail_start = t[-1] - tail_frac * span
    tail = v[t >= tail_start]
    if len(tail) < 2:
        raise InsufficientSamplesError("tail window holds fewer than two samples")
    window = (float(tail_start), float(t[-1]))
    global_max = float(np.max(v))
    peak_to_peak = float(np.max(tail) - np.min(tail))
    mean = float(np.mean(tail))
    if global_max == 0.0:
        # identically zero series: converged when the zero level is offered
        level_scale = max((abs(level) for level in equilibrium_levels), default=0.0)
        near_zero = any(
            abs(level) <= eq_tol * max(level_scale, 1.0) for level in equilibrium_levels
        )
        label = CONVERGED if near_zero else NON_EQUILIBRIUM
        return RateFit("plateau", {"level": 0.0}, None, window, label)
    settled = peak_to_peak <= 2.0 * eq_tol * global_max
    matched = any(
        abs(mean - level) <= eq_tol * global_max for level in equilibrium_levels
    )
    if matched and settled:
        return RateFit("plateau", {"level": mean}, None, window, CONVERGED)
    if peak_to_peak >= osc_frac * mean and mean > 0.0:
        return RateFit(
            "oscillating", {"peak_to_peak": peak_to_peak}, None, window, OSCILLATING
        )
    return RateFit("plateau", {"level": mean}, None, window, NON_EQUILIBRIUM)
