"""Exponential integral E1 and its overflow-safe scaled companion.

e1(x) computes the decaying exponential integral

    E1(x) = integral_x^inf exp(-t)/t dt,  x > 0,

the convention sometimes written Ei(x) for this integral in the power-control
literature; both names denote the same function here. The no-eavesdropper-CSI
stationarity equation and the on/off closed-form rate evaluate it inside
products exp(y) * E1(y) whose factors overflow or underflow long before the
product does, so e1_scaled(x) = exp(x) * E1(x) is provided and computed
without forming either factor.

Implementation uses two regimes with crossover at x = 1: the alternating
power series

    E1(x) = -euler_gamma - ln(x) + sum_{k>=1} (-1)^(k+1) x^k / (k * k!)

below, and the modified-Lentz continued fraction

    exp(x) * E1(x) = 1 / (x + 1 - 1^2 / (x + 3 - 2^2 / (x + 5 - ...)))

above. Both regimes are validated against adaptive quadrature of the defining
integral. Arguments below 1e-12 are rejected: they indicate a degenerate
power value upstream rather than a legitimate evaluation point.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

__all__ = ["e1", "e1_scaled", "e1_quadrature_oracle"]

_EULER_GAMMA = 0.5772156649015328606
_MIN_ARG = 1e-12
_CROSSOVER = 1.0
_SERIES_TERMS = 30
_CF_MAX_ITER = 400
_TINY = 1e-300


def _validated(x):
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    if scalar:
        arr = arr.reshape(1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("e1 argument must be finite")
    if np.any(arr < _MIN_ARG):
        raise ValueError(
            "e1 argument below 1e-12 (nonpositive or degenerate upstream power)"
        )
    return arr, scalar


def _series(x):
    # E1(x) + euler_gamma + ln(x), i.e. the entire-series part, for x <= 1
    total = np.zeros_like(x)
    term = np.ones_like(x)  # x^k / k!
    sign = 1.0
    for k in range(1, _SERIES_TERMS + 1):
        term = term * x / k
        total += sign * term / k
        sign = -sign
    return total


def _cf_scaled(x):
    # exp(x) * E1(x) by modified Lentz, reliable for x >= 1
    b = x + 1.0
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _CF_MAX_ITER + 1):
        a = -float(i * i)
        b = b + 2.0
        d = a * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        d = 1.0 / d
        c = b + a / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-15):
            return h
    raise RuntimeError("continued fraction for e1 did not converge")


def e1(x):
    """E1(x) for x > 0; strictly positive and strictly decreasing.

    Accepts scalars or arrays.
    """
    arr, scalar = _validated(x)
    out = np.empty_like(arr)
    lo = arr <= _CROSSOVER
    if lo.any():
        xs = arr[lo]
        out[lo] = -_EULER_GAMMA - np.log(xs) + _series(xs)
    hi = ~lo
    if hi.any():
        xh = arr[hi]
        out[hi] = np.exp(-xh) * _cf_scaled(xh)
    return float(out[0]) if scalar else out


def e1_scaled(x):
    """exp(x) * E1(x), computed without overflow for any x > 0."""
    arr, scalar = _validated(x)
    out = np.empty_like(arr)
    lo = arr <= _CROSSOVER
    if lo.any():
        xs = arr[lo]
        out[lo] = np.exp(xs) * (-_EULER_GAMMA - np.log(xs) + _series(xs))
    hi = ~lo
    if hi.any():
        out[hi] = _cf_scaled(arr[hi])
    return float(out[0]) if scalar else out


def e1_quadrature_oracle(x: float) -> float:
    """Independent check of e1: adaptive quadrature of the defining integral.

    Tolerance 1e-12 (absolute or relative); raises if the quadrature cannot
    certify it.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError("oracle argument must be positive and finite")
    val, err = quad(lambda t: math.exp(-t) / t, x, math.inf, epsabs=1e-12, epsrel=1e-12, limit=300)
    if err > max(1e-12, 1e-12 * abs(val)):
        raise RuntimeError(f"quadrature for e1({x}) did not reach tolerance (err={err:g})")
    return val
