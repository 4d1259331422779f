"""Ergodic secrecy rates: Monte Carlo for any policy, closed form for on/off.

The instantaneous secrecy rate of a state under transmit power P is

    [ ln(1 + h_M P) - ln(1 + h_E P) ]^+   (nats per channel use)

and the ergodic rate is its average over the fading distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fading import ChannelState, FadingParams, sample_gains_partitioned
from .policy import PolicySpec, onoff_power_level, policy_power
from .specfun import e1_scaled

__all__ = [
    "RateEstimate",
    "instantaneous_secrecy_rate",
    "ergodic_secrecy_rate_mc",
    "onoff_rate_closed_form",
]

MIN_MC_SAMPLES = 10_000


@dataclass(frozen=True)
class RateEstimate:
    """Monte Carlo mean with its standard error, in nats per channel use."""

    mean: float
    std_error: float
    n_samples: int

    def __post_init__(self):
        if not np.isfinite(self.mean) or self.mean < 0.0:
            raise ValueError("mean must be finite and >= 0")
        if not np.isfinite(self.std_error) or self.std_error < 0.0:
            raise ValueError("std_error must be finite and >= 0")
        if self.n_samples <= 0:
            raise ValueError("n_samples must be positive")


def mc_estimate(values: np.ndarray) -> RateEstimate:
    """Sample mean and standard error of a vector of per-state values."""
    values = np.asarray(values, dtype=float)
    n = values.size
    se = float(values.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return RateEstimate(mean=float(values.mean()), std_error=se, n_samples=n)


def instantaneous_secrecy_rate(state: ChannelState, power):
    """[ln(1 + h_M P) - ln(1 + h_E P)]^+ for one state or a batch."""
    power = np.asarray(power, dtype=float)
    if np.any(power < 0.0) or not np.all(np.isfinite(power)):
        raise ValueError("power must be finite and >= 0")
    h_M = np.asarray(state.h_M, dtype=float)
    h_E = np.asarray(state.h_E, dtype=float)
    out = np.maximum(0.0, np.log1p(h_M * power) - np.log1p(h_E * power))
    return float(out) if out.ndim == 0 else out


def ergodic_secrecy_rate_mc(
    policy: PolicySpec,
    params: FadingParams,
    n_samples: int,
    seed: int,
    n_partitions: int = 1,
) -> RateEstimate:
    """Monte Carlo ergodic secrecy rate of a policy.

    States come from fixed substreams of the seed, concatenated in substream
    order, so the estimate is bit-stable for a given (seed, n_partitions).
    """
    if n_samples < MIN_MC_SAMPLES:
        raise ValueError(f"n_samples must be >= {MIN_MC_SAMPLES}")
    states = sample_gains_partitioned(params, seed, n_samples, n_partitions)
    powers = policy_power(policy, states)
    return mc_estimate(instantaneous_secrecy_rate(states, powers))


def _onoff_rate_terms(params: FadingParams, q_avg: float, tau: float):
    # The four lines of the closed form, each with an independent quadrature
    # identity (see the unit tests); exp(x)*E1(y) products use e1_scaled and
    # a shift so nothing overflows when the power level is tiny.
    p_level = onoff_power_level(q_avg, params.gamma_P, params.gamma_M, tau)
    g_m, g_e = params.gamma_M, params.gamma_E
    a_m = 1.0 / (g_m * p_level)
    a_e = 1.0 / (g_e * p_level)
    b = 1.0 / g_m + 1.0 / g_e
    t1 = np.exp(-tau / g_m) * np.log1p(tau * p_level)
    t2 = np.exp(-tau / g_m) * e1_scaled(a_m + tau / g_m)
    t3 = np.exp(-tau / g_m) * (
        np.exp(-tau / g_e) * e1_scaled(a_e + tau / g_e) - e1_scaled(a_e)
    )
    t4 = -np.exp(-b * tau) * e1_scaled(b * tau + b / p_level)
    return float(t1), float(t2), float(t3), float(t4)


def onoff_rate_closed_form(params: FadingParams, q_avg: float, tau: float) -> float:
    """Exact ergodic secrecy rate of the on/off policy at threshold tau.

    Transmit level is the budget-matching onoff_power_level; the rate is a
    four-term E1 expression. A degenerate parameter combination (level so
    small that an E1 argument leaves its domain) raises from specfun.
    """
    if not np.isfinite(q_avg) or q_avg <= 0.0:
        raise ValueError(f"q_avg must be positive and finite, got {q_avg!r}")
    t1, t2, t3, t4 = _onoff_rate_terms(params, q_avg, tau)
    return max(0.0, t1 + t2 + t3 + t4)
