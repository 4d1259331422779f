"""Multiplier calibration and threshold optimization.

calibrate_lambda finds the multiplier at which a policy's average received
power at the primary receiver, E[P * h_P], meets the budget q_avg with
equality. Every candidate multiplier is evaluated on the same fixed sample of
channel states (common random numbers), which makes the Monte Carlo objective
a deterministic, sample-path-monotone function of the multiplier, so plain
bisection brackets and converges.

optimize_threshold picks the on/off threshold maximizing the closed-form
secrecy rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fading import ChannelState, FadingParams, SampleStream, sample_gains_partitioned
from .optim import golden_section_max
from .policy import (
    PolicyFamily,
    PolicySpec,
    _power_no_ecsi_batch,
    policy_power,
    power_full_csi_avg,
    power_full_csi_avg_peak,
)
from .rate import MIN_MC_SAMPLES, RateEstimate, mc_estimate, onoff_rate_closed_form

__all__ = [
    "ConstraintSet",
    "CalibrationReport",
    "FLAG_Q_AVG_UNATTAINABLE",
    "avg_received_power",
    "calibrate_lambda",
    "optimize_threshold",
]

FLAG_Q_AVG_UNATTAINABLE = "q_avg_unattainable"

_LAMBDA_FLOOR = 1e-12
_LAMBDA_CEIL = 1e15
_MAX_ITERATIONS = 200
_COARSE_TAU_POINTS = 256


@dataclass(frozen=True)
class ConstraintSet:
    """Average received-power limit, with an optional peak limit.

    q_peak may be None or inf, both meaning "no peak constraint".
    """

    q_avg: float
    q_peak: float | None = None

    def __post_init__(self):
        if not np.isfinite(self.q_avg) or self.q_avg <= 0.0:
            raise ValueError(f"q_avg must be positive and finite, got {self.q_avg!r}")
        if self.q_peak is not None and not self.q_peak > 0.0:
            raise ValueError(f"q_peak must be positive, got {self.q_peak!r}")

    @property
    def has_peak(self) -> bool:
        return self.q_peak is not None and np.isfinite(self.q_peak)


@dataclass(frozen=True)
class CalibrationReport:
    """Outcome of a multiplier calibration.

    flag is empty on success; FLAG_Q_AVG_UNATTAINABLE marks the regime where
    even a vanishing multiplier cannot reach q_avg (a peak limit caps the
    achievable average), in which case lambda_star sits at the bracket floor.
    """

    lambda_star: float
    achieved_avg_power: float
    iterations: int
    residual: float
    flag: str = ""


def avg_received_power(
    policy: PolicySpec,
    params: FadingParams,
    n_samples: int,
    stream: SampleStream,
    n_partitions: int = 1,
) -> RateEstimate:
    """Monte Carlo estimate of the average received power E[P * h_P].

    Sampling is identity-based: the draw uses substreams
    (stream.master_seed, stream.stream_index + i), not the stream's current
    position, so repeated calls with equal identities agree exactly.
    """
    if n_samples < MIN_MC_SAMPLES:
        raise ValueError(f"n_samples must be >= {MIN_MC_SAMPLES}")
    states = sample_gains_partitioned(
        params, stream.master_seed, n_samples, n_partitions, stream.stream_index
    )
    powers = policy_power(policy, states)
    return mc_estimate(np.asarray(powers) * states.h_P)


def _mean_received_power_fn(family, states: ChannelState, constraints, params):
    h_P = states.h_P
    if family is PolicyFamily.FULL_CSI_AVG:
        return lambda lam: float(np.mean(power_full_csi_avg(states, lam) * h_P))
    if family is PolicyFamily.FULL_CSI_AVG_PEAK:
        if not constraints.has_peak:
            raise ValueError("full_csi_avg_peak calibration needs a finite q_peak")
        q_peak = constraints.q_peak
        return lambda lam: float(
            np.mean(power_full_csi_avg_peak(states, lam, q_peak) * h_P)
        )
    if family is PolicyFamily.NO_ECSI:
        return lambda lam: float(
            np.mean(_power_no_ecsi_batch(states.h_M, states.h_P, lam, params.gamma_E) * h_P)
        )
    raise ValueError(f"cannot calibrate a multiplier for family {family!r}")


def calibrate_lambda(
    family: PolicyFamily,
    params: FadingParams,
    constraints: ConstraintSet,
    tol: float = 1e-3,
    n_samples: int = 1_000_000,
    seed: int = 42,
    n_partitions: int = 1,
) -> CalibrationReport:
    """Bisect the multiplier until |E[P * h_P] - q_avg| / q_avg <= tol.

    The bracket expands geometrically from lambda = 1. If the floor is
    reached with the budget still unmet (possible only under a peak limit),
    the report is flagged rather than raised: that regime is exactly the flat
    part of the rate-versus-budget curves.
    """
    family = PolicyFamily(family)
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must be in (0, 1)")
    states = sample_gains_partitioned(params, seed, n_samples, n_partitions)
    mean_power = _mean_received_power_fn(family, states, constraints, params)
    q_avg = constraints.q_avg

    iterations = 0

    def achieved(lam):
        nonlocal iterations
        iterations += 1
        return mean_power(lam)

    def report(lam, value, flag=""):
        return CalibrationReport(
            lambda_star=float(lam),
            achieved_avg_power=float(value),
            iterations=iterations,
            residual=float(value - q_avg),
            flag=flag,
        )

    lam = 1.0
    value = achieved(lam)
    if abs(value - q_avg) / q_avg <= tol:
        return report(lam, value)

    if value > q_avg:
        lo, hi = lam, lam
        v_hi = value
        while v_hi > q_avg:
            lo = hi
            hi *= 10.0
            if hi > _LAMBDA_CEIL:
                raise RuntimeError("multiplier bracket expansion exceeded the ceiling")
            v_hi = achieved(hi)
            if abs(v_hi - q_avg) / q_avg <= tol:
                return report(hi, v_hi)
    else:
        lo, hi = lam, lam
        v_lo = value
        while v_lo < q_avg:
            hi = lo
            lo /= 10.0
            if lo < _LAMBDA_FLOOR:
                # Even lambda -> 0 cannot reach the budget: peak-limited.
                v_floor = achieved(_LAMBDA_FLOOR)
                return report(_LAMBDA_FLOOR, v_floor, flag=FLAG_Q_AVG_UNATTAINABLE)
            v_lo = achieved(lo)
            if abs(v_lo - q_avg) / q_avg <= tol:
                return report(lo, v_lo)

    while iterations < _MAX_ITERATIONS:
        mid = math.sqrt(lo * hi)
        v_mid = achieved(mid)
        if abs(v_mid - q_avg) / q_avg <= tol:
            return report(mid, v_mid)
        if v_mid > q_avg:
            lo = mid
        else:
            hi = mid
    raise RuntimeError(f"calibration did not converge within {_MAX_ITERATIONS} evaluations")


def optimize_threshold(
    params: FadingParams, q_avg: float, tau_max: float | None = None
) -> tuple[float, float]:
    """Maximize the closed-form on/off rate over thresholds in [0, tau_max].

    Coarse scan on a 256-point grid, then golden-section refinement around
    the best cell to threshold tolerance 1e-6. Default tau_max is
    10 * gamma_M: the transmit probability beyond that is exp(-10), making
    larger thresholds vacuous.
    """
    if tau_max is None:
        tau_max = 10.0 * params.gamma_M
    if not np.isfinite(tau_max) or tau_max <= 0.0:
        raise ValueError(f"tau_max must be positive and finite, got {tau_max!r}")

    def rate_at(tau):
        return onoff_rate_closed_form(params, q_avg, float(tau))

    taus = np.linspace(0.0, tau_max, _COARSE_TAU_POINTS)
    rates = np.array([rate_at(t) for t in taus])
    i = int(np.argmax(rates))
    lo = taus[max(i - 1, 0)]
    hi = taus[min(i + 1, taus.size - 1)]
    tau_star, rate_star = golden_section_max(rate_at, float(lo), float(hi), 1e-6)
    if rates[i] >= rate_star:
        tau_star, rate_star = float(taus[i]), float(rates[i])
    return float(tau_star), float(rate_star)
