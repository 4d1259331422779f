"""Transmit-power allocation policies as pure per-state functions.

Four families:

* full_csi_avg: all three gains known, average received-power budget only.
  The closed form solves the per-state stationarity condition

      h_M/(1 + h_M P) - h_E/(1 + h_E P) = lam * h_P

  and is zero exactly on the region (h_M - h_E)/h_P <= lam.
* full_csi_avg_peak: additionally P * h_P <= q_peak per state; the policy is
  the pointwise min of q_peak/h_P and the full_csi_avg form.
* no_ecsi: only h_M and h_P known, eavesdropper gain known through its mean
  gamma_E; the power is the root of a stationarity residual involving E1.
* onoff: transmit a fixed level exactly when h_M exceeds a threshold tau.

All rates and objectives are in nats. Functions accept scalar or ndarray
gains and broadcast; gains must be strictly positive for the CSI-based
policies (zeros have probability zero under the fading model and indicate a
caller bug).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .fading import ChannelState
from .specfun import e1_scaled

__all__ = [
    "PolicyFamily",
    "PolicySpec",
    "power_full_csi_avg",
    "power_full_csi_avg_peak",
    "peak_active",
    "no_ecsi_residual",
    "no_ecsi_residual_integral",
    "power_no_ecsi",
    "onoff_power_level",
    "power_onoff",
    "policy_power",
]

# Search range for the no-CSI stationarity root, shared by the scalar scan
# and the batched bisection so the two always agree.
_NO_ECSI_P_LO = 1e-6
_NO_ECSI_P_HI = 1e6
_NO_ECSI_SCAN_POINTS = 121
_NO_ECSI_BISECT_ITERS = 44


class PolicyFamily(str, Enum):
    FULL_CSI_AVG = "full_csi_avg"
    FULL_CSI_AVG_PEAK = "full_csi_avg_peak"
    NO_ECSI = "no_ecsi"
    ON_OFF = "onoff"


@dataclass(frozen=True)
class PolicySpec:
    """A policy family together with its calibrated parameters.

    Exactly the fields of the chosen family may be set:
    full_csi_avg -> lam; full_csi_avg_peak -> lam, q_peak;
    no_ecsi -> lam, gamma_E; onoff -> tau, p_level.
    """

    family: PolicyFamily
    lam: float | None = None
    q_peak: float | None = None
    gamma_E: float | None = None
    tau: float | None = None
    p_level: float | None = None

    _REQUIRED = {
        PolicyFamily.FULL_CSI_AVG: ("lam",),
        PolicyFamily.FULL_CSI_AVG_PEAK: ("lam", "q_peak"),
        PolicyFamily.NO_ECSI: ("lam", "gamma_E"),
        PolicyFamily.ON_OFF: ("tau", "p_level"),
    }

    def __post_init__(self):
        family = PolicyFamily(self.family)
        object.__setattr__(self, "family", family)
        required = self._REQUIRED[family]
        for name in ("lam", "q_peak", "gamma_E", "tau", "p_level"):
            value = getattr(self, name)
            if name in required:
                if value is None:
                    raise ValueError(f"{family.value} policy requires {name}")
            elif value is not None:
                raise ValueError(f"{family.value} policy does not take {name}")
        if self.lam is not None and not (np.isfinite(self.lam) and self.lam >= 0.0):
            raise ValueError("lam must be >= 0 and finite")
        if self.q_peak is not None and not self.q_peak > 0.0:
            raise ValueError("q_peak must be positive")
        if self.gamma_E is not None and not (np.isfinite(self.gamma_E) and self.gamma_E > 0.0):
            raise ValueError("gamma_E must be positive and finite")
        if self.tau is not None and not (np.isfinite(self.tau) and self.tau >= 0.0):
            raise ValueError("tau must be >= 0 and finite")
        if self.p_level is not None and not (np.isfinite(self.p_level) and self.p_level >= 0.0):
            raise ValueError("p_level must be >= 0 and finite")

    @classmethod
    def full_csi_avg(cls, lam: float) -> "PolicySpec":
        return cls(PolicyFamily.FULL_CSI_AVG, lam=lam)

    @classmethod
    def full_csi_avg_peak(cls, lam: float, q_peak: float) -> "PolicySpec":
        return cls(PolicyFamily.FULL_CSI_AVG_PEAK, lam=lam, q_peak=q_peak)

    @classmethod
    def no_ecsi(cls, lam: float, gamma_E: float) -> "PolicySpec":
        return cls(PolicyFamily.NO_ECSI, lam=lam, gamma_E=gamma_E)

    @classmethod
    def onoff(cls, tau: float, p_level: float) -> "PolicySpec":
        return cls(PolicyFamily.ON_OFF, tau=tau, p_level=p_level)


def _positive_gains(state: ChannelState):
    h_M = np.asarray(state.h_M, dtype=float)
    h_E = np.asarray(state.h_E, dtype=float)
    h_P = np.asarray(state.h_P, dtype=float)
    for name, h in (("h_M", h_M), ("h_E", h_E), ("h_P", h_P)):
        if np.any(h <= 0.0) or not np.all(np.isfinite(h)):
            raise ValueError(f"{name} must be strictly positive and finite for CSI policies")
    return np.broadcast_arrays(h_M, h_E, h_P)


def _check_lam(lam):
    if not np.isfinite(lam) or lam <= 0.0:
        raise ValueError(f"lam must be positive and finite, got {lam!r}")


def power_full_csi_avg(state: ChannelState, lam: float):
    """Optimal power with global CSI under an average received-power budget.

    On the active region (h_M - h_E)/h_P > lam, with d = 1/h_E - 1/h_M:

        P = 0.5 * [ sqrt(d^2 + (4/(lam*h_P)) * d) - (1/h_M + 1/h_E) ]

    and P = 0 elsewhere. d > 0 on the active region, so the discriminant is
    evaluated only there.
    """
    _check_lam(lam)
    h_M, h_E, h_P = _positive_gains(state)
    scalar = h_M.ndim == 0
    h_M, h_E, h_P = np.atleast_1d(h_M, h_E, h_P)
    p = np.zeros(h_M.shape)
    act = (h_M - h_E) / h_P > lam
    if act.any():
        hm, he, hp = h_M[act], h_E[act], h_P[act]
        d = 1.0 / he - 1.0 / hm
        disc = d * d + (4.0 / (lam * hp)) * d
        p[act] = 0.5 * (np.sqrt(disc) - (1.0 / hm + 1.0 / he))
    np.maximum(p, 0.0, out=p)
    return float(p[0]) if scalar else p


def power_full_csi_avg_peak(state: ChannelState, lam: float, q_peak: float):
    """min(q_peak/h_P, full-CSI average-only power); P * h_P <= q_peak exactly.

    q_peak = inf reproduces power_full_csi_avg. For finite q_peak the capped
    value is nudged down by at most two ulps so the received power never
    rounds above the limit.
    """
    if not q_peak > 0.0:
        raise ValueError(f"q_peak must be positive, got {q_peak!r}")
    interior = np.atleast_1d(np.asarray(power_full_csi_avg(state, lam), dtype=float))
    h_M, h_E, h_P = _positive_gains(state)
    scalar = h_M.ndim == 0
    h_P = np.atleast_1d(h_P)
    p = np.minimum(q_peak / h_P, interior)
    if np.isfinite(q_peak):
        for _ in range(3):
            over = p * h_P > q_peak
            if not over.any():
                break
            p = np.where(over, np.nextafter(p, 0.0), p)
        else:
            raise AssertionError("could not enforce peak received-power bound")
    return float(p[0]) if scalar else p


def peak_active(state: ChannelState, lam: float, q_peak: float):
    """Whether the peak branch q_peak/h_P is the one selected.

    Evaluates the closed-form test

        1/(h_E/h_P + 1/q_peak) - 1/(h_M/h_P + 1/q_peak) > lam * q_peak^2,

    which holds exactly when q_peak/h_P lies strictly below the average-only
    power.
    """
    _check_lam(lam)
    if not q_peak > 0.0:
        raise ValueError(f"q_peak must be positive, got {q_peak!r}")
    h_M, h_E, h_P = _positive_gains(state)
    scalar = h_M.ndim == 0
    lhs = 1.0 / (h_E / h_P + 1.0 / q_peak) - 1.0 / (h_M / h_P + 1.0 / q_peak)
    out = lhs > lam * q_peak * q_peak
    return bool(out) if scalar else out


def _check_no_ecsi_args(h_M, h_P, lam, gamma_E):
    _check_lam(lam)
    if not np.isfinite(gamma_E) or gamma_E <= 0.0:
        raise ValueError(f"gamma_E must be positive and finite, got {gamma_E!r}")
    h_M = np.asarray(h_M, dtype=float)
    h_P = np.asarray(h_P, dtype=float)
    for name, h in (("h_M", h_M), ("h_P", h_P)):
        if np.any(h <= 0.0) or not np.all(np.isfinite(h)):
            raise ValueError(f"{name} must be strictly positive and finite")
    return h_M, h_P


def no_ecsi_residual(p, h_M, h_P, lam: float, gamma_E: float):
    """Stationarity residual for the no-eavesdropper-CSI power, in E1 form.

    With F = 1 - exp(-h_M/gamma_E) and a = 1/(gamma_E * p):

        F * h_M/(1 + h_M p) - F/p
          + [ e1_scaled(a) - exp(-h_M/gamma_E) * e1_scaled(a + h_M/gamma_E) ]
            / (gamma_E * p^2)
          - lam * h_P

    The bracketed E1 difference uses the scaled form because a overflows
    exp() whenever p is small. The residual is strictly decreasing in p, so
    its positive root (when one exists) is the candidate optimal power.
    """
    h_M, h_P = _check_no_ecsi_args(h_M, h_P, lam, gamma_E)
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0) or not np.all(np.isfinite(p)):
        raise ValueError("p must be strictly positive and finite")
    c = h_M / gamma_E
    big_f = -np.expm1(-c)
    a = 1.0 / (gamma_E * p)
    ei_diff = e1_scaled(a) - np.exp(-c) * e1_scaled(a + c)
    return big_f * h_M / (1.0 + h_M * p) - big_f / p + ei_diff / (gamma_E * p * p) - lam * h_P


def no_ecsi_residual_integral(p: float, h_M: float, h_P: float, lam: float, gamma_E: float) -> float:
    """Quadrature oracle for the same stationarity condition.

        h_M * Pr(h_E <= h_M) / (1 + h_M p)
          - integral_0^h_M  h_E/(1 + h_E p) * f(h_E) dh_E  -  lam * h_P

    with f the exponential density of mean gamma_E. Used only for
    cross-validation of no_ecsi_residual.
    """
    h_M = float(h_M)
    h_P = float(h_P)
    p = float(p)
    _check_no_ecsi_args(h_M, h_P, lam, gamma_E)
    if not p > 0.0:
        raise ValueError("p must be strictly positive")
    big_f = -np.expm1(-h_M / gamma_E)
    pts = [x for x in (gamma_E, 5.0 * gamma_E, 20.0 * gamma_E) if 0.0 < x < h_M]
    val, err = quad(
        lambda h: h / (1.0 + h * p) * np.exp(-h / gamma_E) / gamma_E,
        0.0,
        h_M,
        points=pts or None,
        limit=300,
        epsabs=1e-12,
        epsrel=1e-12,
    )
    if err > max(1e-10, 1e-10 * abs(val)):
        raise RuntimeError(f"quadrature for the stationarity integral did not converge (err={err:g})")
    return big_f * h_M / (1.0 + h_M * p) - val - lam * h_P


def power_no_ecsi(h_M: float, h_P: float, lam: float, gamma_E: float) -> float:
    """Power when only h_M and h_P are known (eavesdropper known by mean).

    Scans a geometric grid over [1e-6, 1e6] for a sign change of
    no_ecsi_residual and refines the bracketed root to 1e-12 relative
    tolerance; no sign change means the zero-power rule applies.
    """
    h_M = float(h_M)
    h_P = float(h_P)
    _check_no_ecsi_args(h_M, h_P, lam, gamma_E)
    grid = np.geomspace(_NO_ECSI_P_LO, _NO_ECSI_P_HI, _NO_ECSI_SCAN_POINTS)
    r = no_ecsi_residual(grid, h_M, h_P, lam, gamma_E)
    if r[0] <= 0.0:
        return 0.0
    flips = np.flatnonzero((r[:-1] > 0.0) & (r[1:] <= 0.0))
    if flips.size == 0:
        return 0.0
    i = int(flips[0])
    root = brentq(
        lambda p: no_ecsi_residual(p, h_M, h_P, lam, gamma_E),
        grid[i],
        grid[i + 1],
        xtol=1e-18,
        rtol=1e-12,
        maxiter=200,
    )
    return float(root)


def _power_no_ecsi_batch(h_M, h_P, lam: float, gamma_E: float):
    # Vectorized companion of power_no_ecsi: same bracket, log-space bisection
    # to better than 1e-10 relative. Needed for Monte Carlo sample sizes.
    h_M, h_P = _check_no_ecsi_args(h_M, h_P, lam, gamma_E)
    h_M, h_P = np.broadcast_arrays(h_M, h_P)
    p_out = np.zeros(h_M.shape)
    r_lo = no_ecsi_residual(_NO_ECSI_P_LO, h_M, h_P, lam, gamma_E)
    idx = np.flatnonzero(r_lo > 0.0)
    if idx.size == 0:
        return p_out
    hm = h_M.ravel()[idx]
    hp = h_P.ravel()[idx]
    r_hi = no_ecsi_residual(_NO_ECSI_P_HI, hm, hp, lam, gamma_E)
    keep = r_hi <= 0.0
    idx = idx[keep]
    if idx.size == 0:
        return p_out
    hm = hm[keep]
    hp = hp[keep]
    llo = np.full(idx.shape, np.log(_NO_ECSI_P_LO))
    lhi = np.full(idx.shape, np.log(_NO_ECSI_P_HI))
    for _ in range(_NO_ECSI_BISECT_ITERS):
        lmid = 0.5 * (llo + lhi)
        rm = no_ecsi_residual(np.exp(lmid), hm, hp, lam, gamma_E)
        gt = rm > 0.0
        llo = np.where(gt, lmid, llo)
        lhi = np.where(gt, lhi, lmid)
    p_out.ravel()[idx] = np.exp(0.5 * (llo + lhi))
    return p_out


def onoff_power_level(q_avg: float, gamma_P: float, gamma_M: float, tau: float) -> float:
    """Constant level (q_avg/gamma_P) * exp(tau/gamma_M).

    Chosen so that transmitting at this level exactly when h_M > tau meets the
    average received-power budget with equality.
    """
    for name, v in (("q_avg", q_avg), ("gamma_P", gamma_P), ("gamma_M", gamma_M)):
        if not np.isfinite(v) or v <= 0.0:
            raise ValueError(f"{name} must be positive and finite, got {v!r}")
    if not np.isfinite(tau) or tau < 0.0:
        raise ValueError(f"tau must be >= 0 and finite, got {tau!r}")
    return (q_avg / gamma_P) * float(np.exp(tau / gamma_M))


def power_onoff(h_M, tau: float, p_level: float):
    """p_level when h_M > tau (strictly), else 0; h_E and h_P play no role."""
    if not np.isfinite(tau) or tau < 0.0:
        raise ValueError(f"tau must be >= 0 and finite, got {tau!r}")
    if not np.isfinite(p_level) or p_level < 0.0:
        raise ValueError(f"p_level must be >= 0 and finite, got {p_level!r}")
    h_M = np.asarray(h_M, dtype=float)
    out = np.where(h_M > tau, p_level, 0.0)
    return float(out) if h_M.ndim == 0 else out


def policy_power(spec: PolicySpec, state: ChannelState):
    """Per-state transmit power of any policy family; scalar or batched."""
    if spec.family is PolicyFamily.FULL_CSI_AVG:
        return power_full_csi_avg(state, spec.lam)
    if spec.family is PolicyFamily.FULL_CSI_AVG_PEAK:
        return power_full_csi_avg_peak(state, spec.lam, spec.q_peak)
    if spec.family is PolicyFamily.NO_ECSI:
        if np.asarray(state.h_M).ndim == 0:
            return power_no_ecsi(state.h_M, state.h_P, spec.lam, spec.gamma_E)
        return _power_no_ecsi_batch(state.h_M, state.h_P, spec.lam, spec.gamma_E)
    if spec.family is PolicyFamily.ON_OFF:
        return power_onoff(state.h_M, spec.tau, spec.p_level)
    raise ValueError(f"unknown policy family {spec.family!r}")
