"""Brute-force maximizers that independently validate the closed-form policies.

These never call the closed forms: they maximize the per-state objectives
directly on a power grid (with golden-section refinement), so agreement with
the policy module is a genuine two-route check. They ship in the package, not
behind a test-only wall, so regressions keep exercising them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .fading import ChannelState
from .optim import golden_section_max

__all__ = [
    "GridSpec",
    "default_grid",
    "per_state_lagrangian",
    "argmax_power_grid",
    "no_ecsi_per_state_objective",
    "argmax_no_ecsi_grid",
]

# Geometric grids span this many decades below p_max; fine enough that one
# golden pass around the best cell reaches the requested agreement.
_GEOMETRIC_SPAN = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Power grid for exhaustive search."""

    p_max: float
    n_points: int = 10_000
    spacing: str = "geometric"

    def __post_init__(self):
        if not np.isfinite(self.p_max) or self.p_max <= 0.0:
            raise ValueError("p_max must be positive and finite")
        if self.n_points < 100:
            raise ValueError("n_points must be >= 100")
        if self.spacing not in ("linear", "geometric"):
            raise ValueError(f"spacing must be 'linear' or 'geometric', got {self.spacing!r}")


def default_grid(lam: float) -> GridSpec:
    """Grid wide enough for the policy's dynamic range at multiplier lam."""
    return GridSpec(p_max=max(10.0 / lam, 1e3))


def _grid_points(grid: GridSpec, cap: float | None = None) -> np.ndarray:
    if grid.spacing == "linear":
        pts = np.linspace(0.0, grid.p_max, grid.n_points)
    else:
        pts = np.concatenate(
            ([0.0], np.geomspace(grid.p_max * _GEOMETRIC_SPAN, grid.p_max, grid.n_points - 1))
        )
    if cap is not None and cap < grid.p_max:
        pts = np.append(pts[pts < cap], cap)
    return pts


def per_state_lagrangian(state: ChannelState, p, lam: float):
    """Per-state objective [ln(1 + h_M p) - ln(1 + h_E p)]^+ - lam * h_P * p."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0.0) or not np.all(np.isfinite(p)):
        raise ValueError("p must be finite and >= 0")
    h_M = np.asarray(state.h_M, dtype=float)
    h_E = np.asarray(state.h_E, dtype=float)
    h_P = np.asarray(state.h_P, dtype=float)
    rate = np.maximum(0.0, np.log1p(h_M * p) - np.log1p(h_E * p))
    out = rate - lam * h_P * p
    return float(out) if out.ndim == 0 else out


def _refine(objective, pts, i, tol_rel=1e-7):
    lo = pts[i - 1] if i > 0 else pts[i]
    hi = pts[i + 1] if i + 1 < pts.size else pts[i]
    if hi <= lo:
        return float(pts[i]), float(objective(pts[i]))
    tol = max(1e-12, tol_rel * hi)
    x, fx = golden_section_max(objective, float(lo), float(hi), tol)
    f_grid = float(objective(pts[i]))
    if f_grid >= fx:
        return float(pts[i]), f_grid
    return float(x), float(fx)


def argmax_power_grid(
    state: ChannelState, lam: float, grid: GridSpec, q_peak: float | None = None
) -> float:
    """Exhaustive-grid argmax of the per-state objective for one state.

    With q_peak present the search is truncated at the boundary q_peak/h_P,
    which is itself a grid point so boundary optima are hit exactly.
    """
    cap = None
    if q_peak is not None:
        if not q_peak > 0.0:
            raise ValueError("q_peak must be positive")
        if np.isfinite(q_peak):
            cap = q_peak / float(state.h_P)
    pts = _grid_points(grid, cap)
    vals = per_state_lagrangian(state, pts, lam)
    i = int(np.argmax(vals))
    if cap is not None and i == pts.size - 1:
        # Boundary optimum: refine only toward the interior side, keeping the
        # exact boundary point in play.
        x, fx = _refine(lambda p: per_state_lagrangian(state, p, lam), pts, i)
        return x if fx > vals[i] else float(cap)
    x, _ = _refine(lambda p: per_state_lagrangian(state, p, lam), pts, i)
    return x


def _expected_rate_nodes(h_M: float, gamma_E: float, n_nodes: int = 160):
    # Gauss-Legendre panels over [0, h_M] against the exponential density,
    # split at the density's own scale so sharp gamma_E values stay resolved.
    edges = [0.0]
    for cut in (10.0 * gamma_E, 40.0 * gamma_E):
        if cut < h_M:
            edges.append(cut)
    edges.append(h_M)
    xs, ws = np.polynomial.legendre.leggauss(n_nodes)
    nodes = []
    weights = []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        y = mid + half * xs
        w = half * ws * np.exp(-y / gamma_E) / gamma_E
        nodes.append(y)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def no_ecsi_per_state_objective(
    h_M: float, h_P: float, p: float, lam: float, gamma_E: float
) -> float:
    """Expected objective when h_E is unknown:

        E_{h_E}[ ln(1 + h_M p) - ln(1 + h_E p) ]^+  -  lam * h_P * p

    by adaptive quadrature of the positive part (which lives on h_E < h_M;
    beyond h_M the bracket is nonpositive and contributes zero).
    """
    p = float(p)
    if not np.isfinite(p) or p < 0.0:
        raise ValueError("p must be finite and >= 0")
    if p == 0.0:
        return 0.0
    pts = [x for x in (gamma_E, 5.0 * gamma_E, 20.0 * gamma_E) if 0.0 < x < h_M]
    val, err = quad(
        lambda h: (np.log1p(h_M * p) - np.log1p(h * p)) * np.exp(-h / gamma_E) / gamma_E,
        0.0,
        h_M,
        points=pts or None,
        limit=300,
        epsabs=1e-12,
        epsrel=1e-12,
    )
    if err > max(1e-10, 1e-10 * abs(val)):
        raise RuntimeError(f"quadrature for the expected rate did not converge (err={err:g})")
    return float(val) - lam * h_P * p


def argmax_no_ecsi_grid(
    h_M: float, h_P: float, lam: float, gamma_E: float, grid: GridSpec
) -> float:
    """Grid argmax of the expected per-state objective, golden-refined.

    The grid pass evaluates the h_E expectation with fixed Gauss-Legendre
    panels (vectorized over the power grid); the refinement reuses the same
    nodes so the search is self-consistent.
    """
    nodes, weights = _expected_rate_nodes(float(h_M), float(gamma_E))

    def objective_vec(p):
        p = np.asarray(p, dtype=float)
        inner = np.log1p(h_M * p)[..., None] - np.log1p(nodes * p[..., None])
        expected = inner @ weights
        return expected - lam * h_P * p

    pts = _grid_points(grid)
    vals = objective_vec(pts)
    i = int(np.argmax(vals))
    x, _ = _refine(lambda p: float(objective_vec(np.asarray(p))), pts, i)
    return x
