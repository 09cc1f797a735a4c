"""
Numerical diagnostics for the pointwise-comparability, limit, gradient-bound,
and decay-exponent statements, evaluated on simulation snapshots.

Every diagnostic is a pure function of the snapshot data.  Thresholds are
harness configuration, not claims: the underlying statements assert existence
of constants and vanishing limits, so the checks report window suprema,
monotone trends against a configured threshold, and least-squares exponents
with their standard errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import GridSpec, MultiIndex, RealField, apply_derivative, apply_semigroup, lp_norm
from .solver import SimulationResult, critical_exponent

__all__ = [
    "RatioDiagnostic",
    "SlopeFit",
    "ScanReport",
    "VerdictRow",
    "ratio_diagnostics",
    "limit_scan",
    "gradient_bound_diag",
    "decay_slope_fit",
    "above_critical_local_check",
    "expected_decay_exponent",
    "semigroup_reference",
]

T_TO_0 = "T_TO_0"
T_TO_INF = "T_TO_INF"
X_TO_INF = "X_TO_INF"


@dataclass(frozen=True)
class RatioDiagnostic:
    time: float
    window_radius: float
    floor: float
    sup_ratio: float
    inf_ratio: float
    sup_abs_dev: float
    n_points: int


@dataclass(frozen=True)
class SlopeFit:
    quantity: str
    t_lo: float
    t_hi: float
    slope: float
    stderr: float
    expected: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.slope - self.expected) <= self.tolerance


@dataclass(frozen=True)
class ScanReport:
    mode: str
    coordinates: tuple[float, ...]
    values: tuple[float, ...]
    threshold: float

    @property
    def extreme_value(self) -> float:
        return self.values[0] if self.mode == T_TO_0 else self.values[-1]

    @property
    def extreme_is_minimum(self) -> bool:
        # absolute slack keeps all-roundoff series (linear runs) well-posed
        return self.extreme_value <= min(self.values) + 1e-12

    @property
    def passed(self) -> bool:
        return self.extreme_is_minimum and self.extreme_value < self.threshold


@dataclass(frozen=True)
class VerdictRow:
    name: str
    measured: float
    requirement: str
    passed: bool


def _window_mask(grid: GridSpec, window_radius: float, denom: np.ndarray, floor_frac: float):
    X, Y = grid.centered_coordinates()
    inside = np.hypot(X, Y) <= window_radius
    floor = floor_frac * denom[inside].max()
    return inside & (denom >= floor), floor


def ratio_diagnostics(
    theta_t: RealField,
    p_t_theta0: RealField,
    window_radius: float,
    floor_frac: float = 1e-3,
    time: float = math.nan,
) -> RatioDiagnostic:
    """Window sup/inf of theta / P_t(theta0) with a relative denominator floor."""
    if theta_t.grid != p_t_theta0.grid:
        raise ValueError("fields live on different grids")
    mask, floor = _window_mask(theta_t.grid, window_radius, p_t_theta0.values, floor_frac)
    if not np.any(mask):
        raise ValueError("window is empty after masking")
    ratio = theta_t.values[mask] / p_t_theta0.values[mask]
    return RatioDiagnostic(
        time=time,
        window_radius=window_radius,
        floor=floor,
        sup_ratio=float(ratio.max()),
        inf_ratio=float(ratio.min()),
        sup_abs_dev=float(np.max(np.abs(ratio - 1.0))),
        n_points=int(mask.sum()),
    )


def semigroup_reference(result: SimulationResult) -> list[tuple[float, RealField, RealField]]:
    """(t, theta(t), P_t theta0) for every positive snapshot time."""
    theta0 = result.snapshots[0][1]
    out = []
    for t, th in result.snapshots:
        if t <= 0:
            continue
        out.append((t, th, apply_semigroup(theta0, t, result.config.alpha)))
    return out


def limit_scan(
    result: SimulationResult,
    mode: str,
    window_radius: float,
    floor_frac: float = 1e-3,
    threshold: float = 0.05,
    annuli: Sequence[float] | None = None,
    t_min: float = 0.0,
    t_max: float = math.inf,
) -> ScanReport:
    """
    Monotone-trend report for the three vanishing-ratio limits.  For the time
    scans the series is sup|theta/P_t theta0 - 1| per snapshot and the extreme
    (earliest or latest) entry must be the series minimum and below the
    threshold.  The spatial scan aggregates per-annulus suprema over all
    snapshot times and requires the outermost annulus to be the minimum.
    """
    pairs = [p for p in semigroup_reference(result) if t_min <= p[0] <= t_max]
    if not pairs:
        raise ValueError("run contains no positive-time snapshots in the scan range")
    if mode in (T_TO_0, T_TO_INF):
        ts, devs = [], []
        for t, th, pt in pairs:
            d = ratio_diagnostics(th, pt, window_radius, floor_frac, time=t)
            ts.append(t)
            devs.append(d.sup_abs_dev)
        return ScanReport(mode, tuple(ts), tuple(devs), threshold)
    if mode != X_TO_INF:
        raise ValueError(f"unknown scan mode {mode!r}")
    grid = result.config.grid
    if annuli is None:
        annuli = np.linspace(0.0, window_radius, 6)
    annuli = np.asarray(annuli, dtype=float)
    X, Y = grid.centered_coordinates()
    R = np.hypot(X, Y)
    sups = np.full(len(annuli) - 1, -np.inf)
    for t, th, pt in pairs:
        _, floor = _window_mask(grid, window_radius, pt.values, floor_frac)
        ok = pt.values >= floor
        for i in range(len(annuli) - 1):
            ring = ok & (R >= annuli[i]) & (R < annuli[i + 1])
            if np.any(ring):
                dev = np.max(np.abs(th.values[ring] / pt.values[ring] - 1.0))
                sups[i] = max(sups[i], dev)
    mids = 0.5 * (annuli[:-1] + annuli[1:])
    keep = np.isfinite(sups)
    if keep.sum() < 2:
        raise ValueError("insufficient populated annuli for the spatial scan")
    return ScanReport(X_TO_INF, tuple(mids[keep]), tuple(sups[keep]), threshold)


def gradient_bound_diag(
    theta_t: RealField,
    p_t_abs_theta0: RealField,
    kappa: MultiIndex,
    t: float,
    alpha: float,
    window_radius: float,
    floor_frac: float = 1e-3,
) -> float:
    """sup over the window of t^(|kappa|/alpha) |grad^kappa theta| / P_t|theta0|."""
    if kappa.order > 2:
        raise ValueError("the gradient diagnostic covers |kappa| <= 2")
    mask, _ = _window_mask(theta_t.grid, window_radius, p_t_abs_theta0.values, floor_frac)
    if not np.any(mask):
        raise ValueError("window is empty after masking")
    g = theta_t if kappa.order == 0 else apply_derivative(theta_t, kappa)
    num = np.abs(g.values[mask]) * t ** (kappa.order / alpha)
    return float(np.max(num / p_t_abs_theta0.values[mask]))


def decay_slope_fit(
    times: Sequence[float],
    values: Sequence[float],
    expected: float,
    quantity: str = "",
    tolerance: float = 0.05,
    min_points: int = 8,
    min_decades: float = 1.5,
) -> SlopeFit:
    """Unweighted least-squares exponent of log(value) against log(t)."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    ok = (t > 0) & (v > 0) & np.isfinite(v)
    t, v = t[ok], v[ok]
    if len(t) < min_points:
        raise ValueError(f"slope fit needs at least {min_points} usable points, got {len(t)}")
    decades = math.log10(t.max() / t.min())
    if decades < min_decades:
        raise ValueError(f"slope fit needs >= {min_decades} decades of t, got {decades:.2f}")
    lt, lv = np.log(t), np.log(v)
    A = np.vstack([lt, np.ones_like(lt)]).T
    coef, *_ = np.linalg.lstsq(A, lv, rcond=None)
    resid = lv - A @ coef
    dof = max(len(t) - 2, 1)
    s2 = float(resid @ resid) / dof
    stderr = math.sqrt(s2 / float(np.sum((lt - lt.mean()) ** 2)))
    return SlopeFit(
        quantity=quantity,
        t_lo=float(t.min()),
        t_hi=float(t.max()),
        slope=float(coef[0]),
        stderr=stderr,
        expected=expected,
        tolerance=tolerance,
    )


def above_critical_local_check(
    result: SimulationResult,
    p_exp: float,
    T: float,
    window_radius: float,
    floor_frac: float = 1e-3,
) -> list[RatioDiagnostic]:
    """
    Local-in-time comparability for data in L^p with p above the critical
    power: finiteness of the window ratio bounds uniformly over (0, T].
    """
    alpha = result.config.alpha
    if p_exp <= critical_exponent(alpha):
        raise ValueError(
            f"p_exp must exceed the critical power {critical_exponent(alpha):.3f}"
        )
    theta0 = result.snapshots[0][1]
    if np.any(theta0.values < -1e-12):
        raise ValueError("the comparability check requires nonnegative initial data")
    if not np.isfinite(lp_norm(theta0, p_exp)):
        raise ValueError("initial data has no finite L^p norm at the requested power")
    out = []
    for t, th, pt in semigroup_reference(result):
        if t > T + 1e-12:
            continue
        out.append(ratio_diagnostics(th, pt, window_radius, floor_frac, time=t))
    if not out:
        raise ValueError("no snapshots in (0, T]")
    return out


def expected_decay_exponent(quantity: str, alpha: float, p: float = math.inf, kappa_order: int = 0) -> float:
    """
    Analytic decay exponents:

    - solution or Riesz-transform L^p norms from critical data:
      -(alpha-1)/alpha + 2/(alpha p)
    - kernel-derivative L^p norms: -(2/alpha)(1 - 1/p) - |kappa|/alpha
    - Riesz-semigroup sup norms: -(|kappa| + alpha - 1)/alpha
    """
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    if quantity in ("theta_lp", "riesz_lp"):
        return -(alpha - 1.0) / alpha + 2.0 * inv_p / alpha
    if quantity == "kernel_lp":
        return -(2.0 / alpha) * (1.0 - inv_p) - kappa_order / alpha
    if quantity == "riesz_semigroup_sup":
        return -(kappa_order + alpha - 1.0) / alpha
    raise ValueError(f"unknown quantity {quantity!r}")
