"""Probability metrics between mixing laws, computed on a shared grid.

Both laws are tabulated on one grid covering the union of their supports.
The points where the two densities cross are located by root finding; the
difference of CDFs ``D = F1 - F2`` is monotone between consecutive
crossings, which gives

* Kolmogorov distance: ``max |D|`` over the crossings and grid ends;
* total variation (Scheffe): ``1/2 sum |D(c_{k+1}) - D(c_k)|`` over the crossings;
* Fortet-Mourier bracket: ramp test functions ``clip(x - c, -1, 1)`` for the
  lower end, ``min(int |D| dx, 2 d_TV)`` for the upper end.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy import optimize

from .mixing import (
    TAIL_MASS,
    DensityGridSpec,
    MixingLaw,
    exact_pdf,
    support_bounds,
    tabulate,
)

_ROOT_XTOL = 1e-13


@dataclass(frozen=True)
class DistanceReport:
    kolmogorov: float
    total_variation: float
    fm_lower: float
    fm_upper: float
    grid: DensityGridSpec
    error_bound: float

    def to_record(self) -> dict:
        rec = {k: v for k, v in asdict(self).items() if k != "grid"}
        rec.update({f"grid_{k}": v for k, v in asdict(self.grid).items()})
        return rec


def shared_grid(law1: MixingLaw, law2: MixingLaw, spec: DensityGridSpec | None = None):
    """Grid nodes over both supports, with every left extremity inserted as a node."""
    spec = spec or DensityGridSpec()
    (lo1, hi1), (lo2, hi2) = support_bounds(law1), support_bounds(law2)
    lower = min(lo1, lo2) if spec.lower is None else spec.lower
    upper = max(hi1, hi2) if spec.upper is None else spec.upper
    x = np.linspace(lower, upper, spec.n_points)
    edges = [e for e in (lo1, lo2) if lower < e < upper]
    resolved = DensityGridSpec(spec.n_points, lower, upper)
    return np.union1d(x, edges), resolved


def _crossings(law1, law2, x, edges):
    h = float(np.min(np.diff(x)))
    probe = x.copy()
    # densities are evaluated just right of support edges, where they may jump
    at_edge = np.isin(x, edges)
    probe[at_edge] += 1e-9 * h
    diff = exact_pdf(law1, probe) - exact_pdf(law2, probe)
    sign = np.sign(diff)
    nz = np.flatnonzero(sign != 0)
    roots = []

    def f(t):
        return float(exact_pdf(law1, t) - exact_pdf(law2, t))

    for i, j in zip(nz[:-1], nz[1:]):
        if sign[i] == sign[j]:
            continue
        a, b = probe[i], probe[j]
        if j > i + 1:
            # zero run between i and j: the crossing is an interval; take its middle
            roots.append(0.5 * (x[i + 1] + x[j - 1]))
            continue
        try:
            roots.append(optimize.brentq(f, a, b, xtol=_ROOT_XTOL * max(1.0, abs(b))))
        except ValueError:
            roots.append(0.5 * (a + b))
    return np.array(roots), probe


@dataclass(frozen=True)
class _Comparison:
    x: np.ndarray
    d_nodes: np.ndarray
    f_nodes: np.ndarray
    roots: np.ndarray
    d_roots: np.ndarray
    windows: np.ndarray
    d_windows: np.ndarray
    f_windows: np.ndarray
    truncation: float
    grid: DensityGridSpec


def _compare(law1, law2, grid=None) -> _Comparison:
    x, resolved = shared_grid(law1, law2, grid)
    edges = [e for e in (support_bounds(law1)[0], support_bounds(law2)[0])]
    t1, t2 = tabulate(law1, x), tabulate(law2, x)
    roots, probe = _crossings(law1, law2, x, edges)
    d_nodes = t1.cdf - t2.cdf
    # density difference (the derivative of D), one-sided at support edges
    f_nodes = exact_pdf(law1, probe) - exact_pdf(law2, probe)
    d_roots = t1.cdf_at(roots) - t2.cdf_at(roots) if roots.size else np.empty(0)
    # ramp window ends c +- 1, evaluated exactly rather than interpolated
    w = np.setdiff1d(np.concatenate([x - 1.0, x + 1.0]), x)
    w = w[(w > x[0]) & (w < x[-1])]
    d_w = t1.cdf_at(w) - t2.cdf_at(w)
    f_w = exact_pdf(law1, w) - exact_pdf(law2, w)
    trunc = t1.truncation + t2.truncation + 2 * TAIL_MASS
    return _Comparison(x, d_nodes, f_nodes, roots, d_roots, w, d_w, f_w, trunc, resolved)


def _scheffe_total_variation(cmp: _Comparison) -> float:
    path = np.concatenate([[0.0, cmp.d_nodes[0]], cmp.d_roots, [cmp.d_nodes[-1], 0.0]])
    return 0.5 * float(np.sum(np.abs(np.diff(path))))


def _kolmogorov(cmp: _Comparison) -> float:
    # D is monotone between crossings, so its extremes sit at crossings or ends
    if cmp.d_roots.size:
        vals = np.concatenate([np.abs(cmp.d_roots), np.abs(cmp.d_nodes[[0, -1]])])
    else:
        vals = np.abs(cmp.d_nodes)
    return float(vals.max())


def _cell_integrals(pts, vals, slopes):
    """Trapezoid with Euler-Maclaurin end corrections, cell by cell.

    ``slopes`` are the derivatives of ``vals``; cells touching a non-finite
    slope (a density singularity) fall back to the plain trapezoid.
    """
    h = np.diff(pts)
    trap = 0.5 * (vals[1:] + vals[:-1]) * h
    with np.errstate(invalid="ignore"):
        corr = h * h / 12.0 * (slopes[1:] - slopes[:-1])
    return trap - np.where(np.isfinite(corr), corr, 0.0)


def _fm_bracket(cmp: _Comparison, tv: float):
    pts = np.concatenate([cmp.x, cmp.roots, cmp.windows])
    vals = np.concatenate([cmp.d_nodes, cmp.d_roots, cmp.d_windows])
    slopes = np.concatenate([cmp.f_nodes, np.zeros(cmp.roots.size), cmp.f_windows])
    order = np.argsort(pts, kind="stable")
    pts, vals, slopes = pts[order], vals[order], slopes[order]
    # |D| is smooth between crossings, with slope sign(D) * (f1 - f2)
    sign = np.sign(0.5 * (vals[1:] + vals[:-1]))
    h = np.diff(pts)
    with np.errstate(invalid="ignore"):
        corr = h * h / 12.0 * sign * (slopes[1:] - slopes[:-1])
    l1_cells = 0.5 * (np.abs(vals[1:]) + np.abs(vals[:-1])) * h - np.where(np.isfinite(corr), corr, 0.0)
    l1 = float(np.sum(np.maximum(l1_cells, 0.0)))
    integral = np.concatenate([[0.0], np.cumsum(_cell_integrals(pts, vals, slopes))])
    upper_win = np.interp(cmp.x + 1.0, pts, integral)
    lower_win = np.interp(cmp.x - 1.0, pts, integral, left=0.0)
    lower = float(np.max(np.abs(upper_win - lower_win)))
    upper = min(l1, 2.0 * tv)
    return min(lower, upper), upper


def _error_bound(cmp: _Comparison) -> float:
    return cmp.truncation + 1e-12 * max(1, cmp.roots.size)


def kolmogorov(law1: MixingLaw, law2: MixingLaw, grid: DensityGridSpec | None = None) -> float:
    """``sup_x |F1(x) - F2(x)|``."""
    return _kolmogorov(_compare(law1, law2, grid))


def total_variation(law1: MixingLaw, law2: MixingLaw, grid: DensityGridSpec | None = None) -> float:
    """``1/2 int |f1 - f2|``, via the CDF increments between density crossings."""
    return _scheffe_total_variation(_compare(law1, law2, grid))


def fortet_mourier_bracket(law1: MixingLaw, law2: MixingLaw, grid: DensityGridSpec | None = None):
    """``(lower, upper)`` with ``lower <= d_FM(law1, law2) <= upper``."""
    cmp = _compare(law1, law2, grid)
    return _fm_bracket(cmp, _scheffe_total_variation(cmp))


def distance_report(law1: MixingLaw, law2: MixingLaw, grid: DensityGridSpec | None = None) -> DistanceReport:
    """All metrics from a single tabulation of the pair."""
    cmp = _compare(law1, law2, grid)
    tv = _scheffe_total_variation(cmp)
    lo, hi = _fm_bracket(cmp, tv)
    return DistanceReport(_kolmogorov(cmp), tv, lo, hi, cmp.grid, _error_bound(cmp))


def trapezoid_total_variation(law1: MixingLaw, law2: MixingLaw, grid: DensityGridSpec | None = None) -> float:
    """Plain trapezoid estimate of ``1/2 int |f1 - f2|`` on the shared grid.

    Inaccurate next to density singularities; kept as a cross-check.
    """
    x, _ = shared_grid(law1, law2, grid)
    return 0.5 * float(np.trapezoid(np.abs(exact_pdf(law1, x) - exact_pdf(law2, x)), x))
