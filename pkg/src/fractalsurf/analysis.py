"""Norms, quadrature and the numerical estimators used to check surfaces.

* sup and L^p norms of sampled fields (midpoint rule on cell centers),
* the L^p form of the perturbation bound,
* column-range box counting for graphs of functions,
* a brute-force Ditzian-Totik modulus of second order,
* convergence tables for sequences of scale functions or operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import BadExponent, ResolutionTooCoarse
from .field import SampledField
from .ifs import trace_evaluate

__all__ = [
    "sup_norm", "lp_norm", "lp_norm_of", "cell_centers", "LpBoundReport", "verify_lp_bound",
    "BoxCountReport", "box_count_dimension", "dt_modulus", "ConvergenceTable",
    "convergence_table_alpha", "convergence_table_operator",
]


def sup_norm(f: SampledField) -> float:
    return f.sup()


def _check_exponent(p):
    if not (p == math.inf or (np.isfinite(p) and p >= 1)):
        raise BadExponent(f"L^p exponent must be >= 1, got {p!r}")


def _lp(center_values: np.ndarray, areas: np.ndarray, p: float) -> float:
    a = np.abs(center_values)
    if p == math.inf:
        return float(a.max())
    # scale out the max to avoid overflow for large p
    top = a.max()
    if top == 0:
        return 0.0
    return float(top * np.sum(areas * (a / top) ** p) ** (1.0 / p))


def lp_norm(f: SampledField, p: float) -> float:
    """L^p norm by the composite midpoint rule.

    The value at a cell center is the mean of the cell's four corner samples,
    which is exactly the field's bilinear interpolant there.
    """
    _check_exponent(p)
    v = f.values
    centers = 0.25 * (v[:-1, :-1] + v[1:, :-1] + v[:-1, 1:] + v[1:, 1:])
    areas = np.outer(np.diff(f.ys), np.diff(f.xs))
    return _lp(centers, areas, p)


def cell_centers(domain, res: int):
    """Cell-center mesh and cell areas of a uniform ``res x res`` node grid."""
    (x0, x1), (y0, y1) = domain
    xs = np.linspace(x0, x1, res)
    ys = np.linspace(y0, y1, res)
    cx = 0.5 * (xs[:-1] + xs[1:])
    cy = 0.5 * (ys[:-1] + ys[1:])
    X, Y = np.meshgrid(cx, cy)
    areas = np.outer(np.diff(ys), np.diff(xs))
    return X, Y, areas


def lp_norm_of(func: Callable, domain, res: int, p: float) -> float:
    """L^p norm of a callable by the midpoint rule on a ``res x res`` node grid."""
    _check_exponent(p)
    X, Y, areas = cell_centers(domain, res)
    return _lp(np.broadcast_to(func(X, Y), X.shape), areas, p)


@dataclass
class LpBoundReport:
    p: float
    lhs: float
    rhs: float
    slack: float
    resolution: int

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + self.slack


def verify_lp_bound(f: Callable, surface, p: float, res: int = 1025, slack: float = 1e-6) -> LpBoundReport:
    """Check ``||f^a - f||_p <= ||a|| / (1 - ||a||) * ||f - Lf||_p``.

    Both sides use the same midpoint rule; ``f^a`` is evaluated at the cell
    centers with the trace engine, so no grid interpolation enters the left
    side.
    """
    _check_exponent(p)
    X, Y, areas = cell_centers(surface.net.domain, res)
    fv = f(X, Y)
    fa = trace_evaluate(surface.family, X, Y)
    lf = surface.operator.apply(f)(X, Y)
    a = surface.alpha.sup_norm
    lhs = _lp(fa - fv, areas, p)
    rhs = a / (1.0 - a) * _lp(fv - lf, areas, p)
    return LpBoundReport(p, lhs, rhs, slack, res)


@dataclass
class BoxCountReport:
    scales: np.ndarray
    counts: np.ndarray
    slope: float
    intercept: float
    residual: float
    dimension: float
    dropped: int = 0

    def as_dict(self) -> dict:
        return {"scales": self.scales.tolist(), "counts": self.counts.tolist(), "slope": self.slope,
                "intercept": self.intercept, "residual": self.residual, "dimension": self.dimension,
                "dropped": self.dropped}


def _fit(scales, counts):
    lx = np.log(1.0 / scales)
    ly = np.log(counts)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return float(slope), float(intercept), resid


def box_count_dimension(f: SampledField, k_min: int = 3, k_max: int = 9,
                        residual_limit: float = 0.05) -> BoxCountReport:
    """Box-counting dimension of the graph of a sampled function.

    At scale ``eps = (x extent) / 2**k`` the domain is split into ``eps``
    columns, each column's value range ``r`` (over all nodes on or inside it)
    needs ``floor(r / eps) + 1`` boxes, and the dimension is the slope of
    ``log N(eps)`` against ``log(1 / eps)``.  If the fit residual (RMS in log
    space) exceeds ``residual_limit`` the two coarsest scales are dropped.

    Raises
    ------
    ResolutionTooCoarse
        If ``2**k_max`` columns do not fall on whole grid cells.
    """
    if not 0 <= k_min < k_max:
        raise ValueError("need 0 <= k_min < k_max")
    nx, ny = f.resolution
    if (nx - 1) % 2 ** k_max:
        raise ResolutionTooCoarse(f"{nx} nodes per axis cannot resolve 2^{k_max} columns")
    v = f.values
    cmax = np.maximum.reduce([v[:-1, :-1], v[1:, :-1], v[:-1, 1:], v[1:, 1:]])
    cmin = np.minimum.reduce([v[:-1, :-1], v[1:, :-1], v[:-1, 1:], v[1:, 1:]])
    extent = f.xs[-1] - f.xs[0]
    scales, counts = [], []
    for k in range(k_min, k_max + 1):
        b = (nx - 1) // 2 ** k
        if (ny - 1) % b:
            raise ResolutionTooCoarse(f"{ny} nodes in y do not tile into blocks of {b} cells")
        by, bx = (ny - 1) // b, (nx - 1) // b
        hi = cmax.reshape(by, b, bx, b).max(axis=(1, 3))
        lo = cmin.reshape(by, b, bx, b).min(axis=(1, 3))
        eps = extent / 2 ** k
        scales.append(eps)
        counts.append(float(np.sum(np.floor((hi - lo) / eps) + 1)))
    scales = np.array(scales)
    counts = np.array(counts)
    slope, intercept, resid = _fit(scales, counts)
    dropped = 0
    if resid > residual_limit and len(scales) > 3:
        dropped = 2
        slope, intercept, resid = _fit(scales[2:], counts[2:])
    return BoxCountReport(scales, counts, slope, intercept, resid, slope, dropped)


def _phi(x):
    return np.sqrt(np.clip(1.0 - x * x, 0.0, None))


def dt_modulus(f: Callable, delta1: float, delta2: float, sampling_res: int = 128,
               h_res: Optional[int] = None, h_floor: float = 1e-3) -> float:
    """Second-order Ditzian-Totik modulus on ``[-1, 1]^2`` with ``phi = sqrt(1 - x^2)``.

    Brute force: ``(x, y)`` range over a ``sampling_res^2`` lattice and the
    steps over ``delta * c_k`` with geometric factors ``c_k`` from 1 down to
    ``h_floor``.  Differences whose offset points leave the square count as 0.
    """
    if not (0 < delta1 <= 1 and 0 < delta2 <= 1):
        raise ValueError("delta1 and delta2 must lie in (0, 1]")
    h_res = sampling_res if h_res is None else h_res
    factors = np.geomspace(1.0, h_floor, h_res)
    xs = np.linspace(-1.0, 1.0, sampling_res)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    px = _phi(X)[..., None]
    py = _phi(Y)[..., None]
    f0 = 2.0 * np.asarray(f(X, Y), dtype=float)[..., None]
    h2 = delta2 * factors
    dy = py * h2
    inside_y = (Y[..., None] + dy <= 1.0) & (Y[..., None] - dy >= -1.0)
    best = 0.0
    for h1 in delta1 * factors:
        dx = px * h1
        inside = inside_y & (X[..., None] + dx <= 1.0) & (X[..., None] - dx >= -1.0)
        Xb, Yb = X[..., None], Y[..., None]
        diff = f(Xb + dx, Yb + dy) - f0 + f(Xb - dx, Yb - dy)
        diff = np.where(inside, np.abs(diff), 0.0)
        best = max(best, float(diff.max()))
    return best


@dataclass
class ConvergenceTable:
    parameters: list
    errors: np.ndarray
    bounds: np.ndarray
    tol: float
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.all(self.errors <= self.bounds + 2 * self.tol))

    def rows(self):
        return list(zip(self.parameters, self.errors.tolist(), self.bounds.tolist()))


def _measure(f, operator, alpha, net, grid_res, tol):
    from .alpha import build_alpha_surface, perturbation_bound

    s = build_alpha_surface(f, operator, alpha, net, grid_res=grid_res, tol=tol)
    fld = s.field()
    X, Y = fld.mesh_grid()
    return float(np.max(np.abs(fld.values - f(X, Y)))), perturbation_bound(s, grid_res)


def convergence_table_alpha(f: Callable, operator, net, alphas: Sequence, grid_res: int = 257,
                            tol: float = 1e-10) -> ConvergenceTable:
    """Measured ``||f^{a_n} - f||`` against ``||a_n|| / (1 - ||a_n||) ||f - Lf||`` for each ``a_n``."""
    errs, bounds = zip(*(_measure(f, operator, a, net, grid_res, tol) for a in alphas))
    return ConvergenceTable(list(alphas), np.array(errs), np.array(bounds), tol)


def convergence_table_operator(f: Callable, alpha, net, operators: Sequence, grid_res: int = 257,
                               tol: float = 1e-10) -> ConvergenceTable:
    """Measured ``||f^a_{L_n} - f||`` against ``||a|| / (1 - ||a||) ||f - L_n f||`` for each ``L_n``."""
    errs, bounds = zip(*(_measure(f, op, alpha, net, grid_res, tol) for op in operators))
    labels = [op.describe() for op in operators]
    return ConvergenceTable(labels, np.array(errs), np.array(bounds), tol)
