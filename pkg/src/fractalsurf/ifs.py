"""Generic machinery for fractal interpolation surfaces on rectangular nets.

A surface IFS is the family ``W_ij(x, y, z) = (u_i(x), v_j(y), F_ij(x, y, z))``.
Its attractor is the graph of the unique continuous fixed point of the
Read-Bajraktarevic operator

    (T g)(x, y) = F_ij(u_i^{-1}(x), v_j^{-1}(y), g(u_i^{-1}(x), v_j^{-1}(y)))

on the cell ``I_i x J_j`` containing ``(x, y)``.  Three evaluators are
provided:

* :func:`fixed_point_solve` iterates ``T`` on a tensor grid containing the
  knots.  Preimages that fall between nodes are read by bilinear
  interpolation, so grid values carry an ``O(mesh)`` error unless the grid is
  closed under the inverse maps (true for uniform nets with aligned grids).
* :func:`orbit_evaluate` pushes the knots forward through the maps.  Values
  on the orbit are exact; the points form an irregular cloud.
* :func:`trace_evaluate` unrolls the self-referential equation backwards
  from arbitrary points until the accumulated vertical contraction is below
  a tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .errors import MaxIterExceeded, OutOfDomain, PointBudgetExceeded, ResolutionMismatch
from .field import SampledField, interpolation_stencil
from .net import AffineMaps, Net, tau


@dataclass(eq=False)
class VerticalMapFamily:
    """The vertical maps ``F_ij`` of a surface IFS.

    Parameters
    ----------
    evaluator : callable
        ``evaluator(i, j, x, y, z)`` with 1-based cell index arrays ``i, j``
        broadcastable against the coordinate arrays.
    lipschitz : ndarray
        ``(N, M)`` array of contraction factors ``gamma_ij`` in ``z``.
    knot_values : ndarray
        ``(N+1, M+1)`` data ``z_kl`` indexed ``[k, l]``.
    initial : callable, optional
        Starting iterate ``(x, y) -> z`` for the solvers.
    affine_in_z : bool
        Whether every ``F_ij`` is affine in ``z``.  Solvers then precompute
        slope and offset once per grid instead of re-evaluating each sweep.
    """

    evaluator: Callable
    lipschitz: np.ndarray
    net: Net
    xmaps: AffineMaps
    ymaps: AffineMaps
    knot_values: np.ndarray
    initial: Optional[Callable] = None
    affine_in_z: bool = True
    label: str = "custom"
    _plans: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.lipschitz = np.broadcast_to(np.asarray(self.lipschitz, dtype=float),
                                         (self.net.N, self.net.M)).copy()
        self.knot_values = np.asarray(self.knot_values, dtype=float)
        if self.knot_values.shape != (self.net.N + 1, self.net.M + 1):
            raise ValueError("knot_values must have shape (N+1, M+1)")
        if np.any(self.lipschitz < 0) or np.any(self.lipschitz >= 1):
            raise ValueError("Lipschitz constants must lie in [0, 1)")

    def __call__(self, i, j, x, y, z):
        return self.evaluator(i, j, x, y, z)

    @property
    def contraction(self) -> float:
        return float(self.lipschitz.max())

    def slope_offset(self, i, j, x, y):
        zero = self.evaluator(i, j, x, y, np.zeros(np.broadcast(i, j, x, y).shape))
        one = self.evaluator(i, j, x, y, np.ones(np.broadcast(i, j, x, y).shape))
        return one - zero, zero

    def start(self, x, y):
        if self.initial is not None:
            return np.broadcast_to(np.asarray(self.initial(x, y), dtype=float), np.shape(x))
        return np.zeros(np.shape(x))

    def plan(self, xs, ys) -> "PullbackPlan":
        key = (np.asarray(xs).tobytes(), np.asarray(ys).tobytes())
        plan = self._plans.get(key)
        if plan is None:
            plan = PullbackPlan(self, xs, ys)
            self._plans[key] = plan
        return plan


@dataclass
class ConformanceReport:
    corner_defect: Optional[float]
    matching_defect: Optional[float]
    worst: list
    tolerance: float

    @property
    def passed(self) -> bool:
        checked = [d for d in (self.corner_defect, self.matching_defect) if d is not None]
        return all(d <= self.tolerance for d in checked)


def verify_corner_conditions(family: VerticalMapFamily, data=None, tolerance: float = 1e-12) -> ConformanceReport:
    """Check ``F_ij(x_k, y_l, z_kl) = z_{tau(i,k), tau(j,l)}`` at all corner pairs."""
    net = family.net
    z = family.knot_values if data is None else np.asarray(data, dtype=float)
    N, M = net.N, net.M
    offenders = []
    worst = 0.0
    for i in range(1, N + 1):
        for j in range(1, M + 1):
            for k in (0, N):
                for l in (0, M):
                    got = float(family(i, j, net.xs[k], net.ys[l], z[k, l]))
                    want = z[tau(i, k), tau(j, l)]
                    d = abs(got - want)
                    worst = max(worst, d)
                    offenders.append((d, f"cell ({i},{j}) corner ({k},{l})"))
    offenders.sort(key=lambda t: -t[0])
    return ConformanceReport(worst, None, [(name, d) for d, name in offenders[:5]], tolerance)


def _z_range(family):
    z = family.knot_values
    return float(z.min()) - 1.0, float(z.max()) + 1.0


def verify_matching_conditions(family: VerticalMapFamily, n_samples: int = 64, z_range=None,
                               tolerance: float = 1e-12) -> ConformanceReport:
    """Check that neighbouring cells agree along every interior grid line.

    For interior ``x_i`` the two maps must share the preimage
    ``u_i^{-1}(x_i) = u_{i+1}^{-1}(x_i)`` and ``F_ij``, ``F_{i+1,j}`` must agree
    there for all ``(y, z)``; symmetrically in ``y``.  A preimage mismatch is
    itself counted as a defect.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    net = family.net
    zlo, zhi = _z_range(family) if z_range is None else z_range
    zs = np.linspace(zlo, zhi, n_samples)
    ys = np.linspace(net.ys[0], net.ys[-1], n_samples)
    xs = np.linspace(net.xs[0], net.xs[-1], n_samples)
    offenders = []

    Y, Z = np.meshgrid(ys, zs)
    for i, xa, xb in family.xmaps.interior_preimages():
        for j in range(1, net.M + 1):
            left = family(i, j, xa, Y, Z)
            right = family(i + 1, j, xb, Y, Z)
            d = max(float(np.max(np.abs(left - right))), abs(xa - xb))
            offenders.append((d, f"x-line {i} cell row {j}"))

    X, Z = np.meshgrid(xs, zs)
    for j, ya, yb in family.ymaps.interior_preimages():
        for i in range(1, net.N + 1):
            low = family(i, j, X, ya, Z)
            high = family(i, j + 1, X, yb, Z)
            d = max(float(np.max(np.abs(low - high))), abs(ya - yb))
            offenders.append((d, f"y-line {j} cell column {i}"))

    offenders.sort(key=lambda t: -t[0])
    worst = offenders[0][0] if offenders else 0.0
    return ConformanceReport(None, worst, [(name, d) for d, name in offenders[:5]], tolerance)


def verify_conformance(family: VerticalMapFamily, n_samples: int = 64, tolerance: float = 1e-12) -> ConformanceReport:
    corner = verify_corner_conditions(family, tolerance=tolerance)
    matching = verify_matching_conditions(family, n_samples, tolerance=tolerance)
    worst = sorted(corner.worst + matching.worst, key=lambda t: -t[1])[:5]
    return ConformanceReport(corner.corner_defect, matching.matching_defect, worst, tolerance)


class PullbackPlan:
    """Precomputed preimage stencils of one tensor grid.

    Inverse maps act coordinate-wise, so the preimage of the grid is itself a
    tensor product and bilinear lookup factorizes into two 1-D passes.
    """

    def __init__(self, family: VerticalMapFamily, xs, ys):
        net = family.net
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        _check_grid(net, xs, ys)
        self.xs, self.ys = xs, ys
        self.family = family
        ix = family.xmaps.locate(xs)
        iy = family.ymaps.locate(ys)
        px = np.clip(family.xmaps.inverse(ix, xs), net.xs[0], net.xs[-1])
        py = np.clip(family.ymaps.inverse(iy, ys), net.ys[0], net.ys[-1])
        self.kx, self.wx = interpolation_stencil(xs, px)
        self.ky, self.wy = interpolation_stencil(ys, py)
        # True when every preimage is a node: pullback then introduces no interpolation error.
        self.exact = bool(np.all((self.wx == 0) | (self.wx == 1)) and np.all((self.wy == 0) | (self.wy == 1)))
        self.I, self.J = np.meshgrid(ix, iy)
        self.PX, self.PY = np.meshgrid(px, py)
        if family.affine_in_z:
            self.slope, self.offset = family.slope_offset(self.I, self.J, self.PX, self.PY)

    def pull(self, values: np.ndarray) -> np.ndarray:
        """``g(u_i^{-1}(x), v_j^{-1}(y))`` at every node, bilinear between nodes."""
        wy = self.wy[:, None]
        rows = (1 - wy) * values[self.ky, :] + wy * values[self.ky + 1, :]
        return (1 - self.wx) * rows[:, self.kx] + self.wx * rows[:, self.kx + 1]

    def apply(self, values: np.ndarray) -> np.ndarray:
        z = self.pull(values)
        if self.family.affine_in_z:
            return self.slope * z + self.offset
        return self.family(self.I, self.J, self.PX, self.PY, z)


def _check_grid(net: Net, xs, ys):
    for knots, axis, name in ((net.xs, xs, "x"), (net.ys, ys, "y")):
        if not (np.isclose(axis[0], knots[0], rtol=0, atol=1e-12) and np.isclose(axis[-1], knots[-1], rtol=0, atol=1e-12)):
            raise ResolutionMismatch(f"{name}-grid does not span the net domain")
        idx = np.searchsorted(axis, knots)
        idx = np.clip(idx, 0, len(axis) - 1)
        if not np.allclose(axis[idx], knots, rtol=0, atol=1e-12 * (knots[-1] - knots[0])):
            raise ResolutionMismatch(f"{name}-grid does not contain every net knot")


def rb_apply(family: VerticalMapFamily, g: SampledField) -> SampledField:
    """One application of the Read-Bajraktarevic operator on ``g``'s grid."""
    plan = family.plan(g.xs, g.ys)
    return g.with_values(plan.apply(g.values))


def _grid_res(grid_res):
    if isinstance(grid_res, (int, np.integer)):
        return int(grid_res), int(grid_res)
    nx, ny = grid_res
    return int(nx), int(ny)


def default_max_iter(tol: float, r0: float, q: float) -> int:
    if q <= 0:
        return 17
    return max(1, math.ceil(math.log(tol / (1.0 + r0)) / math.log(q))) + 16


@dataclass
class SolveResult:
    field: SampledField
    iterations: int
    residual: float
    initial_residual: float
    history: list

    def __iter__(self):
        return iter((self.field, self.iterations, self.residual))


def fixed_point_solve(family: VerticalMapFamily, grid_res=257, tol: float = 1e-10,
                      max_iter: Optional[int] = None, initial: Optional[SampledField] = None) -> SolveResult:
    """Iterate the RB operator on a grid through the knots until the sup-norm
    step ``||T g - g||`` drops to ``tol``.

    The returned field is the last iterate; since ``T`` contracts by at most
    ``max gamma_ij`` its own residual is below ``tol`` as well.

    Raises
    ------
    MaxIterExceeded
        Carrying the last iterate, the iteration count and its residual.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if initial is None:
        nx, ny = _grid_res(grid_res)
        xs, ys = family.net.grid_axes(nx, ny)
        X, Y = np.meshgrid(xs, ys)
        g = family.start(X, Y).astype(float)
    else:
        xs, ys, g = initial.xs, initial.ys, initial.values.copy()
    plan = family.plan(xs, ys)
    history = []
    limit = max_iter
    r0 = None
    it = 0
    while True:
        it += 1
        new = plan.apply(g)
        r = float(np.max(np.abs(new - g)))
        g = new
        history.append(r)
        if r0 is None:
            r0 = r
            if limit is None:
                limit = default_max_iter(tol, r0, family.contraction)
        if r <= tol:
            return SolveResult(SampledField(xs, ys, g), it, r, r0, history)
        if it >= limit:
            raise MaxIterExceeded(f"no convergence to {tol:g} after {it} iterations (residual {r:.3e})",
                                  field=SampledField(xs, ys, g), iterations=it, residual=r)


@dataclass(kw_only=True, eq=False)
class FractalSurface:
    """An IFS attractor with cached grid solutions and point evaluation.

    ``engine`` selects how point requests are answered: ``"grid"`` reads the
    working-grid solution bilinearly, ``"trace"`` unrolls the
    self-referential equation (exact up to ``tol``).
    """

    family: VerticalMapFamily
    grid_res: int = 257
    tol: float = 1e-10
    max_iter: Optional[int] = None
    engine: str = "grid"
    _solutions: dict = dc_field(default_factory=dict, repr=False)

    @property
    def net(self) -> Net:
        return self.family.net

    def solve(self, grid_res=None) -> "SolveResult":
        res = self.grid_res if grid_res is None else grid_res
        key = int(res) if isinstance(res, (int, np.integer)) else tuple(res)
        if key not in self._solutions:
            self._solutions[key] = fixed_point_solve(self.family, res, self.tol, self.max_iter)
        return self._solutions[key]

    def field(self, grid_res=None) -> SampledField:
        return self.solve(grid_res).field

    def orbit(self, depth: int, **kwargs) -> "SurfaceOrbit":
        return orbit_evaluate(self.family, depth, **kwargs)

    def __call__(self, x, y, engine: Optional[str] = None):
        engine = self.engine if engine is None else engine
        (x0, x1), (y0, y1) = self.net.domain
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.any((x < x0) | (x > x1) | (y < y0) | (y > y1)):
            raise OutOfDomain("evaluation point outside the surface domain")
        if engine == "grid":
            return self.field()(x, y)
        if engine == "trace":
            return trace_evaluate(self.family, x, y, tol=self.tol)
        raise ValueError(f"unknown engine {engine!r}")


@dataclass
class SurfaceOrbit:
    """Forward images of the knots with their exact attractor values."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    depth: int

    def __len__(self):
        return len(self.x)

    def lookup(self, net: Net):
        return _OrbitIndex(self, net)


class _OrbitIndex:
    def __init__(self, orbit: SurfaceOrbit, net: Net):
        (x0, x1), (y0, y1) = net.domain
        self._origin = (x0, y0)
        self._scale = (2.0 ** 36 / (x1 - x0), 2.0 ** 36 / (y1 - y0))
        keys = self._keys(orbit.x, orbit.y)
        self._table = dict(zip(map(tuple, keys.tolist()), orbit.z.tolist()))

    def _keys(self, x, y):
        kx = np.rint((np.asarray(x) - self._origin[0]) * self._scale[0]).astype(np.int64)
        ky = np.rint((np.asarray(y) - self._origin[1]) * self._scale[1]).astype(np.int64)
        return np.stack([kx, ky], axis=-1)

    def __call__(self, x, y):
        keys = self._keys(x, y)
        return np.array([self._table[tuple(k)] for k in keys.tolist()])


def orbit_evaluate(family: VerticalMapFamily, depth: int, seed=None, max_points: int = 4_000_000) -> SurfaceOrbit:
    """Push the seed triples through every ``W_ij`` ``depth`` times.

    ``seed`` defaults to the knot triples ``(x_k, y_l, z_kl)``.  Because corner
    knots map onto knots, each level contains the previous one; duplicates
    (shared cell edges) are merged.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    net = family.net
    if seed is None:
        X, Y = net.knot_grid()
        x, y, z = X.ravel(), Y.ravel(), family.knot_values.ravel()
    else:
        x, y, z = (np.asarray(c, dtype=float) for c in seed)
    N, M = net.N, net.M
    for _ in range(depth):
        if len(x) * N * M > max_points:
            raise PointBudgetExceeded(f"next level would hold {len(x) * N * M} points (budget {max_points})")
        xs, ys, zs = [], [], []
        for i in range(1, N + 1):
            ux = family.xmaps.forward(i, x)
            for j in range(1, M + 1):
                xs.append(ux)
                ys.append(family.ymaps.forward(j, y))
                zs.append(family(i, j, x, y, z))
        x, y, z = _dedupe(np.concatenate(xs), np.concatenate(ys), np.concatenate(zs), net)
    return SurfaceOrbit(x, y, z, depth)


def _dedupe(x, y, z, net):
    (x0, x1), (y0, y1) = net.domain
    kx = np.rint((x - x0) / (x1 - x0) * 2.0 ** 36).astype(np.int64)
    ky = np.rint((y - y0) / (y1 - y0) * 2.0 ** 36).astype(np.int64)
    _, idx = np.unique(np.stack([kx, ky], axis=1), axis=0, return_index=True)
    idx.sort()
    return x[idx], y[idx], z[idx]


def orbit_residual(family: VerticalMapFamily, orbit: SurfaceOrbit) -> np.ndarray:
    """Self-referential defect ``|f(x,y) - F_ij(pre, f(pre))|`` at each orbit point.

    The preimage of every orbit point lies on the orbit one level up, so both
    sides use exact values.
    """
    net = family.net
    index = orbit.lookup(net)
    i = family.xmaps.locate(orbit.x)
    j = family.ymaps.locate(orbit.y)
    px = np.clip(family.xmaps.inverse(i, orbit.x), net.xs[0], net.xs[-1])
    py = np.clip(family.ymaps.inverse(j, orbit.y), net.ys[0], net.ys[-1])
    rhs = family(i, j, px, py, index(px, py))
    return np.abs(orbit.z - rhs)


def trace_evaluate(family: VerticalMapFamily, x, y, tol: float = 1e-12, max_depth: int = 400):
    """Evaluate the attractor at arbitrary points by unrolling the
    self-referential equation.

    With ``F_ij(x, y, z) = A z + B`` the value at a point is
    ``B_0 + A_0 (B_1 + A_1 (...))`` along its chain of preimages.  The tail is
    replaced by the initial iterate once ``|A_0 ... A_k| <= tol``, so the error
    is at most ``tol`` times the sup-distance between the attractor and the
    initial iterate.
    """
    if not family.affine_in_z:
        raise ValueError("trace evaluation requires a family that is affine in z")
    net = family.net
    cx = np.array(x, dtype=float, copy=True)
    cy = np.array(y, dtype=float, copy=True)
    shape = np.broadcast(cx, cy).shape
    cx, cy = np.broadcast_to(cx, shape).copy(), np.broadcast_to(cy, shape).copy()
    weight = np.ones(shape)
    acc = np.zeros(shape)
    for _ in range(max_depth):
        i = family.xmaps.locate(cx)
        j = family.ymaps.locate(cy)
        cx = np.clip(family.xmaps.inverse(i, cx), net.xs[0], net.xs[-1])
        cy = np.clip(family.ymaps.inverse(j, cy), net.ys[0], net.ys[-1])
        slope, offset = family.slope_offset(i, j, cx, cy)
        acc += weight * offset
        weight = weight * slope
        if np.max(np.abs(weight), initial=0.0) <= tol:
            break
    return acc + weight * family.start(cx, cy)
