"""Bilinear fractal interpolation surfaces and their box-counting dimension.

With ``g`` the bilinear function through the four corner data points, ``h``
and ``S`` the piecewise-bilinear interpolants of the data ``z`` and of the
scaling lattice ``s``, the vertical maps are

    F_ij(x, y, z) = S(u_i(x), v_j(y)) * (z - g(x, y)) + h(u_i(x), v_j(y)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisUnmet, ShapeMismatch, UnbalancedScaling
from .field import SampledField
from .ifs import FractalSurface, VerticalMapFamily
from .net import Net, build_affine_maps


@dataclass(frozen=True, eq=False)
class BilinearData:
    """Knot values ``z[i, j]`` and scaling values ``s[i, j]`` on the net lattice."""

    z: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        s = np.broadcast_to(np.asarray(self.s, dtype=float), z.shape).copy()
        if z.ndim != 2:
            raise ShapeMismatch("z must be a 2-D lattice")
        if np.any(np.abs(s) >= 1):
            raise ValueError("scaling values must satisfy |s_ij| < 1")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "s", s)

    def check(self, net: Net):
        if self.z.shape != (net.N + 1, net.M + 1):
            raise ShapeMismatch(f"data lattice {self.z.shape} does not match net {(net.N + 1, net.M + 1)}")


@dataclass(frozen=True)
class CornerBilinear:
    """The bilinear function through the four corner data points."""

    x0: float
    x1: float
    y0: float
    y1: float
    z00: float
    z10: float
    z01: float
    z11: float

    def __call__(self, x, y):
        area = (self.x1 - self.x0) * (self.y1 - self.y0)
        return ((self.x1 - x) * (self.y1 - y) * self.z00 + (x - self.x0) * (self.y1 - y) * self.z10
                + (self.x1 - x) * (y - self.y0) * self.z01 + (x - self.x0) * (y - self.y0) * self.z11) / area


def corner_bilinear(data: BilinearData, net: Net) -> CornerBilinear:
    data.check(net)
    z = data.z
    return CornerBilinear(net.xs[0], net.xs[-1], net.ys[0], net.ys[-1],
                          z[0, 0], z[-1, 0], z[0, -1], z[-1, -1])


def piecewise_bilinear(values, net: Net) -> SampledField:
    """Cellwise bilinear interpolant of lattice values ``values[i, j]``.

    Returned as a field on the knot grid, whose bilinear lookup is exactly the
    interpolant.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != (net.N + 1, net.M + 1):
        raise ShapeMismatch(f"expected a {(net.N + 1, net.M + 1)} lattice, got {values.shape}")
    return SampledField(np.asarray(net.xs), np.asarray(net.ys), values.T)


def build_bilinear_fis(data: BilinearData, net: Net, grid_res: int = 257, tol: float = 1e-10,
                       orientation: str = "alternating", **kwargs) -> FractalSurface:
    data.check(net)
    xmaps = build_affine_maps(net, "x", orientation)
    ymaps = build_affine_maps(net, "y", orientation)
    g = corner_bilinear(data, net)
    h = piecewise_bilinear(data.z, net)
    S = piecewise_bilinear(data.s, net)

    def evaluator(i, j, x, y, z):
        X = xmaps.forward(i, x)
        Y = ymaps.forward(j, y)
        return S(X, Y) * (z - g(x, y)) + h(X, Y)

    a = np.abs(data.s)
    # |S| on a cell peaks at one of its four corners
    lip = np.maximum.reduce([a[:-1, :-1], a[1:, :-1], a[:-1, 1:], a[1:, 1:]])
    family = VerticalMapFamily(evaluator, lip, net, xmaps, ymaps, data.z, initial=h,
                               affine_in_z=True, label="bilinear")
    return FractalSurface(family=family, grid_res=grid_res, tol=tol, **kwargs)


def steadiness_check(data: BilinearData) -> bool:
    """True when every cell's four scaling values share a sign (zeros allowed)."""
    s = data.s
    cells = np.stack([s[:-1, :-1], s[1:, :-1], s[:-1, 1:], s[1:, 1:]])
    return bool(np.all(np.all(cells >= 0, axis=0) | np.all(cells <= 0, axis=0)))


def gamma_sums(data: BilinearData, net: Net) -> tuple:
    """The four sums of ``|S(u_i(x_c), v_j(y_c))|`` over all cells, one per domain corner."""
    data.check(net)
    S = piecewise_bilinear(data.s, net)
    xmaps = build_affine_maps(net, "x")
    ymaps = build_affine_maps(net, "y")
    I, J = np.meshgrid(np.arange(1, net.N + 1), np.arange(1, net.M + 1), indexing="ij")
    sums = []
    for xc in (net.xs[0], net.xs[-1]):
        for yc in (net.ys[0], net.ys[-1]):
            sums.append(float(np.sum(np.abs(S(xmaps.forward(I, xc), ymaps.forward(J, yc))))))
    return tuple(sums)


def gamma_constant(data: BilinearData, net: Net, tol: float = 1e-10) -> float:
    """Common value of the four corner sums.

    Raises
    ------
    UnbalancedScaling
        If the sums differ by more than ``tol``.
    """
    sums = gamma_sums(data, net)
    if max(sums) - min(sums) > tol:
        raise UnbalancedScaling(f"corner sums differ: {sums}")
    return sums[0]


def co_bilinear_check(data: BilinearData, net: Net, tol: float = 1e-12) -> bool:
    """True when every data point lies on the corner bilinear function."""
    g = corner_bilinear(data, net)
    X, Y = net.knot_grid()
    return bool(np.max(np.abs(data.z - g(X, Y))) <= tol)


@dataclass
class DimensionVerdict:
    gamma: float
    steady: bool
    balanced: bool
    co_bilinear: bool
    predicted: float


def theoretical_box_dimension(data: BilinearData, net: Net) -> DimensionVerdict:
    """Predicted box dimension of the attractor's graph.

    ``1 + log(gamma) / log(N)`` when ``gamma > N`` and the data are not
    co-bilinear, else 2.

    Raises
    ------
    HypothesisUnmet
        If ``M != N``, the scaling is not steady, or the corner sums differ.
    """
    if net.M != net.N:
        raise HypothesisUnmet(f"requires M = N (got N={net.N}, M={net.M})")
    if not steadiness_check(data):
        raise HypothesisUnmet("scaling factors are not steady")
    try:
        gamma = gamma_constant(data, net)
    except UnbalancedScaling as exc:
        raise HypothesisUnmet(str(exc)) from exc
    co = co_bilinear_check(data, net)
    N = net.N
    predicted = 1.0 + math.log(gamma) / math.log(N) if (gamma > N and not co) else 2.0
    return DimensionVerdict(gamma, True, True, co, predicted)
