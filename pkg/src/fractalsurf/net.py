"""Rectangular nets and the horizontal contraction maps of the surface IFS.

A net is a pair of strictly increasing knot vectors ``xs`` (length N+1) and
``ys`` (length M+1).  For every subinterval the affine map ``u_i`` sends the
whole axis ``[x_0, x_N]`` onto ``[x_{i-1}, x_i]``; odd maps preserve the
orientation and even maps reverse it, which is what makes neighbouring
images meet at a common preimage point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NonIncreasingKnots, OutOfDomain, TooFewIntervals


@dataclass(frozen=True)
class Net:
    xs: tuple
    ys: tuple

    @property
    def N(self) -> int:
        return len(self.xs) - 1

    @property
    def M(self) -> int:
        return len(self.ys) - 1

    @property
    def domain(self) -> tuple:
        return ((self.xs[0], self.xs[-1]), (self.ys[0], self.ys[-1]))

    @property
    def corners(self) -> list:
        """The four corner points ``(x_k, y_l)`` with k in {0, N}, l in {0, M}."""
        return [(x, y) for x in (self.xs[0], self.xs[-1]) for y in (self.ys[0], self.ys[-1])]

    def knot_grid(self):
        """Knot coordinates as two ``(N+1, M+1)`` arrays indexed ``[i, j]``."""
        return np.meshgrid(np.asarray(self.xs), np.asarray(self.ys), indexing="ij")

    def grid_axes(self, nx: int, ny: int | None = None):
        """Grid axes that contain every knot.

        Each subinterval is split into the same number of equal pieces, so the
        actual node count is ``N * ceil((nx - 1) / N) + 1``, which equals
        ``nx`` whenever ``N`` divides ``nx - 1``.
        """
        ny = nx if ny is None else ny
        return _axis_through_knots(self.xs, nx), _axis_through_knots(self.ys, ny)

    def is_uniform(self, rtol: float = 1e-12) -> bool:
        dx = np.diff(self.xs)
        dy = np.diff(self.ys)
        return bool(np.allclose(dx, dx[0], rtol=rtol, atol=0) and np.allclose(dy, dy[0], rtol=rtol, atol=0))


def _axis_through_knots(knots, n: int) -> np.ndarray:
    knots = np.asarray(knots, dtype=float)
    pieces = len(knots) - 1
    per = max(1, math.ceil((n - 1) / pieces))
    axis = np.empty(pieces * per + 1)
    for i in range(pieces):
        axis[i * per:(i + 1) * per + 1] = np.linspace(knots[i], knots[i + 1], per + 1)
    return axis


def build_net(xs: Sequence[float], ys: Sequence[float]) -> Net:
    """Validate knot vectors and return a :class:`Net`.

    Raises
    ------
    NonIncreasingKnots
        If any consecutive pair of knots is not strictly increasing.
    TooFewIntervals
        If either axis has fewer than two subintervals.
    """
    xs = tuple(float(v) for v in xs)
    ys = tuple(float(v) for v in ys)
    for name, knots in (("xs", xs), ("ys", ys)):
        for k in range(len(knots) - 1):
            if not knots[k] < knots[k + 1]:
                raise NonIncreasingKnots(
                    f"{name}[{k}]={knots[k]!r} is not below {name}[{k + 1}]={knots[k + 1]!r}")
    for name, knots in (("xs", xs), ("ys", ys)):
        if len(knots) < 3:
            raise TooFewIntervals(f"{name} defines {len(knots) - 1} interval(s); at least 2 are required")
    return Net(xs, ys)


def uniform_net(N: int, M: int | None = None, domain=((0.0, 1.0), (0.0, 1.0))) -> Net:
    M = N if M is None else M
    (x0, x1), (y0, y1) = domain
    return build_net(np.linspace(x0, x1, N + 1), np.linspace(y0, y1, M + 1))


def tau(i: int, boundary: int) -> int:
    """Knot index hit by the ``i``-th map at a domain endpoint.

    ``boundary`` is ``0`` for the left/bottom endpoint and any nonzero label
    (N or M) for the right/top endpoint.
    """
    if i < 1:
        raise ValueError("interval index must be >= 1")
    if i % 2 == 1:
        return i - 1 if boundary == 0 else i
    return i if boundary == 0 else i - 1


@dataclass(frozen=True)
class AffineMaps:
    """The family ``u_i(x) = a_i x + b_i`` for one axis, ``i = 1..N``.

    ``a`` and ``b`` are stored 0-based (``a[i-1]`` is ``a_i``); the vectorized
    helpers take 1-based interval indices to match the usual notation.
    """

    axis: str
    a: np.ndarray
    b: np.ndarray
    knots: tuple
    orientation: str = "alternating"

    @property
    def count(self) -> int:
        return len(self.a)

    @property
    def contraction(self) -> np.ndarray:
        return np.abs(self.a)

    def forward(self, i, x):
        i = np.asarray(i) - 1
        return self.a[i] * x + self.b[i]

    def inverse(self, i, x):
        i = np.asarray(i) - 1
        return (x - self.b[i]) / self.a[i]

    def locate(self, x) -> np.ndarray:
        """1-based interval index of each coordinate (half-open, last closed)."""
        x = np.asarray(x, dtype=float)
        knots = np.asarray(self.knots)
        if np.any(x < knots[0]) or np.any(x > knots[-1]) or np.any(np.isnan(x)):
            raise OutOfDomain(f"coordinate outside [{knots[0]}, {knots[-1]}] on axis {self.axis}")
        return np.minimum(np.searchsorted(knots, x, side="right"), len(knots) - 1)

    def interior_preimages(self):
        """``(i, u_i^{-1}(x_i), u_{i+1}^{-1}(x_i))`` for every interior knot."""
        out = []
        for i in range(1, self.count):
            xi = self.knots[i]
            out.append((i, float(self.inverse(i, xi)), float(self.inverse(i + 1, xi))))
        return out


def build_affine_maps(net: Net, axis: str, orientation: str = "alternating") -> AffineMaps:
    """Solve the endpoint conditions for every map on one axis.

    ``orientation="forward"`` makes every map orientation preserving; it
    violates the matching conditions and exists to exercise the verifiers.
    """
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    if orientation not in ("alternating", "forward"):
        raise ValueError("orientation must be 'alternating' or 'forward'")
    knots = net.xs if axis == "x" else net.ys
    lo, hi = knots[0], knots[-1]
    span = hi - lo
    n = len(knots) - 1
    a = np.empty(n)
    b = np.empty(n)
    for i in range(1, n + 1):
        if orientation == "forward" or i % 2 == 1:
            start, end = knots[i - 1], knots[i]
        else:
            start, end = knots[i], knots[i - 1]
        a[i - 1] = (end - start) / span
        b[i - 1] = start - a[i - 1] * lo
    return AffineMaps(axis, a, b, tuple(knots), orientation)


def locate_cell(net: Net, point) -> tuple:
    """1-based cell ``(i, j)`` containing ``point`` under the half-open convention."""
    x, y = point
    (x0, x1), (y0, y1) = net.domain
    if not (x0 <= x <= x1 and y0 <= y <= y1):
        raise OutOfDomain(f"point {point!r} outside {net.domain!r}")
    i = min(int(np.searchsorted(net.xs, x, side="right")), net.N)
    j = min(int(np.searchsorted(net.ys, y, side="right")), net.M)
    return i, j
