"""Sampled bivariate functions on tensor grids."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfDomain, ResolutionMismatch, ShapeMismatch


@dataclass(frozen=True, eq=False)
class SampledField:
    """Values of a function on a tensor grid.

    ``values[j, i]`` is the sample at ``(xs[i], ys[j])``: rows follow ``y`` and
    flattening in C order gives the row-major layout used by the exporters.
    The field doubles as a continuous function through its bilinear
    interpolant (see :meth:`__call__`).
    """

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(ys), len(xs)):
            raise ShapeMismatch(f"values shape {values.shape} does not match grid {(len(ys), len(xs))}")
        if len(xs) < 2 or len(ys) < 2:
            raise ShapeMismatch("a field needs at least 2 nodes per axis")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, func, xs, ys) -> "SampledField":
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        X, Y = np.meshgrid(xs, ys)
        vals = np.broadcast_to(np.asarray(func(X, Y), dtype=float), X.shape)
        return cls(xs, ys, np.array(vals))

    @property
    def shape(self):
        return self.values.shape

    @property
    def resolution(self):
        """``(nx, ny)``."""
        return len(self.xs), len(self.ys)

    @property
    def domain(self):
        return ((self.xs[0], self.xs[-1]), (self.ys[0], self.ys[-1]))

    @property
    def mesh(self) -> float:
        return float(max(np.diff(self.xs).max(), np.diff(self.ys).max()))

    def mesh_grid(self):
        return np.meshgrid(self.xs, self.ys)

    def same_grid(self, other: "SampledField") -> bool:
        return (self.xs.shape == other.xs.shape and self.ys.shape == other.ys.shape
                and np.array_equal(self.xs, other.xs) and np.array_equal(self.ys, other.ys))

    def require_same_grid(self, other: "SampledField"):
        if not self.same_grid(other):
            raise ResolutionMismatch("fields live on different grids")

    def with_values(self, values) -> "SampledField":
        return SampledField(self.xs, self.ys, values)

    def __sub__(self, other):
        if isinstance(other, SampledField):
            self.require_same_grid(other)
            return self.with_values(self.values - other.values)
        return self.with_values(self.values - other)

    def __add__(self, other):
        if isinstance(other, SampledField):
            self.require_same_grid(other)
            return self.with_values(self.values + other.values)
        return self.with_values(self.values + other)

    def __mul__(self, scalar):
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __call__(self, x, y):
        """Bilinear interpolation at arbitrary points inside the grid."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        kx, wx = interpolation_stencil(self.xs, x)
        ky, wy = interpolation_stencil(self.ys, y)
        v = self.values
        return ((1 - wy) * ((1 - wx) * v[ky, kx] + wx * v[ky, kx + 1])
                + wy * ((1 - wx) * v[ky + 1, kx] + wx * v[ky + 1, kx + 1]))


def interpolation_stencil(axis: np.ndarray, x, snap: float = 1e-12):
    """Left node index and linear weight for each coordinate.

    Coordinates within ``snap * extent`` of a node are snapped onto it so that
    exactly representable preimages read node values without blending.
    """
    axis = np.asarray(axis)
    x = np.asarray(x, dtype=float)
    extent = axis[-1] - axis[0]
    tol = snap * extent
    if np.any(x < axis[0] - tol) or np.any(x > axis[-1] + tol):
        raise OutOfDomain("interpolation point outside the sampled grid")
    x = np.clip(x, axis[0], axis[-1])
    k = np.clip(np.searchsorted(axis, x, side="right") - 1, 0, len(axis) - 2)
    h = axis[k + 1] - axis[k]
    w = (x - axis[k]) / h
    w = np.where(w * h <= tol, 0.0, w)
    near_right = (1.0 - w) * h <= tol
    step = near_right & (k + 1 <= len(axis) - 2)
    k = np.where(step, k + 1, k)
    w = np.where(step, 0.0, np.where(near_right, 1.0, w))
    return k, w
