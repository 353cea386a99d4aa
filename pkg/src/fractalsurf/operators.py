"""Scale functions and the perturbation operators ``L`` used to build
alpha-fractal surfaces.

Every operator maps a function ``f(x, y)`` (any vectorized callable, including
a :class:`~fractalsurf.field.SampledField`) to another callable ``Lf`` and
agrees with ``f`` at the four domain corners.  Norm data are recorded with the
operator: exact values where a closed form exists, otherwise the safe upper
bound ``||Id - L|| <= 1 + ||L||`` together with a sampled lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Callable, Optional

import numpy as np

from .errors import (CornerFixViolation, CornerValueViolation, DegreeTooSmall, IdentityMap,
                     IdentityOperator, InadmissibleScale)

UNIT_SQUARE = ((0.0, 1.0), (0.0, 1.0))
SCALE_MARGIN = 1e-9
NORM_RES = 257


def _grid(domain, res=NORM_RES):
    (x0, x1), (y0, y1) = domain
    return np.meshgrid(np.linspace(x0, x1, res), np.linspace(y0, y1, res))


def grid_sup(func, domain, res=NORM_RES) -> float:
    """Max of ``|func|`` over a ``res x res`` uniform grid (a lower bound of the sup-norm)."""
    X, Y = _grid(domain, res)
    return float(np.max(np.abs(np.broadcast_to(func(X, Y), X.shape))))


@dataclass(frozen=True, eq=False)
class ScaleFunction:
    evaluator: Callable
    sup_norm: float
    constant: Optional[float] = None

    def __call__(self, x, y):
        return self.evaluator(x, y)


def scale_function(value, domain=UNIT_SQUARE, res: int = NORM_RES) -> ScaleFunction:
    """Wrap a constant or a callable as an admissible scale function.

    Raises
    ------
    InadmissibleScale
        If the (grid-estimated) sup-norm exceeds ``1 - 1e-9``.
    """
    if isinstance(value, ScaleFunction):
        return value
    if callable(value):
        sup = grid_sup(value, domain, res)
        const = None
        evaluator = value
    else:
        const = float(value)
        sup = abs(const)
        evaluator = _constant(const)
    if not np.isfinite(sup) or sup > 1.0 - SCALE_MARGIN:
        raise InadmissibleScale(f"scale function has sup-norm {sup!r}; it must stay below 1")
    return ScaleFunction(evaluator, sup, const)


def _constant(c):
    def evaluate(x, y):
        return np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, c)
    return evaluate


@dataclass(frozen=True, eq=False)
class PerturbOperator:
    """A bounded linear operator on ``C(I x J)`` fixing corner values.

    Attributes
    ----------
    norm : float
        ``||L||`` (exact, or a grid estimate of an exact formula).
    id_minus_norm : float
        ``||Id - L||``; exact when ``id_minus_exact`` is true, otherwise an
        upper bound used by every threshold computation.
    id_minus_lower : float
        Sampled lower bound of ``||Id - L||`` from normalized test functions.
    """

    kind: str
    params: dict
    domain: tuple
    transform: Callable
    norm: float
    id_minus_norm: float
    id_minus_exact: bool
    id_minus_lower: float = 0.0

    def apply(self, f) -> Callable:
        """Return the callable ``Lf``."""
        return self.transform(f)

    def __call__(self, f):
        return self.apply(f)

    def corner_defect(self, f) -> float:
        (x0, x1), (y0, y1) = self.domain
        xs = np.array([x0, x0, x1, x1])
        ys = np.array([y0, y1, y0, y1])
        return float(np.max(np.abs(self.apply(f)(xs, ys) - f(xs, ys))))

    def describe(self) -> dict:
        return {"kind": self.kind, **{k: v for k, v in self.params.items() if not callable(v)}}


def _test_functions(domain, count=12, seed=0):
    """Random normalized trigonometric test functions for sampled norm bounds."""
    rng = np.random.default_rng(seed)
    (x0, x1), (y0, y1) = domain
    out = []
    for _ in range(count):
        kx, ky = rng.integers(1, 6, size=2)
        px, py = rng.uniform(0, 2 * np.pi, size=2)
        c = rng.normal(size=3)

        def f(x, y, kx=kx, ky=ky, px=px, py=py, c=c):
            s = (np.asarray(x) - x0) / (x1 - x0)
            t = (np.asarray(y) - y0) / (y1 - y0)
            return c[0] * np.cos(np.pi * kx * s + px) * np.cos(np.pi * ky * t + py) + c[1] * s * t + c[2] * np.sin(np.pi * kx * t)

        out.append(f)
    return out


def sampled_id_minus_lower(transform, domain, res=129) -> float:
    best = 0.0
    for f in _test_functions(domain):
        X, Y = _grid(domain, res)
        fv = f(X, Y)
        scale = np.max(np.abs(fv))
        if scale == 0:
            continue
        best = max(best, float(np.max(np.abs(fv - transform(f)(X, Y))) / scale))
    return best


def _corner_arrays(domain):
    (x0, x1), (y0, y1) = domain
    return np.array([x0, x0, x1, x1], dtype=float), np.array([y0, y1, y0, y1], dtype=float)


def multiplication_operator(t: Callable, domain=UNIT_SQUARE, res: int = NORM_RES) -> PerturbOperator:
    """``(Lf)(x, y) = f(x, y) t(x, y)`` with ``t = 1`` at the corners.

    ``||L|| = ||t||_inf`` and ``||Id - L|| = ||1 - t||_inf`` (grid estimates).
    """
    cx, cy = _corner_arrays(domain)
    corner = np.abs(np.asarray(t(cx, cy), dtype=float) - 1.0)
    if np.max(corner) > 1e-12:
        raise CornerValueViolation(f"t must equal 1 at the domain corners (defect {np.max(corner):.3e})")
    deviation = grid_sup(lambda x, y: 1.0 - t(x, y), domain, res)
    if deviation <= 1e-12:
        raise IdentityOperator("t is identically 1 on the grid, so L is the identity")

    def transform(f):
        return lambda x, y: f(x, y) * t(x, y)

    return PerturbOperator("multiplication", {"t": t}, domain, transform,
                           norm=grid_sup(t, domain, res), id_minus_norm=deviation,
                           id_minus_exact=True, id_minus_lower=deviation)


def composition_operator(t_map: Callable, domain=UNIT_SQUARE, res: int = NORM_RES) -> PerturbOperator:
    """``(Lf)(x, y) = f(t_map(x, y))`` for a self-map fixing the corners.

    ``||L|| = 1``; ``||Id - L||`` is recorded as the upper bound 2.
    """
    (x0, x1), (y0, y1) = domain
    cx, cy = _corner_arrays(domain)
    tx, ty = (np.asarray(v, dtype=float) for v in t_map(cx, cy))
    defect = max(np.max(np.abs(tx - cx)), np.max(np.abs(ty - cy)))
    if defect > 1e-12:
        raise CornerFixViolation(f"t_map must fix the domain corners (defect {defect:.3e})")
    X, Y = _grid(domain, res)
    TX, TY = (np.broadcast_to(np.asarray(v, dtype=float), X.shape) for v in t_map(X, Y))
    slack = 1e-12 * max(x1 - x0, y1 - y0)
    if (TX.min() < x0 - slack or TX.max() > x1 + slack or TY.min() < y0 - slack or TY.max() > y1 + slack):
        raise CornerFixViolation("t_map leaves the domain")
    if max(np.max(np.abs(TX - X)), np.max(np.abs(TY - Y))) <= 1e-12:
        raise IdentityMap("t_map is the identity on the grid")

    def transform(f):
        def lf(x, y):
            u, v = t_map(x, y)
            shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
            u = np.clip(np.broadcast_to(u, shape), x0, x1)
            v = np.clip(np.broadcast_to(v, shape), y0, y1)
            return f(u, v)
        return lf

    return PerturbOperator("composition", {"t_map": t_map}, domain, transform, norm=1.0,
                           id_minus_norm=2.0, id_minus_exact=False,
                           id_minus_lower=sampled_id_minus_lower(transform, domain))


def bernstein_basis(degree: int, s) -> np.ndarray:
    """``p_{k,degree}(s)`` for ``k = 0..degree`` stacked on a trailing axis."""
    s = np.asarray(s, dtype=float)[..., None]
    k = np.arange(degree + 1)
    coeff = np.array([comb(degree, int(i)) for i in k], dtype=float)
    return coeff * s ** k * (1.0 - s) ** (degree - k)


def bernstein_operator(m: int, n: int, domain=UNIT_SQUARE) -> PerturbOperator:
    """Tensor Bernstein operator of degree ``m`` in ``x`` and ``n`` in ``y``.

    The domain is mapped affinely onto the unit square; ``||L|| = 1`` since the
    operator is positive and reproduces constants.
    """
    if m < 1 or n < 1:
        raise DegreeTooSmall("Bernstein degrees must be at least 1")
    (x0, x1), (y0, y1) = domain
    nodes_x = x0 + (x1 - x0) * np.arange(m + 1) / m
    nodes_y = y0 + (y1 - y0) * np.arange(n + 1) / n
    NX, NY = np.meshgrid(nodes_x, nodes_y, indexing="ij")

    def transform(f):
        coeffs = np.broadcast_to(np.asarray(f(NX, NY), dtype=float), NX.shape)

        def lf(x, y):
            x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
            px = bernstein_basis(m, np.clip((x - x0) / (x1 - x0), 0.0, 1.0))
            py = bernstein_basis(n, np.clip((y - y0) / (y1 - y0), 0.0, 1.0))
            return np.einsum("...i,ik,...k->...", px, coeffs, py)
        return lf

    return PerturbOperator("bernstein", {"m": m, "n": n}, domain, transform, norm=1.0,
                           id_minus_norm=2.0, id_minus_exact=False,
                           id_minus_lower=sampled_id_minus_lower(transform, domain))
