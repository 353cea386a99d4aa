"""The alpha-fractal perturbation ``f -> f^alpha`` of a bivariate function.

Given a seed ``f``, a perturbation operator ``L`` and a scale function
``alpha``, the vertical maps are

    F_ij(x, y, z) = alpha(u_i(x), v_j(y)) * (z - (Lf)(x, y)) + f(u_i(x), v_j(y))

and ``f^alpha`` is the fixed point of the resulting Read-Bajraktarevic
operator.  It interpolates ``f`` at every knot and satisfies

    f^alpha(x, y) = f(x, y) + alpha(x, y) * (f^alpha - Lf)(u_i^{-1}(x), v_j^{-1}(y)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import MaxTermsExceeded, PreconditionViolated
from .field import SampledField
from .ifs import FractalSurface, VerticalMapFamily, fixed_point_solve
from .net import Net, build_affine_maps
from .operators import PerturbOperator, ScaleFunction, scale_function

DEFAULT_RES = 257
DEFAULT_TOL = 1e-10


def alpha_family(f: Callable, operator: PerturbOperator, alpha: ScaleFunction, net: Net,
                 orientation: str = "alternating") -> VerticalMapFamily:
    xmaps = build_affine_maps(net, "x", orientation)
    ymaps = build_affine_maps(net, "y", orientation)
    lf = operator.apply(f)

    def evaluator(i, j, x, y, z):
        X = xmaps.forward(i, x)
        Y = ymaps.forward(j, y)
        a = alpha(X, Y)
        return a * (z - lf(x, y)) + f(X, Y)

    KX, KY = net.knot_grid()
    knots = np.broadcast_to(np.asarray(f(KX, KY), dtype=float), KX.shape)
    return VerticalMapFamily(evaluator, alpha.sup_norm, net, xmaps, ymaps, knots,
                             initial=f, affine_in_z=True, label="alpha")


@dataclass(kw_only=True, eq=False)
class AlphaSurface(FractalSurface):
    """An evaluable alpha-fractal surface ``f^alpha_{net, L}``."""

    f: Callable
    operator: PerturbOperator
    alpha: ScaleFunction


def build_alpha_surface(f: Callable, operator: PerturbOperator, alpha, net: Net,
                        grid_res: int = DEFAULT_RES, tol: float = DEFAULT_TOL,
                        max_iter: Optional[int] = None, engine: str = "grid",
                        orientation: str = "alternating") -> AlphaSurface:
    """Assemble the alpha-fractal IFS for ``f`` and wrap it as a surface.

    ``alpha`` may be a :class:`ScaleFunction`, a constant or a callable.
    """
    if not np.allclose(np.asarray(operator.domain, dtype=float), np.asarray(net.domain, dtype=float),
                       rtol=0, atol=1e-12):
        raise ValueError(f"operator domain {operator.domain} differs from net domain {net.domain}")
    alpha = scale_function(alpha, net.domain)
    family = alpha_family(f, operator, alpha, net, orientation)
    if engine not in ("grid", "trace"):
        raise ValueError("engine must be 'grid' or 'trace'")
    return AlphaSurface(family=family, grid_res=grid_res, tol=tol, max_iter=max_iter, engine=engine,
                        f=f, operator=operator, alpha=alpha)


def _grid_request(request) -> bool:
    if isinstance(request, (int, np.integer)):
        return True
    return (isinstance(request, tuple) and len(request) == 2
            and all(isinstance(v, (int, np.integer)) for v in request))


def evaluate(surface: AlphaSurface, request, engine: Optional[str] = None):
    """Evaluate a surface on a grid (``int`` or ``(nx, ny)``) or at points.

    Point requests are an ``(n, 2)`` array-like of coordinates; the result is
    an array of ``n`` values.  Grid requests return a :class:`SampledField`.
    """
    if _grid_request(request):
        return surface.field(request)
    pts = np.atleast_2d(np.asarray(request, dtype=float))
    return evaluate_points(surface, pts[:, 0], pts[:, 1], engine)


def evaluate_points(surface: AlphaSurface, x, y, engine: Optional[str] = None):
    return surface(x, y, engine)


def _working_grid(surface: AlphaSurface, grid_res=None):
    res = surface.grid_res if grid_res is None else grid_res
    nx, ny = (res, res) if isinstance(res, (int, np.integer)) else res
    xs, ys = surface.net.grid_axes(nx, ny)
    return np.meshgrid(xs, ys)


def defect_norm(surface: AlphaSurface, grid_res=None) -> float:
    """``||f - Lf||_inf`` estimated on the working grid."""
    X, Y = _working_grid(surface, grid_res)
    lf = surface.operator.apply(surface.f)
    return float(np.max(np.abs(surface.f(X, Y) - lf(X, Y))))


def perturbation_bound(surface: AlphaSurface, grid_res=None) -> float:
    """``||alpha|| / (1 - ||alpha||) * ||f - Lf||`` with grid norm estimates."""
    a = surface.alpha.sup_norm
    return a / (1.0 - a) * defect_norm(surface, grid_res)


@dataclass
class NormBounds:
    """Operator-norm consequences of ``||alpha||``, ``||L||`` and ``||Id - L||``.

    Entries that do not apply are ``None`` and the reason is kept in
    ``absent``.
    """

    alpha_norm: float
    operator_norm: float
    id_minus_norm: float
    id_minus_exact: bool
    fractal_norm_upper: float
    invertibility_threshold: float
    invertible: bool
    inverse_norm_upper: Optional[float]
    bounded_below_constant: Optional[float]
    absent: dict


def operator_norm_bounds(operator: PerturbOperator, alpha) -> NormBounds:
    alpha = scale_function(alpha, operator.domain)
    a = alpha.sup_norm
    lnorm = operator.norm
    d = operator.id_minus_norm
    threshold = 1.0 / (1.0 + d)
    absent = {}
    inverse = below = None
    if a * lnorm < 1.0:
        inverse = (1.0 + a) / (1.0 - a * lnorm)
        below = (1.0 - a * lnorm) / (1.0 + a)
    else:
        absent["inverse_norm_upper"] = absent["bounded_below_constant"] = (
            f"requires ||alpha|| < 1/||L|| = {1.0 / lnorm:.6g}")
    return NormBounds(a, lnorm, d, operator.id_minus_exact, 1.0 + a * d / (1.0 - a), threshold,
                      a < threshold, inverse, below, absent)


@dataclass
class NeumannResult:
    estimate: SampledField
    terms: int
    residual: float


def apply_inverse_neumann(g: Callable, operator: PerturbOperator, alpha, net: Net, tol: float = 1e-8,
                          grid_res: int = DEFAULT_RES, max_terms: int = 200) -> NeumannResult:
    """Approximate ``(F^alpha)^{-1} g`` by the Neumann series of ``Id - F^alpha``.

    Terms are grid functions read through their bilinear interpolant, so the
    series acts on genuine continuous functions and the sup-norm over the
    grid of each term equals its sup-norm.  Summation stops once a term is
    below ``tol * (1 - q) / 2`` with ``q = ||alpha|| ||Id - L|| / (1 - ||alpha||)``;
    the residual ``||F^alpha(estimate) - g||`` is then recomputed on the grid.

    Raises
    ------
    PreconditionViolated
        If ``||alpha|| (1 + ||Id - L||) >= 1``.
    MaxTermsExceeded
        If the terms do not decay below the stopping threshold in time.
    """
    alpha = scale_function(alpha, net.domain)
    a = alpha.sup_norm
    d = operator.id_minus_norm
    if a * (1.0 + d) >= 1.0:
        raise PreconditionViolated(f"||alpha|| (1 + ||Id - L||) = {a * (1.0 + d):.6g} must be below 1")
    q = a * d / (1.0 - a)
    stop = tol * (1.0 - q) / 2.0
    xs, ys = net.grid_axes(grid_res)
    term = SampledField.from_function(g, xs, ys)
    target = term
    expected_terms = 1 if q == 0 else max(1, math.ceil(math.log(stop / max(term.sup(), stop)) / math.log(q)) + 1)
    # each term's fixed-point error accumulates into the sum, so share the budget across terms
    solve_tol = tol * (1.0 - a) / (4.0 * expected_terms)

    def image(h: SampledField) -> SampledField:
        fam = alpha_family(h, operator, alpha, net)
        return fixed_point_solve(fam, (len(xs), len(ys)), solve_tol).field

    total = term.values.copy()
    terms = 1
    while term.sup() >= stop:
        if terms >= max_terms:
            raise MaxTermsExceeded(f"Neumann series not converged after {terms} terms",
                                   estimate=term.with_values(total), terms=terms, residual=term.sup())
        term = term - image(term)
        total += term.values
        terms += 1
    estimate = term.with_values(total)
    residual = (image(estimate) - target).sup()
    return NeumannResult(estimate, terms, residual)
