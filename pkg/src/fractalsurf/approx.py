"""Polynomial and fractal-polynomial approximation on a rectangle.

Polynomials are expanded in monomials of coordinates rescaled to
``[-1, 1]^2`` for conditioning.  Best approximations are computed on a
uniform sample grid, so every ``E`` value is a grid estimate:

* ``norm="L2"`` is plain least squares,
* ``norm="sup"`` runs Lawson's iteratively reweighted least squares and keeps
  the best iterate, which is never worse than least squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .alpha import AlphaSurface, alpha_family, build_alpha_surface
from .errors import ApproximationFailed, DegreeBudgetExceeded, RankDeficient
from .ifs import fixed_point_solve
from .net import Net
from .operators import UNIT_SQUARE, PerturbOperator, bernstein_operator, scale_function
from .parallel import parallel_map

CONVENTIONS = ("total", "tensor")


@dataclass(frozen=True)
class PolySpace:
    """Monomials ``s^i t^j`` in the rescaled coordinates ``(s, t)`` of ``domain``.

    ``convention="total"`` keeps ``i + j <= m + n``; ``"tensor"`` keeps
    ``i <= m, j <= n``.
    """

    m: int
    n: int
    exponents: tuple
    domain: tuple = UNIT_SQUARE
    convention: str = "total"

    def __len__(self):
        return len(self.exponents)

    @property
    def dimension(self) -> int:
        return len(self.exponents)

    def rescale(self, x, y):
        (x0, x1), (y0, y1) = self.domain
        s = 2.0 * (np.asarray(x, dtype=float) - x0) / (x1 - x0) - 1.0
        t = 2.0 * (np.asarray(y, dtype=float) - y0) / (y1 - y0) - 1.0
        return s, t

    def design(self, x, y) -> np.ndarray:
        """Matrix whose columns are the basis monomials at the flattened points."""
        s, t = self.rescale(np.ravel(x), np.ravel(y))
        return np.stack([s ** i * t ** j for i, j in self.exponents], axis=1)

    def monomial(self, k: int) -> "Polynomial2D":
        c = np.zeros(len(self))
        c[k] = 1.0
        return Polynomial2D(self, c)


def poly_basis(m: int, n: int, domain=UNIT_SQUARE, convention: str = "total") -> PolySpace:
    if m < 0 or n < 0:
        raise ValueError("degrees must be nonnegative")
    if convention == "total":
        exps = tuple((i, d - i) for d in range(m + n + 1) for i in range(d, -1, -1))
    elif convention == "tensor":
        exps = tuple((i, j) for i in range(m + 1) for j in range(n + 1))
    else:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    return PolySpace(m, n, exps, tuple(map(tuple, domain)), convention)


@dataclass(frozen=True, eq=False)
class Polynomial2D:
    space: PolySpace
    coefficients: np.ndarray

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        s, t = self.space.rescale(x, y)
        out = np.zeros(x.shape)
        for c, (i, j) in zip(self.coefficients, self.space.exponents):
            if c:
                out = out + c * s ** i * t ** j
        return out


@dataclass
class ApproxResult:
    """Best approximation on a sample grid.

    ``error`` is the grid sup-error, the estimate of ``E_{m,n}`` (or of its
    fractal counterpart).
    """

    coefficients: np.ndarray
    error: float
    grid_res: int
    method: str
    space: PolySpace
    extras: dict = field(default_factory=dict)

    @property
    def polynomial(self) -> Polynomial2D:
        return Polynomial2D(self.space, self.coefficients)


def _sample_grid(domain, grid_res):
    (x0, x1), (y0, y1) = domain
    return np.meshgrid(np.linspace(x0, x1, grid_res), np.linspace(y0, y1, grid_res))


def _check_design(A: np.ndarray):
    npts, k = A.shape
    if npts < 4 * k:
        raise RankDeficient(f"{npts} samples for {k} basis functions; need at least {4 * k}")
    if np.linalg.matrix_rank(A) < k:
        raise RankDeficient("basis functions are linearly dependent on the sample grid")


def lawson_minimax(A: np.ndarray, b: np.ndarray, max_iter: int = 400, rtol: float = 1e-10):
    """Discrete minimax fit by Lawson's reweighting.

    Returns ``(coefficients, sup_error, ls_sup_error, iterations)``.  The first
    iterate is the least-squares fit and the best iterate is returned.
    """
    w = np.full(len(b), 1.0 / len(b))
    best_c = None
    best_err = ls_err = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        sw = np.sqrt(w)
        c = np.linalg.lstsq(A * sw[:, None], b * sw, rcond=None)[0]
        r = np.abs(b - A @ c)
        err = float(r.max())
        if it == 1:
            ls_err = err
        if err < best_err:
            best_c, best_err = c, err
        wr = w * r
        total = wr.sum()
        if total == 0:
            break
        new = wr / total
        if np.max(np.abs(new - w)) <= rtol * np.max(w):
            break
        w = new
    return best_c, best_err, ls_err, it


def _fit(A, b, norm, space, grid_res, method_extra=None):
    _check_design(A)
    if norm == "L2":
        c = np.linalg.lstsq(A, b, rcond=None)[0]
        err = float(np.max(np.abs(b - A @ c)))
        return ApproxResult(c, err, grid_res, "least-squares", space)
    if norm == "sup":
        c, err, ls_err, it = lawson_minimax(A, b)
        return ApproxResult(c, err, grid_res, "minimax-IRLS", space,
                            {"least_squares_error": ls_err, "iterations": it})
    raise ValueError("norm must be 'sup' or 'L2'")


def best_approx(f: Callable, space: PolySpace, grid_res: int = 129, norm: str = "sup") -> ApproxResult:
    """Best approximation of ``f`` from ``space`` on a ``grid_res^2`` grid.

    Raises
    ------
    RankDeficient
        If the grid has fewer than four samples per basis function or the
        basis is dependent on it.
    """
    X, Y = _sample_grid(space.domain, grid_res)
    A = space.design(X, Y)
    b = np.ravel(np.broadcast_to(f(X, Y), X.shape))
    return _fit(A, b, norm, space, grid_res)


def fractal_polynomial(p: Polynomial2D, alpha, operator: PerturbOperator, net: Net, **kwargs) -> AlphaSurface:
    """The fractal polynomial ``p^alpha``."""
    return build_alpha_surface(p, operator, alpha, net, **kwargs)


def fractal_basis_images(space: PolySpace, alpha, operator: PerturbOperator, net: Net, grid_res: int = 129,
                         tol: float = 1e-12, workers: Optional[int] = None):
    """Grid samples of ``F^alpha`` applied to each basis monomial.

    Returns ``(xs, ys, images)`` with ``images[k]`` of shape ``(ny, nx)``.
    """
    alpha = scale_function(alpha, net.domain)
    xs, ys = net.grid_axes(grid_res)

    def image(k):
        fam = alpha_family(space.monomial(k), operator, alpha, net)
        return fixed_point_solve(fam, (len(xs), len(ys)), tol).field.values

    return xs, ys, parallel_map(image, range(len(space)), workers)


def best_fractal_approx(f: Callable, m: int, n: int, alpha, operator: PerturbOperator, net: Net,
                        grid_res: int = 129, norm: str = "sup", convention: str = "total",
                        workers: Optional[int] = None) -> ApproxResult:
    """Best approximation of ``f`` from the fractal polynomials of ``P_{m,n}``.

    By linearity of ``F^alpha`` the span of the basis images is the whole
    fractal space.  For ``norm="sup"`` the estimate is additionally capped by
    ``||f - p_f^alpha||`` where ``p_f`` is the ordinary best approximation on
    the same grid, a particular member of that space.
    """
    space = poly_basis(m, n, net.domain, convention)
    xs, ys, images = fractal_basis_images(space, alpha, operator, net, grid_res, workers=workers)
    X, Y = np.meshgrid(xs, ys)
    b = np.ravel(np.broadcast_to(f(X, Y), X.shape))
    B = np.stack([im.ravel() for im in images], axis=1)
    res = _fit(B, b, norm, space, len(xs))
    if norm == "sup":
        ordinary = _fit(space.design(X, Y), b, "sup", space, len(xs))
        candidate = float(np.max(np.abs(b - B @ ordinary.coefficients)))
        res.extras["ordinary_error"] = ordinary.error
        res.extras["image_of_best_error"] = candidate
        if candidate < res.error:
            res.coefficients, res.error = ordinary.coefficients, candidate
    return res


@dataclass
class EpsilonResult:
    polynomial: Callable
    alpha: float
    surface: AlphaSurface
    achieved_error: float
    polynomial_error: float
    alpha_threshold: float
    degree: int
    stage: str


def _grid_sup(func, X, Y):
    return float(np.max(np.abs(np.broadcast_to(func(X, Y), X.shape))))


def _bernstein_polynomial(f, k, domain):
    """``B_{k,k} f`` as a callable."""
    return bernstein_operator(k, k, domain).apply(f)


def epsilon_fractal_polynomial(f: Callable, eps: float, operator: PerturbOperator, net: Net,
                               max_degree: int = 8, grid_res: int = 129, safety: float = 0.9) -> EpsilonResult:
    """Find a fractal polynomial within ``eps`` of ``f``.

    Stage one climbs total degrees ``1..max_degree`` until the grid minimax
    error is below ``eps / 2`` (falling back to Bernstein polynomials of
    total degree up to ``max_degree``).  Stage two takes the constant scale

        alpha = safety * (eps/2) / (eps/2 + ||Id - L|| ||p||)

    which makes ``||p - p^alpha|| < eps / 2``.

    Raises
    ------
    DegreeBudgetExceeded
        If no polynomial of total degree ``<= max_degree`` is within ``eps / 2``.
    ApproximationFailed
        If the final grid error is not below ``eps`` (never expected).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    xs, ys = net.grid_axes(grid_res)
    X, Y = np.meshgrid(xs, ys)
    fv = np.broadcast_to(f(X, Y), X.shape)
    p = None
    best = math.inf
    for d in range(1, max_degree + 1):
        space = poly_basis((d + 1) // 2, d // 2, net.domain)
        try:
            fit = best_approx(f, space, grid_res)
        except RankDeficient:
            continue
        poly = fit.polynomial
        err = float(np.max(np.abs(fv - poly(X, Y))))
        best = min(best, err)
        if err < eps / 2:
            p, degree, stage, p_err = poly, d, "minimax", err
            break
    if p is None:
        for k in range(1, max_degree // 2 + 1):
            poly = _bernstein_polynomial(f, k, net.domain)
            err = float(np.max(np.abs(fv - poly(X, Y))))
            best = min(best, err)
            if err < eps / 2:
                p, degree, stage, p_err = poly, 2 * k, "bernstein", err
                break
    if p is None:
        raise DegreeBudgetExceeded(f"best polynomial error {best:.3e} up to degree {max_degree} "
                                   f"does not reach eps/2 = {eps / 2:.3e}")
    pnorm = _grid_sup(p, X, Y)
    d_norm = operator.id_minus_norm
    threshold = (eps / 2) / (eps / 2 + d_norm * pnorm)
    alpha = safety * threshold
    surface = build_alpha_surface(p, operator, alpha, net, grid_res=(len(xs), len(ys)), tol=1e-12)
    achieved = float(np.max(np.abs(surface.field().values - fv)))
    if not achieved < eps:
        raise ApproximationFailed(f"achieved error {achieved:.3e} is not below eps = {eps:.3e}")
    return EpsilonResult(p, alpha, surface, achieved, p_err, threshold, degree, stage)


@dataclass
class ChainReport:
    e: float
    e_alpha: float
    f_norm: float
    alpha_norm: float
    id_minus_norm: float
    lhs: float
    rhs: float
    slack: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + self.slack


def chain_bound(e, f_norm, a, d) -> float:
    return (1.0 + a * (d - 1.0)) / (1.0 - a) * e + a * d / (1.0 - a) * f_norm


def verify_approx_chain(f: Callable, m: int, n: int, alpha, operator: PerturbOperator, net: Net,
                        grid_res: int = 129, tol: float = 1e-6, convention: str = "total") -> ChainReport:
    """Check ``E^a <= (1 + ||a||(||Id-L|| - 1))/(1 - ||a||) E + ||a|| ||Id-L|| / (1 - ||a||) ||f||``."""
    alpha = scale_function(alpha, net.domain)
    xs, ys = net.grid_axes(grid_res)
    X, Y = np.meshgrid(xs, ys)
    space = poly_basis(m, n, net.domain, convention)
    e = _fit(space.design(X, Y), np.ravel(np.broadcast_to(f(X, Y), X.shape)), "sup", space, len(xs)).error
    ea = best_fractal_approx(f, m, n, alpha, operator, net, grid_res, convention=convention).error
    fn = _grid_sup(f, X, Y)
    a, d = alpha.sup_norm, operator.id_minus_norm
    return ChainReport(e, ea, fn, a, d, ea, chain_bound(e, fn, a, d), 2 * tol)
