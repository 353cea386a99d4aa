import numpy as np
import pytest
from hypothesis import given, strategies as st

from fractalsurf import (OutOfDomain, PreconditionViolated, SampledField, apply_inverse_neumann, bernstein_operator,
                         build_alpha_surface, composition_operator, evaluate, evaluate_points,
                         multiplication_operator, operator_norm_bounds, perturbation_bound, uniform_net)
from fractalsurf.alpha import alpha_family, defect_norm
from fractalsurf.ifs import fixed_point_solve, orbit_evaluate

from conftest import bump_t, sinsin


def test_zero_alpha_is_identity(net2, mult_op):
    s = build_alpha_surface(sinsin, mult_op, 0.0, net2)
    fld = s.field()
    X, Y = fld.mesh_grid()
    assert np.max(np.abs(fld.values - sinsin(X, Y))) <= 1e-12
    pts = np.random.default_rng(0).uniform(size=(50, 2))
    np.testing.assert_allclose(evaluate(s, pts, engine="trace"), sinsin(pts[:, 0], pts[:, 1]), atol=1e-12)
    assert perturbation_bound(s) == 0.0


@pytest.mark.parametrize("alpha", [0.3, 0.7, lambda x, y: 0.6 * np.sin(3 * x + y)])
def test_fixed_point_of_composition(net2, alpha):
    op = composition_operator(lambda x, y: (x ** 2, y))
    s = build_alpha_surface(lambda x, y: 3.0 + 0 * x, op, alpha, net2)
    assert np.max(np.abs(s.field().values - 3.0)) <= s.tol


def test_interpolates_at_knots(standard, net2):
    KX, KY = net2.knot_grid()
    for engine in ("grid", "trace"):
        np.testing.assert_allclose(evaluate_points(standard, KX, KY, engine), sinsin(KX, KY), atol=standard.tol)


def test_evaluate_grid_and_points(standard):
    fld = evaluate(standard, 65)
    assert isinstance(fld, SampledField) and fld.resolution == (65, 65)
    assert evaluate(standard, (33, 17)).resolution == (33, 17)
    with pytest.raises(OutOfDomain):
        evaluate(standard, [[1.5, 0.5]])


def test_self_referential_equation_at_points(standard):
    # f^a(x, y) = f(x, y) + a * (f^a - Lf)(preimage)
    pts = np.random.default_rng(5).uniform(size=(200, 2))
    x, y = pts.T
    fam = standard.family
    i, j = fam.xmaps.locate(x), fam.ymaps.locate(y)
    px, py = fam.xmaps.inverse(i, x), fam.ymaps.inverse(j, y)
    lf = standard.operator.apply(sinsin)
    lhs = evaluate_points(standard, x, y, "trace")
    rhs = sinsin(x, y) + 0.3 * (evaluate_points(standard, px, py, "trace") - lf(px, py))
    assert np.max(np.abs(lhs - rhs)) <= 2 * standard.tol


def test_perturbation_bound_standard_case(standard):
    fld = standard.field()
    X, Y = fld.mesh_grid()
    assert np.max(np.abs(fld.values - sinsin(X, Y))) <= perturbation_bound(standard)


def test_bounds_increase_with_alpha(net2, mult_op):
    bounds = [perturbation_bound(build_alpha_surface(sinsin, mult_op, a, net2)) for a in (0.1, 0.3, 0.5)]
    assert bounds[0] < bounds[1] < bounds[2]


def test_norm_bound_arithmetic(mult_op):
    nb = operator_norm_bounds(mult_op, 0.3)
    assert nb.fractal_norm_upper == pytest.approx(1 + 0.3 * 0.0625 / 0.7, abs=1e-12)
    assert nb.fractal_norm_upper == pytest.approx(1.02679, abs=1e-5)
    assert nb.invertibility_threshold == pytest.approx(1 / 1.0625, abs=1e-12)
    assert nb.invertibility_threshold == pytest.approx(0.94118, abs=1e-5)
    assert nb.inverse_norm_upper == pytest.approx(1.3 / (1 - 0.3 * 1.0625))
    assert nb.bounded_below_constant == pytest.approx((1 - 0.3 * 1.0625) / 1.3)
    assert operator_norm_bounds(mult_op, 0.0).fractal_norm_upper == 1.0


def test_norm_bounds_flag_absent_entries():
    nb = operator_norm_bounds(multiplication_operator(lambda x, y: 1 + 15 * x * (1 - x) * y * (1 - y)), 0.95)
    assert nb.inverse_norm_upper is None and "inverse_norm_upper" in nb.absent


def test_neumann_round_trip_recovers_f(net2, mult_op):
    # g = F^a(f); the inverse must give back f up to inverse_norm_upper * tol
    f_field = fixed_point_solve(alpha_family(sinsin, mult_op, _scale(0.3), net2), 129).field
    res = apply_inverse_neumann(f_field, mult_op, 0.3, net2, tol=1e-8, grid_res=129)
    assert res.residual <= 1e-8
    X, Y = res.estimate.mesh_grid()
    bound = operator_norm_bounds(mult_op, 0.3).inverse_norm_upper * 1e-8
    assert np.max(np.abs(res.estimate.values - sinsin(X, Y))) <= bound


def _scale(a):
    from fractalsurf import scale_function
    return scale_function(a)


def test_neumann_zero_alpha(net2, mult_op):
    res = apply_inverse_neumann(sinsin, mult_op, 0.0, net2, grid_res=65)
    assert res.terms <= 2
    X, Y = res.estimate.mesh_grid()
    np.testing.assert_allclose(res.estimate.values, sinsin(X, Y), atol=1e-15)


def test_neumann_precondition(net2, mult_op):
    with pytest.raises(PreconditionViolated):
        apply_inverse_neumann(sinsin, mult_op, 0.99, net2)


def test_defect_norm(standard):
    assert defect_norm(standard) == pytest.approx(1 / 16, abs=1e-15)


def test_mesh_refinement_sanity(standard):
    # grid estimates at 257 and 513 agree closely for smooth data
    assert perturbation_bound(standard, 513) == pytest.approx(perturbation_bound(standard, 257), rel=1e-6)


coef = st.floats(-2, 2)


@given(coef, coef, st.integers(0, 1000))
def test_linearity(beta, gamma, seed):
    net = uniform_net(2)
    op = multiplication_operator(bump_t)
    c = np.random.default_rng(seed).normal(size=4)

    def f(x, y):
        return c[0] * np.cos(2 * x + y) + c[1] * x * y

    def g(x, y):
        return c[2] * np.exp(-x * y) + c[3] * y ** 2

    a = 0.45
    res = 65
    fa = build_alpha_surface(f, op, a, net, grid_res=res).field().values
    ga = build_alpha_surface(g, op, a, net, grid_res=res).field().values
    ha = build_alpha_surface(lambda x, y: beta * f(x, y) + gamma * g(x, y), op, a, net, grid_res=res).field().values
    assert np.max(np.abs(ha - (beta * fa + gamma * ga))) <= 2e-10


def test_orbit_engine_matches_for_bernstein(net2):
    s = build_alpha_surface(sinsin, bernstein_operator(4, 4), 0.2, net2)
    orb = orbit_evaluate(s.family, 5)
    np.testing.assert_allclose(s(orb.x, orb.y), orb.z, atol=s.tol)
