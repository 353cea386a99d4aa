import numpy as np
import pytest
from hypothesis import given, strategies as st

from fractalsurf import (BadExponent, BilinearData, ResolutionTooCoarse, SampledField, bernstein_operator,
                         box_count_dimension, build_alpha_surface, build_bilinear_fis, convergence_table_alpha,
                         convergence_table_operator, dt_modulus, lp_norm, lp_norm_of, sup_norm, uniform_net,
                         verify_lp_bound)

from conftest import sinsin


def field_of(func, n=129, domain=((0, 1), (0, 1))):
    (x0, x1), (y0, y1) = domain
    return SampledField.from_function(func, np.linspace(x0, x1, n), np.linspace(y0, y1, n))


@pytest.mark.parametrize("p", [1, 2, 3.5])
def test_norms_of_constant(p):
    f = field_of(lambda x, y: -1.7 + 0 * x)
    assert sup_norm(f) == pytest.approx(1.7)
    assert lp_norm(f, p) == pytest.approx(1.7, rel=1e-14)


@pytest.mark.parametrize("p", [1, 2, 7])
def test_unit_function_has_unit_norm(p):
    assert lp_norm(field_of(lambda x, y: 1 + 0 * x), p) == pytest.approx(1.0, rel=1e-14)


def test_constant_on_larger_domain():
    f = field_of(lambda x, y: 2 + 0 * x, 33, ((0, 2), (0, 3)))
    assert lp_norm(f, 2) == pytest.approx(2 * 6 ** 0.5, rel=1e-14)


def test_l2_of_x():
    # integral of x^2 over the unit square is 1/3
    assert lp_norm(field_of(lambda x, y: x, 1025), 2) == pytest.approx(3 ** -0.5, abs=1e-6)
    assert lp_norm_of(lambda x, y: x, ((0, 1), (0, 1)), 1025, 2) == pytest.approx(3 ** -0.5, abs=1e-6)


@pytest.mark.parametrize("p", [0.5, 0, -1, float("nan")])
def test_bad_exponent(p):
    with pytest.raises(BadExponent):
        lp_norm(field_of(lambda x, y: x), p)


def test_quadrature_refinement():
    def g(x, y):
        return np.exp(x) * np.cos(3 * y)

    a = lp_norm_of(g, ((0, 1), (0, 1)), 257, 2)
    b = lp_norm_of(g, ((0, 1), (0, 1)), 513, 2)
    assert abs(a - b) <= 1e-4


def test_lp_bound_zero_alpha(net2, mult_op):
    s = build_alpha_surface(sinsin, mult_op, 0.0, net2)
    r = verify_lp_bound(sinsin, s, 2, res=129)
    assert r.lhs == 0 and r.rhs == 0 and r.passed


@pytest.mark.parametrize("p", [1, 2])
def test_lp_bound_standard(standard, p):
    r = verify_lp_bound(sinsin, standard, p)
    assert r.passed, (r.lhs, r.rhs)


def test_box_count_flat_plane():
    r = box_count_dimension(field_of(lambda x, y: 0 * x, 1025), 3, 9)
    assert r.dimension == pytest.approx(2.0, abs=0.05)
    np.testing.assert_array_equal(r.counts, 4.0 ** np.arange(3, 10))


def test_box_count_smooth_surface():
    r = box_count_dimension(field_of(lambda x, y: 0.3 + 2 * x - y + 1.5 * x * y, 1025), 3, 9)
    assert r.dimension == pytest.approx(2.0, abs=0.1)


def test_box_count_report_invariants():
    X, Y = uniform_net(4).knot_grid()
    z = np.cos(2 * np.pi * X) * np.cos(2 * np.pi * Y)
    fld = build_bilinear_fis(BilinearData(z, 0.5), uniform_net(4), grid_res=513).field()
    r = box_count_dimension(fld, 2, 8)
    assert np.all(np.diff(r.scales) < 0)
    assert np.all(np.diff(r.counts) >= 0)
    assert r.residual >= 0


def test_box_count_bilinear_fis_near_theory():
    X, Y = uniform_net(4).knot_grid()
    z = np.cos(2 * np.pi * X) * np.cos(2 * np.pi * Y)
    fld = build_bilinear_fis(BilinearData(z, 0.5), uniform_net(4), grid_res=1025).field()
    assert box_count_dimension(fld, 3, 9).dimension == pytest.approx(2.5, abs=0.2)


def test_box_count_resolution_guard():
    with pytest.raises(ResolutionTooCoarse):
        box_count_dimension(field_of(lambda x, y: x, 257), 3, 9)


def test_dt_modulus_affine_is_zero():
    assert dt_modulus(lambda x, y: 3 * x - 2 * y + 1, 0.5, 0.5, sampling_res=33) <= 1e-14


@pytest.mark.slow
def test_dt_modulus_of_square():
    # second difference of x^2 is 2 (h phi(x))^2, largest at x = 0, h = delta
    d = 0.3
    assert dt_modulus(lambda x, y: x ** 2, d, d, sampling_res=128) == pytest.approx(2 * d * d, rel=0.02)


def test_dt_modulus_outside_points_count_zero():
    # with delta = 1 some offsets leave the square (x + phi(x) > 1 near x = 0.7);
    # a huge value planted outside must not leak into the modulus
    def f(x, y):
        return np.where((np.abs(x) > 1) | (np.abs(y) > 1), 1e6, x ** 2)

    value = dt_modulus(f, 1.0, 1.0, sampling_res=41, h_res=16)
    assert value <= 2.0 + 1e-12


@given(st.floats(0.05, 0.5), st.floats(1.0, 2.0))
def test_dt_modulus_monotone_for_nested_steps(d, factor):
    # with a common step lattice the sup runs over nested sets
    def f(x, y):
        return np.sin(2 * x) * np.cos(3 * y)

    small = dt_modulus(f, d, d, sampling_res=21, h_res=12)
    large = dt_modulus(f, min(1.0, d * factor), d, sampling_res=21, h_res=12)
    assert large >= small * (1 - 0.05)


def test_convergence_in_alpha(net2, mult_op):
    alphas = [0.5 / n for n in range(1, 9)]
    t = convergence_table_alpha(sinsin, mult_op, net2, alphas, grid_res=129)
    assert t.passed
    assert np.all(np.diff(t.bounds) < 0)


def test_convergence_zero_alpha_entry(net2, mult_op):
    t = convergence_table_alpha(sinsin, mult_op, net2, [0.0, 0.2], grid_res=65)
    assert t.errors[0] == 0.0


def test_convergence_in_operator(net2):
    ops = [bernstein_operator(n, n) for n in (2, 4, 8, 16)]
    t = convergence_table_operator(sinsin, 0.3, net2, ops, grid_res=129)
    assert t.passed
    assert np.all(np.diff(t.bounds) < 0)
