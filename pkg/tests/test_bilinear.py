import numpy as np
import pytest
from hypothesis import given, strategies as st

from fractalsurf import (BilinearData, HypothesisUnmet, ShapeMismatch, UnbalancedScaling, build_bilinear_fis,
                         build_net, co_bilinear_check, corner_bilinear, gamma_constant, piecewise_bilinear,
                         steadiness_check, theoretical_box_dimension, uniform_net, verify_conformance)
from fractalsurf.ifs import orbit_evaluate

NET4 = uniform_net(4)
X4, Y4 = NET4.knot_grid()
WAVY = np.cos(2 * np.pi * X4) * np.cos(2 * np.pi * Y4)


def data(z, s=0.5):
    return BilinearData(z, s)


def test_corner_bilinear_formula():
    z = np.zeros((3, 3))
    z[2, 0], z[0, 2], z[2, 2] = 1, 1, 2
    g = corner_bilinear(data(z), uniform_net(2))
    x, y = np.meshgrid(np.linspace(0, 1, 7), np.linspace(0, 1, 7))
    np.testing.assert_allclose(g(x, y), x + y, atol=1e-15)
    assert g(0.0, 0.0) == z[0, 0]


def test_corner_bilinear_zero():
    g = corner_bilinear(data(np.zeros((3, 3))), uniform_net(2))
    assert g(0.3, 0.8) == 0


def test_piecewise_bilinear():
    net = build_net([0, 0.2, 1], [0, 0.7, 0.9, 1])
    vals = np.random.default_rng(0).normal(size=(3, 4))
    h = piecewise_bilinear(vals, net)
    KX, KY = net.knot_grid()
    np.testing.assert_allclose(h(KX, KY), vals, atol=1e-14)
    cx, cy = 0.5 * (net.xs[0] + net.xs[1]), 0.5 * (net.ys[1] + net.ys[2])
    assert h(cx, cy) == pytest.approx(vals[0:2, 1:3].mean(), abs=1e-14)
    with pytest.raises(ShapeMismatch):
        piecewise_bilinear(vals.T, net)


def test_piecewise_bilinear_of_plane_is_corner_bilinear():
    z = X4 + Y4
    h = piecewise_bilinear(z, NET4)
    g = corner_bilinear(data(z), NET4)
    x, y = np.random.default_rng(1).uniform(size=(2, 100))
    np.testing.assert_allclose(h(x, y), g(x, y), atol=1e-14)


def test_zero_scaling_collapses_to_h():
    s = build_bilinear_fis(data(WAVY, 0.0), NET4, grid_res=129)
    fld = s.field()
    X, Y = fld.mesh_grid()
    h = piecewise_bilinear(WAVY, NET4)
    assert np.max(np.abs(fld.values - h(X, Y))) <= s.tol


def test_attractor_interpolates_data():
    z = np.random.default_rng(2).normal(size=(5, 5))
    s = build_bilinear_fis(data(z, 0.6), NET4)
    np.testing.assert_allclose(s.field()(X4, Y4), z, atol=s.tol)
    orb = orbit_evaluate(s.family, 0)
    np.testing.assert_array_equal(np.sort(orb.z), np.sort(z.ravel()))
    assert verify_conformance(s.family).passed


def test_nonsquare_construction():
    net = build_net([0, 0.3, 0.5, 1], [0, 0.5, 1])
    s = build_bilinear_fis(BilinearData(np.arange(12.0).reshape(4, 3) % 5, -0.3), net)
    assert verify_conformance(s.family).passed
    with pytest.raises(HypothesisUnmet):
        theoretical_box_dimension(BilinearData(np.arange(12.0).reshape(4, 3) % 5, -0.3), net)


def test_scaling_outside_unit_interval_rejected():
    with pytest.raises(ValueError):
        BilinearData(WAVY, 1.0)


def test_steadiness():
    assert steadiness_check(data(WAVY, 0.5))
    assert steadiness_check(data(WAVY, -0.4))
    s = np.full((3, 3), 0.1)
    s[0, 0], s[1, 0], s[0, 1], s[1, 1] = 0.2, -0.2, 0.1, 0.3
    assert not steadiness_check(BilinearData(np.zeros((3, 3)), s))


def test_gamma_constant():
    assert gamma_constant(data(WAVY, 0.5), NET4) == pytest.approx(8.0, abs=1e-12)
    assert gamma_constant(data(WAVY, 0.0), NET4) == 0.0
    s = np.full((5, 5), 0.5)
    s[0, 0] = 0.1
    with pytest.raises(UnbalancedScaling):
        gamma_constant(data(WAVY, s), NET4)


def test_co_bilinear():
    assert co_bilinear_check(data(X4 + Y4), NET4)
    assert co_bilinear_check(data(np.zeros((5, 5))), NET4)
    bumped = X4 + Y4
    bumped[2, 2] += 0.1
    assert not co_bilinear_check(data(bumped), NET4)


def test_dimension_formula():
    v = theoretical_box_dimension(data(WAVY, 0.5), NET4)
    assert v.gamma == pytest.approx(8.0) and v.predicted == pytest.approx(1 + np.log(8) / np.log(4))
    assert v.predicted == pytest.approx(2.5, abs=1e-12)
    assert theoretical_box_dimension(data(WAVY, 0.2), NET4).predicted == 2.0
    assert theoretical_box_dimension(data(X4 * Y4, 0.9), NET4).predicted == 2.0


def test_dimension_withheld():
    s = np.full((5, 5), 0.3)
    s[1, 1] = -0.3
    with pytest.raises(HypothesisUnmet):
        theoretical_box_dimension(data(WAVY, s), NET4)
    with pytest.raises(HypothesisUnmet):
        theoretical_box_dimension(data(WAVY, np.where(X4 == 0, 0.1, 0.5)), NET4)


@given(st.floats(-0.95, 0.95), st.integers(2, 6))
def test_gamma_of_constant_lattice(c, N):
    net = uniform_net(N)
    d = BilinearData(np.zeros((N + 1, N + 1)), c)
    assert gamma_constant(d, net) == pytest.approx(N * N * abs(c), abs=1e-12)


@given(st.floats(-3, 3).filter(lambda v: abs(v) > 1e-3))
def test_scaling_data_scales_attractor(lam):
    a = build_bilinear_fis(data(WAVY, 0.5), NET4, grid_res=65).field().values
    b = build_bilinear_fis(data(lam * WAVY, 0.5), NET4, grid_res=65).field().values
    np.testing.assert_allclose(b, lam * a, atol=1e-9 * max(1, abs(lam)))


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_dimension_invariant_under_bilinear_shift(c0, c1, c2, c3):
    shift = c0 + c1 * X4 + c2 * Y4 + c3 * X4 * Y4
    base = theoretical_box_dimension(data(WAVY, 0.5), NET4)
    moved = theoretical_box_dimension(data(WAVY + shift, 0.5), NET4)
    assert moved.predicted == base.predicted
