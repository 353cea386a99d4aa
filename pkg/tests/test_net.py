import numpy as np
import pytest
from hypothesis import given, strategies as st

from fractalsurf import (NonIncreasingKnots, OutOfDomain, TooFewIntervals, build_affine_maps, build_net,
                         locate_cell, tau, uniform_net)


def test_minimal_net():
    net = build_net([0, 0.5, 1], [0, 0.5, 1])
    assert (net.N, net.M) == (2, 2)


@pytest.mark.parametrize("xs, ys, err", [
    ([0, 0, 1], [0, 1, 2], NonIncreasingKnots),
    ([0, 1], [0, 0.5, 1], TooFewIntervals),
    ([0, 0.5, 1], [0, 1], TooFewIntervals),
    ([0, 2, 1], [0, 0.5, 1], NonIncreasingKnots),
])
def test_bad_nets(xs, ys, err):
    with pytest.raises(err):
        build_net(xs, ys)


def test_uniform_maps_coefficients():
    maps = build_affine_maps(uniform_net(2), "x")
    np.testing.assert_allclose(maps.a, [0.5, -0.5])
    np.testing.assert_allclose(maps.b, [0.0, 1.0])


def test_nonuniform_maps_solve_endpoint_system():
    maps = build_affine_maps(build_net([0, 0.25, 1], [0, 0.5, 1]), "x")
    # u_2(0) = x_2 = 1 and u_2(1) = x_1 = 0.25
    np.testing.assert_allclose([maps.a[0], maps.b[0]], [0.25, 0.0])
    np.testing.assert_allclose([maps.a[1], maps.b[1]], [-0.75, 1.0])


@pytest.mark.parametrize("i, boundary, expected", [(1, 0, 0), (1, "N", 1), (2, 0, 2), (2, "N", 1), (3, 0, 2),
                                                   (4, "N", 3)])
def test_tau(i, boundary, expected):
    assert tau(i, boundary) == expected


@pytest.mark.parametrize("point, cell", [((0.3, 0.7), (1, 2)), ((0.5, 0.5), (2, 2)), ((1.0, 1.0), (2, 2)),
                                         ((0.0, 0.0), (1, 1))])
def test_locate_cell(point, cell):
    assert locate_cell(uniform_net(2), point) == cell


def test_locate_cell_out_of_domain():
    with pytest.raises(OutOfDomain):
        locate_cell(uniform_net(2), (1.5, 0.5))


knots = st.lists(st.floats(0.01, 1.0), min_size=2, max_size=6).map(lambda d: np.concatenate([[0.0], np.cumsum(d)]))


@given(knots, knots)
def test_endpoint_orientation(xs, ys):
    net = build_net(xs, ys)
    for axis, kn in (("x", net.xs), ("y", net.ys)):
        maps = build_affine_maps(net, axis)
        n = len(kn) - 1
        for i in range(1, n + 1):
            lo, hi = maps.forward(i, kn[0]), maps.forward(i, kn[-1])
            want = (kn[i - 1], kn[i]) if i % 2 else (kn[i], kn[i - 1])
            assert abs(lo - want[0]) <= 1e-12 * (1 + abs(kn[-1]))
            assert abs(hi - want[1]) <= 1e-12 * (1 + abs(kn[-1]))
        assert np.max(maps.contraction) < 1
        np.testing.assert_allclose(np.max(maps.contraction), np.max(np.diff(kn)) / (kn[-1] - kn[0]))


@given(knots)
def test_interior_preimages_agree(xs):
    net = build_net(xs, xs)
    maps = build_affine_maps(net, "x")
    for i, left, right in maps.interior_preimages():
        assert abs(left - right) <= 1e-12 * (1 + xs[-1])
        assert abs(left - (xs[-1] if i % 2 else xs[0])) <= 1e-12 * (1 + xs[-1])


@given(knots, st.floats(0, 1), st.floats(0, 1))
def test_locate_cell_contains_point(xs, s, t):
    net = build_net(xs, xs)
    x = xs[0] + s * (xs[-1] - xs[0])
    y = xs[0] + t * (xs[-1] - xs[0])
    i, j = locate_cell(net, (x, y))
    for k, v in ((i, x), (j, y)):
        assert xs[k - 1] <= v
        assert v < xs[k] or (k == len(xs) - 1 and v <= xs[k])


@given(st.integers(1, 30), st.sampled_from([0, "N"]))
def test_tau_lands_in_neighbours(i, b):
    assert tau(i, b) in (i - 1, i)
