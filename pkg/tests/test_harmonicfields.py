import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from staticlevels.fields import SingularPointError
from staticlevels.harmonicfields import (Ball, ConvergenceError, GridField, GridSpec, MultiCenterField,
                                        convergence_order, critical_points, monopole_error, solve_dirichlet,
                                        spherical_excision_spec)
from staticlevels.levelset.extract import extract
from staticlevels.levelset.functionals import w_p
from staticlevels.core import unit_sphere_area


def test_monopole_value_and_gradient():
    f = MultiCenterField.monopole(3, 1.0)
    s = f.evaluate([[2.0, 0.0, 0.0]])
    assert s.u[0] == pytest.approx(0.5, rel=1e-15)
    assert np.linalg.norm(s.grad[0]) == pytest.approx(0.25, rel=1e-15)
    assert np.trace(s.hess[0]) == pytest.approx(0.0, abs=1e-15)


def test_two_center_value(two_center):
    assert two_center.value([[2.0, 0.0, 0.0]])[0] == pytest.approx(1 - 0.5 / 1.5 - 0.5 / 2.5, rel=1e-15)
    assert two_center.value([[2.0, 0.0, 0.0]])[0] == pytest.approx(0.466667, abs=1e-6)


def test_singular_center(two_center):
    with pytest.raises(SingularPointError):
        two_center.evaluate([[0.5, 0.0, 0.0]])


def test_invalid_construction():
    with pytest.raises(ValueError):
        MultiCenterField([[0, 0, 0]], [1.0, 2.0])
    with pytest.raises(ValueError):
        MultiCenterField([[0, 0, 0]], [-1.0])
    with pytest.raises(ValueError):
        MultiCenterField([[0, 0]], [1.0])


coords = st.floats(-3.0, 3.0)


@settings(max_examples=60)
@given(st.integers(3, 6), st.lists(st.floats(0.1, 2.0), min_size=1, max_size=4), st.integers(0, 2**31 - 1))
def test_hessian_is_traceless(n, weights, seed):
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-1, 1, size=(len(weights), n))
    f = MultiCenterField(centers, weights)
    x = rng.uniform(-3, 3, size=(20, n))
    d = np.min(np.linalg.norm(x[:, None] - centers[None], axis=2), axis=1)
    x = x[d > 0.2]
    if len(x) == 0:
        return
    s = f.evaluate(x)
    scale = np.maximum(1.0, np.max(np.abs(s.hess), axis=(1, 2)))
    assert np.all(np.abs(np.trace(s.hess, axis1=1, axis2=2)) / scale < 1e-12)


def test_gradient_matches_finite_difference(two_center):
    x = np.array([[0.3, 1.1, -0.7]])
    s = two_center.evaluate(x)
    h = 1e-6
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        fd = (two_center.value(x + e) - two_center.value(x - e))[0] / (2 * h)
        assert s.grad[0, i] == pytest.approx(fd, abs=1e-8)
        _, gp = two_center.value_and_gradient(x + e)
        _, gm = two_center.value_and_gradient(x - e)
        np.testing.assert_allclose(s.hess[0, i], (gp - gm)[0] / (2 * h), atol=1e-7)


def test_far_field_limit():
    f = MultiCenterField([[0, 0, 0], [1, 0, 0]], [0.3, 0.7])
    r = 1e6
    assert (1 - f.value([[r, 0, 0]])[0]) * r == pytest.approx(1.0, rel=1e-5)


class TestCriticalPoints:
    def test_monopole_has_none(self):
        assert MultiCenterField.monopole(3).critical_points().shape == (0, 3)

    def test_equal_centers_midpoint(self, two_center):
        pts = two_center.critical_points()
        assert pts.shape == (1, 3)
        np.testing.assert_allclose(pts[0], 0.0, atol=1e-10)
        assert two_center.critical_values() == pytest.approx([-1.0])

    def test_unequal_centers_against_axial_root(self):
        f = MultiCenterField([[0, 0, 0], [2, 0, 0]], [1.0, 0.25])

        def axial(x):
            return f.value_and_gradient([[x, 0.0, 0.0]])[1][0, 0]

        x_star = brentq(axial, 0.1, 1.9, xtol=1e-15)
        assert x_star == pytest.approx(4 / 3, abs=1e-12)  # 1/x^2 = 0.25/(2-x)^2
        pts = f.critical_points()
        assert pts.shape == (1, 3)
        assert abs(pts[0, 0] - x_star) < 1e-8
        assert np.all(np.abs(pts[0, 1:]) < 1e-8)

    def test_generic_search_box(self, two_center):
        # asymmetric box: no seed sits on the saddle itself
        for k in (5, 6, 8):
            pts = critical_points(two_center, [-1.9, -1.7, -1.3], [2.1, 1.6, 1.8], seeds_per_axis=k)
            assert len(pts) == 1
            np.testing.assert_allclose(pts[0], 0.0, atol=1e-10)


class TestGridSolver:
    def test_monopole_recovered_second_order(self):
        errors = [monopole_error(solve_dirichlet(spherical_excision_spec(h)), 0.5) for h in (1 / 8, 1 / 16)]
        assert errors[1] < errors[0]
        assert 1.5 < convergence_order((1 / 8, 1 / 16), errors) < 2.5

    def test_constant_data(self):
        spec = GridSpec((-1, -1, -1), (1, 1, 1), 0.125, balls=[], outer_mass=0.0)
        field = solve_dirichlet(spec)
        np.testing.assert_allclose(field.values, 1.0, atol=1e-12)

    def test_two_balls_maximum_principle(self):
        spec = GridSpec((-1.5, -1, -1), (1.5, 1, 1), 0.125,
                        balls=[Ball((-0.6, 0, 0), 0.3), Ball((0.6, 0, 0), 0.3)], outer_mass=0.6)
        field = solve_dirichlet(spec)
        inner = field.values[field.fluid_mask()]
        assert np.all(inner > 0) and np.all(inner < 1)
        assert field.residual < spec.tol

    def test_convergence_error(self):
        spec = spherical_excision_spec(1 / 16)
        spec.max_sweeps = 2
        with pytest.raises(ConvergenceError):
            solve_dirichlet(spec)

    @pytest.mark.parametrize("kwargs", [
        dict(lower=(-1, -1, -1), upper=(1, 1, 1), h=0.3),
        dict(lower=(-1, -1, -1), upper=(1, 1, 1), h=0.25, balls=[((0.9, 0, 0), 0.5)]),
        dict(lower=(-1, -1, -1), upper=(1, 1, 1), h=-0.25),
        dict(lower=(-1, -1), upper=(1, 1), h=0.25),
    ])
    def test_invalid_spec(self, kwargs):
        with pytest.raises(ValueError):
            solve_dirichlet(GridSpec(**kwargs))

    def test_evaluation_outside_domain(self):
        field = solve_dirichlet(spherical_excision_spec(1 / 8))
        with pytest.raises(SingularPointError):
            field.value([[0.1, 0.0, 0.0]])
        with pytest.raises(SingularPointError):
            field.value([[1.5, 0.0, 0.0]])

    def test_interpolated_derivatives(self):
        field = solve_dirichlet(spherical_excision_spec(1 / 16))
        nodal = monopole_error(field, 0.5)
        x = np.array([[0.71, 0.13, -0.05]])
        s = field.evaluate(x)
        r = np.linalg.norm(x)
        # off-node values carry the nodal discretization error, not more
        assert abs(s.u[0] - (1 - 0.5 / r)) <= 1.1 * nodal
        np.testing.assert_allclose(s.grad[0], 0.5 * x[0] / r**3, atol=2e-3)
        assert abs(np.trace(s.hess[0])) < 5e-2

    def test_binary_and_csv_round_trip(self, tmp_path):
        field = solve_dirichlet(spherical_excision_spec(1 / 8))
        path = tmp_path / "grid.bin"
        field.to_binary(path)
        back = GridField.from_binary(path)
        assert back.values.shape == field.values.shape
        assert np.array_equal(back.values, field.values)
        assert back.h == field.h
        np.testing.assert_array_equal(back.lower, field.lower)
        raw = path.read_bytes()
        assert raw[:4] == b"SLGF"
        assert len(raw) == 4 + 8 + 3 * 8 + 8 + 3 * 8 + 8 * field.values.size
        csv_path = tmp_path / "grid.csv"
        field.to_csv(csv_path)
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "x,y,z,u"
        assert len(lines) == field.values.size + 1
        x, y, z, u = map(float, lines[1].split(","))
        assert (x, y, z) == (-1.0, -1.0, -1.0) and u == field.values[0, 0, 0]

    def test_from_binary_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOPE" + bytes(32))
        with pytest.raises(ValueError):
            GridField.from_binary(path)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_flux_invariance(n):
    rng = np.random.default_rng(n)
    centers = rng.uniform(-0.3, 0.3, size=(3, n))
    weights = [0.2, 0.5, 0.3]
    f = MultiCenterField(centers, weights)
    exact = (n - 2) * sum(weights) * unit_sphere_area(n)
    res = 64 if n == 3 else 16
    for t in (0.2, 0.6):
        flux = w_p(extract(f, t, backend="radial", resolution=res), 1.0)
        assert flux == pytest.approx(exact, rel=1e-6)
