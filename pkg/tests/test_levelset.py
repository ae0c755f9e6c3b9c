import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from staticlevels.core import StaticConfig, unit_sphere_area
from staticlevels.harmonicfields import MultiCenterField, solve_dirichlet, spherical_excision_spec
from staticlevels.levelset import (EmptyLevelSetError, extract, linear_grid, point_geometry, sphere_rule, sweep,
                                   tanh_grid, u_p, up_derivative_formula, w_p)
from staticlevels.levelset.functionals import phi_p, w_p_derivative
from staticlevels.levelset.geometry import kato_gap
from staticlevels.levelset.table import TIE_BREAK, FunctionalTable, format_value
from staticlevels.schwarzschild import SchwarzschildModel

from oracles.axisymmetric import frozen_values

# frozen from tests/oracles/axisymmetric.py
TWO_CENTER_AREA_T05 = 50.2642760471766


@pytest.fixture(scope="module")
def two_center_tri(two_center):
    return extract(two_center, 0.5, backend="triangulation")


@pytest.fixture(scope="module")
def monopole():
    return MultiCenterField.monopole(3, 1.0)


class TestQuadrature:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_total_weight(self, n):
        _, w = sphere_rule(n)
        assert w.sum() == pytest.approx(unit_sphere_area(n), rel=1e-13)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_even_moments(self, n):
        dirs, w = sphere_rule(n, 10)
        area = unit_sphere_area(n)
        assert np.dot(w, dirs[:, 0] ** 2) == pytest.approx(area / n, rel=1e-13)
        # int x_1^4 = 3 |S| / (n (n + 2))
        assert np.dot(w, dirs[:, -1] ** 4) == pytest.approx(3 * area / (n * (n + 2)), rel=1e-13)
        assert np.dot(w, dirs[:, 0] ** 2 * dirs[:, 1] ** 2) == pytest.approx(area / (n * (n + 2)), rel=1e-13)
        assert abs(np.dot(w, dirs[:, 0] ** 3 * dirs[:, 1])) < 1e-14

    def test_unit_directions(self):
        dirs, _ = sphere_rule(5, 6)
        np.testing.assert_allclose(np.linalg.norm(dirs, axis=1), 1.0, atol=1e-14)

    def test_rejects(self):
        with pytest.raises(ValueError):
            sphere_rule(1)
        with pytest.raises(ValueError):
            sphere_rule(3, 1)


class TestExtract:
    def test_schwarzschild_level(self, schwarzschild3):
        s = extract(schwarzschild3.field(), 0.6)
        assert np.max(np.abs(s.mean_curvature - 0.384)) < 1e-10
        assert s.area == pytest.approx(4 * math.pi * 3.125**2, rel=1e-12)
        assert s.backend == "radial" and s.static

    def test_schwarzschild_triangulation(self, schwarzschild3):
        s = extract(schwarzschild3.field(), 0.6, backend="triangulation", resolution=64)
        assert np.max(np.abs(s.mean_curvature - 0.384)) < 1e-8
        assert s.area == pytest.approx(4 * math.pi * 3.125**2, rel=1e-5)

    def test_monopole_sphere(self, monopole):
        s = extract(monopole, 0.5)
        np.testing.assert_allclose(np.linalg.norm(s.points, axis=1), 2.0, rtol=1e-13)
        np.testing.assert_allclose(s.mean_curvature, 1.0, rtol=1e-12)
        tri = extract(monopole, 0.5, backend="triangulation", resolution=64)
        np.testing.assert_allclose(tri.mean_curvature, 1.0, rtol=1e-6)
        assert tri.area == pytest.approx(16 * math.pi, rel=1e-5)

    def test_area_against_oracle(self, two_center, two_center_tri):
        assert frozen_values()["equal_t05_area"] == pytest.approx(TWO_CENTER_AREA_T05, rel=1e-12)
        assert extract(two_center, 0.5, backend="radial").area == pytest.approx(TWO_CENTER_AREA_T05, rel=1e-9)
        assert two_center_tri.area == pytest.approx(TWO_CENTER_AREA_T05, rel=1e-6)

    def test_unit_normals_and_positive_weights(self, two_center_tri):
        np.testing.assert_allclose(np.linalg.norm(two_center_tri.normals, axis=1), 1.0, atol=1e-12)
        assert np.all(two_center_tri.weights > 0)
        assert np.max(np.abs(two_center_tri.u - 0.5)) < 1e-8

    def test_gauss_equation_flat(self, two_center_tri):
        s = two_center_tri
        np.testing.assert_allclose(s.scalar_curvature, s.mean_curvature**2 - s.h_norm2, atol=1e-10)

    def test_mean_curvature_forms_agree(self, two_center, two_center_tri):
        x = two_center_tri.points
        sample = two_center.evaluate(x)
        g = np.linalg.norm(sample.grad, axis=1)
        harmonic_form = -np.einsum("ni,nij,nj->n", sample.grad, sample.hess, sample.grad) / g**3
        np.testing.assert_allclose(two_center_tri.mean_curvature, harmonic_form, atol=1e-10)

    def test_components_across_saddle(self, two_center):
        # the saddle of the equal two-center field sits at u = -1
        assert extract(two_center, -0.9, backend="triangulation").n_components == 1
        assert extract(two_center, -1.1, backend="triangulation").n_components == 2

    def test_excluded_area_at_saddle(self, two_center):
        at = extract(two_center, -1 + TIE_BREAK, backend="triangulation")
        assert at.excluded_area > 0
        assert not at.degenerate
        assert extract(two_center, -0.9, backend="triangulation").excluded_area == 0.0

    def test_empty_level(self):
        grid = solve_dirichlet(spherical_excision_spec(1 / 8))
        with pytest.raises(EmptyLevelSetError):
            extract(grid, 0.99)
        with pytest.raises(EmptyLevelSetError):
            extract(grid, -0.5)

    def test_rejects_bad_arguments(self, monopole):
        with pytest.raises(ValueError):
            extract(monopole, 0.5, resolution=0)
        with pytest.raises(ValueError):
            extract(monopole, 0.5, backend="voxels")


class TestFunctionals:
    @pytest.mark.parametrize("t", [0.0, 0.3, 0.6, 0.9])
    def test_schwarzschild_u3(self, schwarzschild3, t):
        assert u_p(schwarzschild3.field(), schwarzschild3.config, t, 3) == pytest.approx(4 * math.pi, rel=1e-6)

    @pytest.mark.parametrize("t", [0.0, 0.5, 0.95])
    def test_renormalized_area(self, schwarzschild3, t):
        assert u_p(schwarzschild3.field(), schwarzschild3.config, t, 0) == pytest.approx(4 * math.pi, rel=1e-12)

    @pytest.mark.parametrize("t", [-0.5, 0.1, 0.5, 0.9])
    def test_monopole_u1(self, monopole, t):
        assert u_p(monopole, StaticConfig(3, 1.0), t, 1) == pytest.approx(4 * math.pi, rel=1e-12)

    def test_raw_derivative_monopole(self, monopole):
        # W_3(t) = 4 pi (1 - t)^{2 p - 2} for u = 1 - 1/r; derivative -8 pi (1 - t)^3 = -2 pi at t = 1/2
        s = extract(monopole, 0.5)
        assert w_p_derivative(s, 3) == pytest.approx(-2 * math.pi, rel=1e-12)
        for p in (2.0, 3.0, 4.5):
            assert w_p_derivative(s, p) == pytest.approx(-8 * math.pi * (p - 1) * 2.0 ** (3 - 2 * p), rel=1e-12)

    def test_derivative_zero_on_schwarzschild(self):
        for n in (3, 4, 5):
            model = SchwarzschildModel.create(n, 1.5)
            for t in (0.0, 0.4, 0.8):
                d = up_derivative_formula(model.field(), model.config, t, 3)
                assert abs(d) < 1e-8 * model.up_exact(t, 3)

    def test_derivative_rejects_small_p(self, monopole):
        with pytest.raises(ValueError):
            up_derivative_formula(monopole, StaticConfig(3, 1.0), 0.5, 0.5)

    def test_phi_p_on_schwarzschild(self, schwarzschild3):
        assert phi_p(schwarzschild3.field(), schwarzschild3.config, 1.0, 3) == pytest.approx(2 * math.pi, rel=1e-10)

    def test_self_convergence(self, two_center):
        cfg = StaticConfig(3, 1.0)
        coarse = extract(two_center, 0.3, backend="radial", resolution=48)
        fine = extract(two_center, 0.3, backend="radial", resolution=96)
        for p in (1.0, 3.0):
            a, b = u_p(two_center, cfg, 0.3, p, surface=coarse), u_p(two_center, cfg, 0.3, p, surface=fine)
            assert abs(a - b) < 1e-8 * abs(b)

    def test_kato_on_samples(self, two_center_tri):
        geo = two_center_tri.geometry
        gap = kato_gap(geo, 3) / np.maximum(geo.hessian_norm2, 1.0)
        assert gap.min() >= -1e-10

    def test_bounded_integrand_near_saddle(self, two_center):
        peaks = {}
        for t in (-0.9, -0.99, -0.999, -0.9999):
            for res in (64, 128):
                s = extract(two_center, t, backend="triangulation", resolution=res)
                peaks[t, res] = float(np.max(s.grad_norm**2 * np.abs(s.mean_curvature)))
        values = np.array(list(peaks.values()))
        assert values.max() < 1.1 * peaks[-0.9999, 128]
        for t in (-0.9, -0.99, -0.999, -0.9999):
            assert peaks[t, 64] == pytest.approx(peaks[t, 128], rel=1e-3)


class TestSweep:
    def test_schwarzschild_constant(self, schwarzschild3):
        table = sweep(schwarzschild3.field(), schwarzschild3.config, linear_grid(0.05, 0.95, 7), [1, 3])
        for col in ("U_1", "U_3"):
            np.testing.assert_allclose(table.column(col), 4 * math.pi, rtol=1e-10)
        for col in ("dU_1_formula", "dU_3_formula"):
            assert np.max(np.abs(table.column(col))) < 1e-8
        assert np.max(np.abs(table.column("dU_3_fd"))) < 1e-6
        assert table.failed_rows == []

    def test_monopole_flux_constant(self, monopole):
        table = sweep(monopole, StaticConfig(3, 1.0), linear_grid(-0.5, 0.9, 5), [1])
        col = table.column("U_1")
        assert np.ptp(col) < 1e-8 * col.mean()

    def test_tie_break_at_saddle(self):
        # weights 0.1 put the saddle at u = 0.6, inside the sweep range
        light = MultiCenterField([[-0.5, 0, 0], [0.5, 0, 0]], [0.1, 0.1])
        (crit,) = light.critical_values()
        assert crit == pytest.approx(0.6, abs=1e-12)
        table = sweep(light, StaticConfig(3, 0.2), [0.5, crit], [3],
                      extract_kw={"backend": "triangulation", "resolution": 64})
        assert table.rows[0]["t_shift"] == 0.0 and table.rows[0]["excluded_area"] == 0.0
        last = table.rows[1]
        assert last["t_shift"] == TIE_BREAK and last["t"] == crit + TIE_BREAK
        assert last["excluded_area"] > 0

    def test_failed_row_does_not_abort(self):
        grid = solve_dirichlet(spherical_excision_spec(1 / 8, half_width=2.0))
        table = sweep(grid, StaticConfig(3, 0.5), [0.6, 0.99], [1])
        assert table.rows[0]["U_1"] == pytest.approx(2 * math.pi, rel=1e-2)
        assert table.rows[0]["status"] == "ok"
        assert table.failed_rows == [1]
        assert math.isnan(table.column("U_1")[1])
        assert table.to_csv().splitlines()[2].split(",")[2] == ""

    def test_rejects_grids(self, monopole):
        with pytest.raises(ValueError):
            sweep(monopole, StaticConfig(3, 1.0), [0.5, 0.4], [1])
        with pytest.raises(ValueError):
            sweep(monopole, StaticConfig(3, 1.0), [0.5, 1.0], [1])

    def test_csv_and_json(self, schwarzschild3):
        table = sweep(schwarzschild3.field(), schwarzschild3.config, [0.2, 0.4], [1, 3])
        text = table.to_csv()
        header = text.splitlines()[0].split(",")
        assert header[:4] == ["t", "s", "U_1", "U_3"]
        assert {"dU_3_formula", "dU_3_fd", "excluded_area"} <= set(header)
        assert "\r" not in text and text.endswith("\n")
        doc = json.loads(table.to_json())
        assert doc["columns"] == header
        assert doc["rows"][1]["t"] == 0.4
        assert float(text.splitlines()[1].split(",")[2]) == table.rows[0]["U_1"]

    def test_format_value(self):
        assert format_value(-0.0) == "0.0"
        assert format_value(math.nan) == ""
        assert format_value(0.1) == "0.1"
        assert format_value(True) == "true"
        assert FunctionalTable([2.5]).columns[2] == "U_2.5"

    @settings(max_examples=30)
    @given(st.floats(-0.9, 0.5), st.floats(0.01, 0.45), st.integers(2, 30))
    def test_tanh_grid_uniform_in_s(self, a, width, count):
        grid = tanh_grid(a, a + width, count)
        s = 2 * np.arctanh(grid)
        np.testing.assert_allclose(np.diff(s), np.diff(s)[0], rtol=1e-9, atol=1e-12)
        assert grid[0] == pytest.approx(a, abs=1e-14) and grid[-1] == pytest.approx(a + width, abs=1e-14)
        assert np.all(np.diff(grid) > 0)


def test_w1_flux_two_center(two_center):
    assert w_p(extract(two_center, 0.5, backend="radial"), 1) == pytest.approx(4 * math.pi, rel=1e-9)
    geo = point_geometry(two_center, np.array([[0.0, 0.0, 2.0]]))
    assert geo.mean_curvature.shape == (1,)
