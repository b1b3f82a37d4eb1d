"""Resolvent-norm grids and level-curve extraction."""

import numpy as np
import pytest

import bromell as bm
from bromell.errors import GeometryError
from bromell.pseudospectra import SigmaMinEvaluator


def make_grid(entries, box, n=24):
    A = bm.Operator(np.atleast_2d(entries))
    return bm.compute_grid(A, bm.GridSpec(*box, n_pts=n))


class TestComputeGrid:
    def test_scalar_operator_distance_field(self):
        grid = make_grid([[-1.0]], (-2.0, 0.0, -1.0, 1.0), n=16)
        for iy, y in enumerate(grid.ys):
            for ix, x in enumerate(grid.xs):
                assert grid.sigma_min[iy, ix] == pytest.approx(abs(complex(x, y) + 1.0), abs=1e-12)

    def test_midpoint_between_eigenvalues(self):
        A = bm.Operator(np.diag([-1.0, -3.0]))
        grid = bm.compute_grid(A, bm.GridSpec(-3.0, -1.0, -1.0, 1.0, n_pts=9))
        # x = -2 is the middle column; at y = 0 the distance to both
        # eigenvalues is 1
        ix = 4
        iy = 4
        assert grid.xs[ix] == pytest.approx(-2.0)
        assert grid.ys[iy] == pytest.approx(0.0)
        assert grid.sigma_min[iy, ix] == pytest.approx(1.0, rel=1e-10)

    def test_matches_svd_oracle_at_random_nodes(self, bs_problem):
        # Brute-force SVD comparison on the production-size operator. The
        # comparison carries an absolute floor: two backward-stable methods
        # only agree to ~eps * ||A|| where sigma_min itself is that small.
        spec = bm.GridSpec(-40.0, 0.05, -10.0, 10.0, 100)
        grid = bm.compute_grid(bs_problem.operator, spec)
        A = bs_problem.operator.entries
        floor = 100 * np.finfo(float).eps * np.linalg.norm(A, 2)
        rng = np.random.default_rng(2024)
        for _ in range(20):
            ix = rng.integers(0, 100)
            iy = rng.integers(0, 100)
            z = complex(grid.xs[ix], grid.ys[iy])
            ref = np.linalg.svd(z * np.eye(200) - A, compute_uv=False)[-1]
            got = grid.sigma_min[iy, ix]
            assert abs(got - ref) <= 1e-8 * ref + floor

    def test_mirror_symmetry_real_operator(self):
        grid = make_grid(np.diag([-1.0, -2.0]), (-3.0, 0.0, -2.0, 2.0), n=17)
        np.testing.assert_allclose(grid.sigma_min, grid.sigma_min[::-1, :], atol=1e-12)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            bm.GridSpec(0.0, -1.0, 0.0, 1.0, 10)
        with pytest.raises(ValueError):
            bm.GridSpec(-1.0, 0.0, -1.0, 1.0, 4)


class TestSigmaMinEvaluator:
    def test_agrees_with_svd_on_nonnormal(self):
        rng = np.random.default_rng(5)
        M = rng.standard_normal((60, 60)) + np.diag(-np.linspace(1, 10, 60))
        ev = SigmaMinEvaluator(bm.Operator(M))
        for z in (0.5 + 1.0j, -3.0 + 0.2j, -8.0 - 4.0j):
            ref = np.linalg.svd(z * np.eye(60) - M, compute_uv=False)[-1]
            assert ev(z) == pytest.approx(ref, rel=1e-9)

    def test_exact_eigenvalue_shift_is_zero(self):
        ev = SigmaMinEvaluator(bm.Operator(np.diag([-1.0, -2.0])))
        assert ev(-1.0) == pytest.approx(0.0, abs=1e-12)


class TestLevelCurve:
    def test_normal_matrix_circle(self):
        # For A = -1 the plain level set |z + 1| = 1/2 is a circle; column
        # heights must follow sqrt(1/4 - (x+1)^2).
        grid = make_grid([[-1.0]], (-2.0, 0.0, -1.0, 1.0), n=161)
        curve = bm.level_curve(grid, 0.5, 0.0)
        for x, y in zip(curve.xs, curve.ys):
            inside = 0.25 - (x + 1.0) ** 2
            expected = np.sqrt(inside) if inside > 0 else 0.0
            assert y == pytest.approx(expected, abs=2e-2)

    def test_no_crossing_gives_zeros(self):
        grid = make_grid([[-1.0]], (-2.0, 0.0, -1.0, 1.0), n=16)
        curve = bm.level_curve(grid, 1e-12, 0.0)
        assert np.all(curve.ys == 0.0)

    def test_weighted_column_against_root_finder(self):
        # At the eigenvalue column the weighted value is e^{-t}/y; the curve
        # height must match the root of e^{-t}/y = 1/eps.
        from scipy.optimize import brentq

        t, eps = 1.0, 0.2
        grid = make_grid([[-1.0]], (-2.0, 0.0, -1.0, 1.0), n=201)
        curve = bm.level_curve(grid, eps, t)
        ix = np.argmin(np.abs(curve.xs + 1.0))
        assert curve.xs[ix] == pytest.approx(-1.0)
        root = brentq(lambda y: np.exp(-t) / y - 1.0 / eps, 1e-12, 1.0)
        assert curve.ys[ix] == pytest.approx(root, abs=2.0 / 200)

    def test_monotone_in_eps(self):
        grid = make_grid([[-1.0]], (-2.0, 0.0, -1.0, 1.0), n=101)
        tight = bm.level_curve(grid, 0.25, 0.0)
        loose = bm.level_curve(grid, 0.5, 0.0)
        assert np.all(tight.ys <= loose.ys + 1e-12)

    def test_rejects_bad_eps(self):
        grid = make_grid([[-1.0]], (-2.0, 0.0, -1.0, 1.0), n=16)
        with pytest.raises(ValueError):
            bm.level_curve(grid, 0.0)


class TestCriticalCurve:
    def test_max_with_zero_returns_other(self):
        xs = np.linspace(-1.0, 0.0, 12)
        flat = bm.LevelCurve(xs, np.zeros(12), 1e-9, 1.0)
        bumpy = bm.LevelCurve(xs, np.abs(np.sin(xs * 7)), 1e-13, 0.0)
        crit = bm.critical_curve(flat, bumpy)
        np.testing.assert_array_equal(crit.ys, bumpy.ys)

    def test_idempotent(self):
        xs = np.linspace(-1.0, 0.0, 12)
        c = bm.LevelCurve(xs, np.abs(np.cos(xs * 3)), 1e-9, 1.0)
        np.testing.assert_array_equal(bm.critical_curve(c, c).ys, c.ys)

    def test_interleaved_heights_elementwise(self):
        xs = np.linspace(-1.0, 0.0, 10)
        y1 = np.array([0.1, 0.9] * 5)
        y2 = np.array([0.8, 0.2] * 5)
        crit = bm.critical_curve(
            bm.LevelCurve(xs, y1, 1e-9, 1.0), bm.LevelCurve(xs, y2, 1e-13, 0.0)
        )
        np.testing.assert_array_equal(crit.ys, np.maximum(y1, y2))
        assert np.all((crit.ys == y1) | (crit.ys == y2))

    def test_mismatched_abscissae_rejected(self):
        c1 = bm.LevelCurve(np.linspace(-1, 0, 10), np.zeros(10), 1e-9)
        c2 = bm.LevelCurve(np.linspace(-2, 0, 10), np.zeros(10), 1e-13)
        with pytest.raises(GeometryError):
            bm.critical_curve(c1, c2)


class TestCsvExports:
    def test_grid_row_count_and_header(self, tmp_path):
        grid = make_grid([[-1.0]], (-2.0, 0.0, -1.0, 1.0), n=9)
        path = tmp_path / "grid.csv"
        bm.grid_to_csv(grid, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "x,y,sigma_min"
        assert len(lines) == 1 + 81

    def test_curve_export(self, tmp_path):
        grid = make_grid([[-1.0]], (-2.0, 0.0, -1.0, 1.0), n=9)
        curve = bm.level_curve(grid, 0.5, 0.0)
        path = tmp_path / "curve.csv"
        bm.curve_to_csv(curve, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "x,y_level"
        assert len(lines) == 1 + 9
        # full-precision scientific notation round-trips exactly
        x_back = float(lines[1].split(",")[0])
        assert x_back == curve.xs[0]
