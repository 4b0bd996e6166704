"""
Tests for the grid-based oracle solver
"""
import numpy as np
import pytest

from splinenet.core.dataset import Dataset
from splinenet.error_handling import DomainError
from splinenet.experiments.datasets import generate_dataset
from splinenet.oracle import (
    GridProblem,
    OracleSolution,
    build_dictionary,
    build_grid,
    kkt_violation,
    oracle_seminorm,
    soft_threshold,
    solve,
    to_spline,
)
from splinenet.oracle.solver import lipschitz_constant
from splinenet.splines.canonical import eval_spline


class TestDictionary:
    def test_atom_values(self):
        data = Dataset([1.0, 2.0], [0.0, 0.0])
        grid = np.array([0.0, 1.0, 2.0])

        relu = build_dictionary(GridProblem(2.0, grid, 1.0, data))
        assert relu.shape == (2, 5)
        assert relu[0, 0] == 1.0
        assert relu[0, 2] == 0.0
        np.testing.assert_array_equal(relu[:, 3:], [[1.0, 1.0], [1.0, 2.0]])

        cubic = build_dictionary(GridProblem(4.0, grid, 1.0, data))
        assert cubic.shape == (2, 7)
        assert cubic[1, 0] == pytest.approx(8.0 / 6.0)

    def test_default_grid_contains_data(self):
        data = generate_dataset(8, seed=2)
        grid = build_grid(data)
        assert np.all(np.isin(data.x, grid))
        assert grid[0] == data.x[0] and grid[-1] == data.x[-1]
        assert grid.size >= 20 * data.size

    def test_grid_too_small(self, hat):
        with pytest.raises(DomainError):
            build_grid(hat, 2)


class TestProblemValidation:
    def test_rejects_bad_inputs(self, hat):
        grid = np.linspace(0, 2, 11)
        with pytest.raises(DomainError):
            GridProblem(2.0, grid, 0.0, hat)
        with pytest.raises(DomainError):
            GridProblem(0.5, grid, 1.0, hat)
        with pytest.raises(DomainError):
            GridProblem(2.0, grid[::-1], 1.0, hat)
        with pytest.raises(DomainError):
            GridProblem(2.0, np.linspace(0, 1.5, 11), 1.0, hat)
        with pytest.raises(DomainError):
            GridProblem(2.0, np.array([0.0, 2.0]), 1.0, hat)


class TestSoftThreshold:
    @pytest.mark.parametrize("x, tau, expected", [(3.0, 1.0, 2.0), (-0.5, 1.0, 0.0), (-4.0, 1.5, -2.5), (0.7, 0.0, 0.7)])
    def test_values(self, x, tau, expected):
        assert soft_threshold(x, tau) == pytest.approx(expected)

    def test_array(self):
        np.testing.assert_array_equal(soft_threshold(np.array([-2.0, 0.5, 2.0]), 1.0), [-1.0, 0.0, 1.0])

    def test_negative_threshold(self):
        with pytest.raises(DomainError):
            soft_threshold(1.0, -0.1)


def test_lipschitz_constant_bounds_spectrum(rng):
    matrix = rng.normal(size=(6, 9))
    top = np.linalg.norm(matrix, 2) ** 2
    assert 2.0 * top <= lipschitz_constant(matrix) <= 2.0 * top * 1.02
    assert lipschitz_constant(np.zeros((3, 4))) == 0.0


class TestSolve:
    def test_hat_recovers_single_kink(self, hat):
        problem = GridProblem(2.0, np.linspace(0, 2, 101), 1e-5, hat)
        solution = solve(problem)
        assert oracle_seminorm(solution) == pytest.approx(2.0, rel=2e-2)
        assert kkt_violation(problem, solution) <= 1e-8
        spline = to_spline(problem, solution)
        assert spline.num_knots == 1
        assert spline.knots[0] == pytest.approx(1.0)
        assert eval_spline(spline, 1.0) == pytest.approx(1.0, abs=1e-4)

    def test_affine_data_needs_no_atoms(self):
        x = np.linspace(-1, 1, 5)
        data = Dataset(x, 2.0 * x + 1.0)
        solution = solve(GridProblem.on_data(2.0, 1e-3, data))
        assert oracle_seminorm(solution) <= 1e-6
        np.testing.assert_allclose(solution.poly, [1.0, 2.0], atol=1e-9)
        assert solution.data_residual <= 1e-9

    def test_large_lambda_gives_least_squares_polynomial(self, hat):
        solution = solve(GridProblem.on_data(2.0, 1e3, hat))
        np.testing.assert_array_equal(solution.coeffs, 0.0)
        np.testing.assert_allclose(solution.poly, [1.0 / 3.0, 0.0], atol=1e-12)

    def test_objective_is_consistent(self):
        data = generate_dataset(8, seed=1)
        problem = GridProblem.on_data(2.0, 1e-3, data)
        solution = solve(problem)
        full = build_dictionary(problem)
        residual = data.y - full @ np.concatenate([solution.coeffs, solution.poly])
        expected = residual @ residual + problem.lam * oracle_seminorm(solution)
        assert solution.objective == pytest.approx(expected, rel=1e-10)
        assert solution.data_residual == pytest.approx(np.linalg.norm(residual), rel=1e-10)
        assert kkt_violation(problem, solution) <= 1e-6

    def test_grid_refinement_is_stable(self):
        data = generate_dataset(8, seed=3)
        coarse = solve(GridProblem.on_data(2.0, 1e-3, data, size=160))
        fine = solve(GridProblem.on_data(2.0, 1e-3, data, size=320))
        assert oracle_seminorm(fine) == pytest.approx(oracle_seminorm(coarse), rel=1e-2)

    def test_cubic_spline_matches_dictionary(self):
        data = generate_dataset(8, seed=4)
        problem = GridProblem.on_data(4.0, 1e-4, data)
        solution = solve(problem)
        full = build_dictionary(problem)
        predicted = full @ np.concatenate([solution.coeffs, solution.poly])
        spline = to_spline(problem, solution)
        np.testing.assert_allclose(eval_spline(spline, data.x), predicted, atol=1e-8)

        # no worse than fitting the polynomial block alone
        poly_only = np.linalg.lstsq(full[:, problem.grid.size:], data.y, rcond=None)[0]
        baseline = data.y - full[:, problem.grid.size:] @ poly_only
        assert solution.objective <= baseline @ baseline + 1e-12

    @pytest.mark.parametrize("gamma, lam", [(2.0, 1e-5), (4.0, 1e-4), (2.5, 1e-3)])
    def test_objective_never_increases(self, gamma, lam):
        data = generate_dataset(8, seed=2)
        solution = solve(GridProblem.on_data(gamma, lam, data), max_iters=5000)
        trace = solution.trace
        assert trace.size == solution.iterations >= 2
        steps = np.diff(trace[1:])
        assert np.all(steps <= 1e-12 * (1.0 + np.abs(trace[2:])))

    def test_not_converged_is_reported(self):
        data = generate_dataset(8, seed=5)
        solution = solve(GridProblem.on_data(2.0, 1e-5, data), max_iters=1, tol=1e-16)
        assert not solution.converged
        assert solution.iterations == 1


def test_oracle_seminorm():
    solution = OracleSolution(np.array([1.0, -2.0, 0.0]), np.zeros(2), 0.0, 0.0)
    assert oracle_seminorm(solution) == 3.0
