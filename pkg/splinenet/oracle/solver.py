"""
Grid-based convex solver for the measure-norm spline problem

    minimize  sum_n (y_n - s(x_n))^2 + lambda * ||D^gamma s||_M

over splines s = sum_j c_j atom(. - t_j) + p with knots t_j restricted to a
fixed grid. With normalized atoms the measure norm is sum |c_j|, so this is a
LASSO with an unpenalized polynomial block. The polynomial block is projected
out, the remaining LASSO is solved with FISTA (adaptive restart), and the
result is polished by a feature-sign active-set search.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple
import logging

import numpy as np
from scipy.linalg import lstsq, orth, qr, solve_triangular

from splinenet.config import settings
from splinenet.core.activations import ArrayOrFloat, truncated_power
from splinenet.core.dataset import Dataset
from splinenet.error_handling import DomainError, SolverError
from splinenet.splines.canonical import CanonicalSpline

logger = logging.getLogger(__name__)

POLISH_KKT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GridProblem:
    """
    Discretized variational problem

    Attributes:
        gamma: Order of D^gamma
        grid: Strictly increasing candidate knots covering the data range
        lam: Measure-norm weight, > 0
        data: Samples
    """
    gamma: float
    grid: np.ndarray
    lam: float
    data: Dataset

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float).reshape(-1)
        if not self.gamma >= 1.0:
            raise DomainError(f"gamma must be >= 1, got {self.gamma}")
        if not self.lam > 0.0:
            raise DomainError(f"lambda must be > 0, got {self.lam}")
        if grid.size < self.data.size:
            raise DomainError(f"grid has {grid.size} points, fewer than the {self.data.size} samples")
        if np.any(np.diff(grid) <= 0.0) or not np.all(np.isfinite(grid)):
            raise DomainError("grid must be finite and strictly increasing")
        low, high = self.data.x_range
        if grid[0] > low or grid[-1] < high:
            raise DomainError(f"grid [{grid[0]}, {grid[-1]}] does not cover the data range [{low}, {high}]")
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def null_space_dim(self) -> int:
        return int(np.ceil(self.gamma))

    @classmethod
    def on_data(cls, gamma: float, lam: float, data: Dataset, size: Optional[int] = None) -> "GridProblem":
        """Problem on the default grid (data sites plus uniform fill)"""
        return cls(gamma, build_grid(data, size), lam, data)


@dataclass(frozen=True, eq=False)
class OracleSolution:
    """
    Attributes:
        coeffs: Atom weights, one per grid point
        poly: Null-space polynomial, ascending
        objective: ||r||^2 + lambda * sum |coeffs|
        data_residual: ||r||_2
        converged: Stopping criterion met before max_iters
        iterations: FISTA iterations used
        polished: Active-set refinement accepted
        trace: Reduced objective after each FISTA iteration
    """
    coeffs: np.ndarray
    poly: np.ndarray
    objective: float
    data_residual: float
    converged: bool = True
    iterations: int = 0
    polished: bool = field(default=False)
    trace: np.ndarray = field(default_factory=lambda: np.zeros(0))


def build_grid(data: Dataset, size: Optional[int] = None) -> np.ndarray:
    """
    Data sites merged with a uniform fill of [x_1, x_N]

    Args:
        data: Samples
        size: Target number of grid points (default oracle_grid_factor * N)
    """
    size = settings.oracle_grid_factor * data.size if size is None else size
    if size < data.size:
        raise DomainError(f"grid size {size} is smaller than the number of samples {data.size}")
    low, high = data.x_range
    fill = np.linspace(low, high, max(size - data.size + 2, 2))
    return np.union1d(data.x, fill)


def build_dictionary(problem: GridProblem) -> np.ndarray:
    """
    Measurement matrix [atoms | polynomial], shape (N, M + ceil(gamma))

    Atom column j holds (x_n - t_j)_+^(gamma-1) / Gamma(gamma), polynomial
    column j holds x_n^j.
    """
    x = problem.data.x
    atoms = np.asarray(truncated_power(np.subtract.outer(x, problem.grid), problem.gamma))
    atoms = atoms.reshape(x.size, problem.grid.size)
    poly = np.vander(x, problem.null_space_dim, increasing=True)
    return np.hstack([atoms, poly])


def soft_threshold(x: ArrayOrFloat, tau: float) -> ArrayOrFloat:
    """sgn(x) * max(|x| - tau, 0)"""
    if tau < 0.0:
        raise DomainError(f"threshold must be >= 0, got {tau}")
    values = np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)
    if np.ndim(x) == 0:
        return float(values)
    return values


def lipschitz_constant(matrix: np.ndarray, iterations: int = 200, tol: float = 1e-12, seed: int = 0) -> float:
    """
    Lipschitz constant 2 * sigma_max(A)^2 of the gradient of ||y - A c||^2

    sigma_max^2 comes from power iteration on A^T A, padded by 1% since power
    iteration approaches it from below.
    """
    if matrix.size == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(matrix.shape[1])
    vec /= np.linalg.norm(vec)
    eig = 0.0
    for _ in range(iterations):
        nxt = matrix.T @ (matrix @ vec)
        norm = float(np.linalg.norm(nxt))
        if norm == 0.0:
            return 0.0
        vec = nxt / norm
        if abs(norm - eig) <= tol * norm:
            eig = norm
            break
        eig = norm
    return 2.0 * eig * 1.01


class _Reduced:
    """LASSO in the atom weights after eliminating the polynomial block"""

    def __init__(self, problem: GridProblem):
        full = build_dictionary(problem)
        m = problem.grid.size
        self.atoms = full[:, :m]
        self.poly_block = full[:, m:]
        self.y = problem.data.y
        self.lam = problem.lam

        basis = orth(self.poly_block)
        self.project = lambda z: z - basis @ (basis.T @ z)
        self.matrix = self.project(self.atoms)
        self.target = self.project(self.y)

    def objective(self, c: np.ndarray) -> float:
        r = self.target - self.matrix @ c
        return float(r @ r + self.lam * np.sum(np.abs(c)))

    def grad(self, c: np.ndarray) -> np.ndarray:
        return -2.0 * (self.matrix.T @ (self.target - self.matrix @ c))

    def poly_for(self, c: np.ndarray) -> np.ndarray:
        coef, *_ = lstsq(self.poly_block, self.y - self.atoms @ c)
        return coef


def _fista(reduced: _Reduced, max_iters: int, tol: float) -> Tuple[np.ndarray, List[float], bool]:
    m = reduced.matrix.shape[1]
    c = np.zeros(m)
    trace: List[float] = []
    lip = lipschitz_constant(reduced.matrix)
    if lip == 0.0:
        return c, trace, True

    step = 1.0 / lip
    thresh = reduced.lam * step
    z = c.copy()
    t = 1.0
    f_prev = reduced.objective(c)

    for it in range(1, max_iters + 1):
        c_new = soft_threshold(z - step * reduced.grad(z), thresh)
        f_new = reduced.objective(c_new)
        if f_new > f_prev:
            # restart from the last iterate with a plain proximal step
            t = 1.0
            c_new = soft_threshold(c - step * reduced.grad(c), thresh)
            f_new = reduced.objective(c_new)

        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        z = c_new + ((t - 1.0) / t_new) * (c_new - c)
        trace.append(f_new)
        change = abs(f_prev - f_new)
        c, t, f_prev = c_new, t_new, f_new
        if change <= tol * (1.0 + f_new):
            return c, trace, True

    return c, trace, False


def _coordinate_violation(gradient: np.ndarray, c: np.ndarray, lam: float) -> np.ndarray:
    """Per-coordinate KKT violation in units of lambda; gradient is 2 A^T r"""
    active = c != 0.0
    out = np.maximum(np.abs(gradient) - lam, 0.0)
    out[active] = np.abs(gradient[active] - lam * np.sign(c[active]))
    return out / lam


def _signed_least_squares(sub: np.ndarray, y: np.ndarray, shift: np.ndarray) -> np.ndarray:
    """Solve (S^T S) c = S^T y - shift through a QR factorization of S"""
    q, r = qr(sub, mode="economic")
    diag = np.abs(np.diag(r))
    if diag.min() > 1e-12 * diag.max():
        z = solve_triangular(r, shift, trans="T")
        return solve_triangular(r, q.T @ y - z)
    values, *_ = lstsq(sub.T @ sub, sub.T @ y - shift)
    return values


def _polish(reduced: _Reduced) -> Optional[np.ndarray]:
    """
    Feature-sign active-set search from the empty support

    Activates the worst KKT violator, solves the sign-constrained least
    squares on the support, and line-searches towards it over the points
    where a coefficient crosses zero. Returns None if it does not settle.
    """
    lam = reduced.lam
    a, y = reduced.matrix, reduced.target
    x = np.zeros(a.shape[1])
    signs = np.zeros(a.shape[1])
    optimal = True

    def objective(c: np.ndarray) -> float:
        r = y - a @ c
        return float(r @ r + lam * np.sum(np.abs(c)))

    for _ in range(4 * a.shape[1] + 20):
        if optimal:
            gradient = 2.0 * (a.T @ (y - a @ x))
            violation = np.where(x == 0.0, np.maximum(np.abs(gradient) - lam, 0.0), 0.0) / lam
            worst = int(np.argmax(violation))
            if violation[worst] <= POLISH_KKT_TOL:
                return x
            signs[worst] = np.sign(gradient[worst])

        support = np.flatnonzero(signs)
        if support.size == 0:
            x, optimal = np.zeros_like(x), True
            continue
        start = x[support]
        target = _signed_least_squares(a[:, support], y, 0.5 * lam * signs[support])
        direction = target - start

        best, best_value, dropped = 1.0, objective(_embed(x.size, support, target)), None
        with np.errstate(divide="ignore", invalid="ignore"):
            crossings = -start / direction
        for j in np.flatnonzero((start != 0.0) & (crossings > 0.0) & (crossings < 1.0)):
            values = start + crossings[j] * direction
            values[j] = 0.0
            value = objective(_embed(x.size, support, values))
            if value < best_value:
                best, best_value, dropped = crossings[j], value, j

        values = start + best * direction
        if dropped is not None:
            values[dropped] = 0.0
        x = _embed(x.size, support, values)
        optimal = dropped is None and bool(np.all(np.sign(values) == signs[support]))
        signs = np.sign(x)

    return None


def _embed(size: int, support: np.ndarray, values: np.ndarray) -> np.ndarray:
    out = np.zeros(size)
    out[support] = values
    return out


def solve(problem: GridProblem, max_iters: Optional[int] = None, tol: Optional[float] = None) -> OracleSolution:
    """
    Minimize ||y - A c - P p||^2 + lambda * ||c||_1

    Stops when the relative objective change drops below tol or after
    max_iters iterations (then converged is False and the last iterate is
    returned).

    Raises:
        SolverError: If the iterate becomes non-finite
    """
    max_iters = settings.oracle_max_iters if max_iters is None else max_iters
    tol = settings.oracle_tol if tol is None else tol
    reduced = _Reduced(problem)

    with np.errstate(over="raise", invalid="raise"):
        try:
            c, trace, converged = _fista(reduced, max_iters, tol)
        except FloatingPointError as e:
            raise SolverError(f"proximal gradient iteration failed: {e}") from e
    if not np.all(np.isfinite(c)):
        raise SolverError("proximal gradient iterate is not finite")
    if not converged:
        logger.warning("Oracle did not converge in %d iterations", max_iters)

    polished = False
    refined = _polish(reduced)
    baseline = reduced.objective(c)
    if refined is not None and reduced.objective(refined) <= baseline + 1e-12 * (1.0 + baseline):
        c = refined
        polished = True
    else:
        logger.warning("Oracle active-set polish rejected; keeping the proximal-gradient iterate")

    poly = reduced.poly_for(c)
    residual = problem.data.y - reduced.atoms @ c - reduced.poly_block @ poly
    data_residual = float(np.linalg.norm(residual))
    objective = float(residual @ residual + problem.lam * np.sum(np.abs(c)))
    logger.debug(
        "Oracle solved: %d iterations, %d active atoms, objective %.6g",
        len(trace), int(np.count_nonzero(c)), objective
    )
    return OracleSolution(
        c, poly, objective, data_residual, converged, len(trace), polished, np.asarray(trace)
    )


def kkt_violation(problem: GridProblem, solution: OracleSolution) -> float:
    """
    Largest optimality violation, relative to lambda

    With g = 2 A^T r: |g_j| <= lambda on zero coordinates, g_j = lambda sgn(c_j)
    on active ones, and the polynomial block must be stationary (P^T r = 0).
    """
    full = build_dictionary(problem)
    m = problem.grid.size
    coeffs = np.asarray(solution.coeffs, dtype=float)
    residual = problem.data.y - full[:, :m] @ coeffs - full[:, m:] @ solution.poly
    gradient = 2.0 * (full[:, :m].T @ residual)
    atom_violation = float(np.max(_coordinate_violation(gradient, coeffs, problem.lam), initial=0.0))
    poly_violation = float(np.max(np.abs(2.0 * (full[:, m:].T @ residual)))) / problem.lam
    return max(atom_violation, poly_violation)


def oracle_seminorm(solution: OracleSolution) -> float:
    """sum |coeffs|"""
    return float(np.sum(np.abs(solution.coeffs)))


def to_spline(problem: GridProblem, solution: OracleSolution) -> CanonicalSpline:
    """Grid solution as a canonical spline (zero atoms dropped)"""
    return CanonicalSpline.from_atoms(problem.gamma, problem.grid, solution.coeffs, solution.poly)
