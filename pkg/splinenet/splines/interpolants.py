"""
Classical interpolating splines in canonical form
"""
import numpy as np
from numpy.polynomial import Polynomial
from scipy.linalg import solve_banded

from splinenet.core.dataset import Dataset
from splinenet.error_handling import InputError
from splinenet.splines.canonical import CanonicalSpline


def connect_the_dots(data: Dataset) -> CanonicalSpline:
    """
    Piecewise-linear interpolant, continued linearly past both ends

    Knots are the interior sites, weights the slope changes there.
    """
    x, y = data.x, data.y
    slopes = np.diff(y) / np.diff(x)
    jumps = np.diff(slopes)
    poly = np.array([y[0] - slopes[0] * x[0], slopes[0]])
    return CanonicalSpline.from_atoms(
        2.0,
        x[1:-1],
        jumps,
        poly,
        prune_scale=float(np.max(np.abs(slopes)))
    )


def natural_moments(data: Dataset) -> np.ndarray:
    """
    Second derivatives M_i of the natural cubic interpolant at the sites

    Solves the tridiagonal system
    h_{i-1} M_{i-1} + 2 (h_{i-1} + h_i) M_i + h_i M_{i+1} = 6 (s_i - s_{i-1})
    with M_0 = M_{N-1} = 0.
    """
    if data.size < 3:
        raise InputError(f"natural cubic interpolation needs at least 3 samples, got {data.size}")

    h = np.diff(data.x)
    slopes = np.diff(data.y) / h
    interior = data.size - 2

    banded = np.zeros((3, interior))
    banded[0, 1:] = h[1:-1]
    banded[1, :] = 2.0 * (h[:-1] + h[1:])
    banded[2, :-1] = h[1:-1]
    rhs = 6.0 * np.diff(slopes)

    moments = np.zeros(data.size)
    moments[1:-1] = solve_banded((1, 1), banded, rhs)
    return moments


def natural_cubic(data: Dataset) -> CanonicalSpline:
    """
    Natural cubic interpolant (f'' = 0 at both end sites) as a gamma = 4 spline

    The weights are the jumps of f''' at the interior sites; outside the data
    the end cubics continue unchanged.

    Raises:
        InputError: If fewer than 3 samples are given
    """
    x, y = data.x, data.y
    moments = natural_moments(data)
    h = np.diff(x)
    slopes = np.diff(y) / h

    third = np.diff(moments) / h
    jumps = np.diff(third)

    # first segment as a polynomial in (x - x_0)
    first_slope = slopes[0] - h[0] * (2.0 * moments[0] + moments[1]) / 6.0
    local = Polynomial([y[0], first_slope, moments[0] / 2.0, third[0] / 6.0])
    poly = np.zeros(4)
    coef = local(Polynomial([-x[0], 1.0])).coef
    poly[:coef.size] = coef[:4]

    scale = float(np.max(np.abs(slopes)) / np.min(h) ** 2)
    return CanonicalSpline.from_atoms(4.0, x[1:-1], jumps, poly, prune_scale=scale)
