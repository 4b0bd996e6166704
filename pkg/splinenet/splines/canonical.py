"""
Canonical spline representation

s(x) = sum_k coeffs[k] * (x - knots[k])_+^(gamma-1) / Gamma(gamma) + poly(x)

With the 1/Gamma(gamma) normalization D^gamma s = sum_k coeffs[k] delta(. - knots[k]),
so the measure norm of D^gamma s is sum |coeffs|.
"""
from dataclasses import dataclass
from typing import Optional, Tuple
import math

import numpy as np
from numpy.polynomial import polynomial as npoly
from numpy.typing import ArrayLike
from scipy.special import comb

from splinenet.config import settings
from splinenet.core.activations import ArrayOrFloat, truncated_power
from splinenet.error_handling import DomainError


def _readonly(values: ArrayLike) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CanonicalSpline:
    """
    Nonuniform D^gamma-spline

    Attributes:
        gamma: Order
        knots: Strictly increasing Dirac locations
        coeffs: Signed Dirac weights of D^gamma s
        poly: Null-space polynomial, ascending coefficients, length ceil(gamma)
    """
    gamma: float
    knots: np.ndarray
    coeffs: np.ndarray
    poly: np.ndarray

    def __post_init__(self):
        gamma = float(self.gamma)
        if not gamma >= 1.0:
            raise DomainError(f"gamma must be >= 1, got {gamma}")
        knots, coeffs, poly = _readonly(self.knots), _readonly(self.coeffs), _readonly(self.poly)
        if knots.shape != coeffs.shape:
            raise DomainError("knots and coeffs must have the same length")
        if poly.size != math.ceil(gamma):
            raise DomainError(f"poly must have {math.ceil(gamma)} coefficients, got {poly.size}")
        if np.any(np.diff(knots) <= 0.0):
            raise DomainError("knots must be strictly increasing")
        if not all(np.all(np.isfinite(a)) for a in (knots, coeffs, poly)):
            raise DomainError("spline contains non-finite values")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "poly", poly)

    @property
    def num_knots(self) -> int:
        return int(self.knots.size)

    @classmethod
    def from_atoms(
        cls,
        gamma: float,
        knots: ArrayLike,
        coeffs: ArrayLike,
        poly: ArrayLike,
        merge_tol: float = 0.0,
        prune_scale: Optional[float] = None
    ) -> "CanonicalSpline":
        """
        Build a spline from unsorted, possibly coincident atoms

        Atoms closer than merge_tol are summed; merged weights below
        coeff_prune_ratio * prune_scale are dropped (prune_scale defaults to the
        largest input weight).

        Args:
            gamma: Order
            knots: Atom locations
            coeffs: Atom weights
            poly: Null-space polynomial
            merge_tol: Absolute knot-merging distance
            prune_scale: Reference magnitude for dropping numerical zeros
        """
        knots = np.asarray(knots, dtype=float).reshape(-1)
        coeffs = np.asarray(coeffs, dtype=float).reshape(-1)
        if knots.shape != coeffs.shape:
            raise DomainError("knots and coeffs must have the same length")

        reference = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
        if prune_scale is not None:
            reference = max(reference, float(prune_scale))

        knots, coeffs = merge_knots(knots, coeffs, merge_tol)
        keep = np.abs(coeffs) > settings.coeff_prune_ratio * reference
        return cls(gamma, knots[keep], coeffs[keep], poly)


def merge_knots(knots: np.ndarray, coeffs: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sort atoms and sum those whose knots lie within tol of their neighbour

    A merged knot sits at the |coeff|-weighted mean of its group.
    """
    if knots.size == 0:
        return knots.copy(), coeffs.copy()

    order = np.argsort(knots, kind="stable")
    knots, coeffs = knots[order], coeffs[order]
    starts = np.concatenate([[True], np.diff(knots) > tol])
    group = np.cumsum(starts) - 1
    count = int(group[-1]) + 1

    merged = np.zeros(count)
    np.add.at(merged, group, coeffs)

    weights = np.abs(coeffs)
    weight_sum = np.zeros(count)
    np.add.at(weight_sum, group, weights)
    location_sum = np.zeros(count)
    np.add.at(location_sum, group, weights * knots)
    first = knots[starts]
    with np.errstate(invalid="ignore", divide="ignore"):
        location = np.where(weight_sum > 0.0, location_sum / weight_sum, first)

    # rounding in the weighted mean must not reorder knots
    location = np.maximum.accumulate(location)
    distinct = np.concatenate([[True], np.diff(location) > 0.0])
    if not distinct.all():
        collapse = np.cumsum(distinct) - 1
        summed = np.zeros(int(collapse[-1]) + 1)
        np.add.at(summed, collapse, merged)
        return location[distinct], summed
    return location, merged


def shifted_power_coefficients(shifts: ArrayLike, degree: int, size: int) -> np.ndarray:
    """
    Monomial coefficients of (x - t)^degree for each shift t

    Returns:
        Array of shape (len(shifts), size), ascending powers
    """
    t = np.asarray(shifts, dtype=float).reshape(-1)
    j = np.arange(degree + 1)
    table = comb(degree, j) * np.power(-t[:, None], degree - j)
    out = np.zeros((t.size, size))
    out[:, :degree + 1] = table
    return out


def eval_spline(s: CanonicalSpline, x: ArrayLike) -> ArrayOrFloat:
    """Evaluate the spline at x"""
    x_arr = np.asarray(x, dtype=float)
    flat = x_arr.reshape(-1)
    atoms = truncated_power(np.subtract.outer(flat, s.knots), s.gamma)
    values = np.asarray(atoms).reshape(flat.size, s.num_knots) @ s.coeffs + npoly.polyval(flat, s.poly)
    if x_arr.ndim == 0:
        return float(values[0])
    return values.reshape(x_arr.shape)


def spline_derivative(s: CanonicalSpline, x: ArrayLike, order: int = 1) -> ArrayOrFloat:
    """
    order-th derivative of the spline, for order < gamma

    The derivative of a normalized atom of order gamma is the atom of order
    gamma - 1, so no Gamma-function bookkeeping is needed here.
    """
    if order < 0 or order >= s.gamma:
        raise DomainError(f"derivative order must be in [0, gamma), got {order}")
    x_arr = np.asarray(x, dtype=float)
    flat = x_arr.reshape(-1)
    atoms = truncated_power(np.subtract.outer(flat, s.knots), s.gamma - order)
    poly = npoly.polyder(s.poly, order) if order else s.poly
    values = np.asarray(atoms).reshape(flat.size, s.num_knots) @ s.coeffs + npoly.polyval(flat, poly)
    if x_arr.ndim == 0:
        return float(values[0])
    return values.reshape(x_arr.shape)


def spline_seminorm(s: CanonicalSpline) -> float:
    """||D^gamma s||_M = sum |coeffs|"""
    return float(np.sum(np.abs(s.coeffs)))
