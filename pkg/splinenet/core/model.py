"""
Single-hidden-layer network with a power activation

f(x) = sum_k v_k rho(w_k x - b_k) + c(x), where c is a polynomial of degree
< ceil(gamma) (the generalized bias; for gamma = 2 the skip connection).
"""
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly
from numpy.typing import ArrayLike

from splinenet.config import settings
from splinenet.core.activations import (
    ArrayOrFloat,
    PowerActivation,
    green_constant,
    reflect,
)
from splinenet.core.dataset import Dataset
from splinenet.core.regularizers import RegKind, penalty_gradient, penalty_value
from splinenet.error_handling import DomainError, UnsupportedError
from splinenet.splines.canonical import CanonicalSpline, shifted_power_coefficients


def _readonly(values: ArrayLike) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class NetworkParams:
    """
    Network parameters theta = (v, w, b, c)

    Attributes:
        activation: Power activation rho
        v: Output weights, length K
        w: Input weights, length K, all nonzero
        b: Biases, length K
        poly: Generalized-bias coefficients, ascending, length ceil(gamma)
    """
    activation: PowerActivation
    v: np.ndarray
    w: np.ndarray
    b: np.ndarray
    poly: np.ndarray

    def __post_init__(self):
        v, w, b, poly = (_readonly(a) for a in (self.v, self.w, self.b, self.poly))
        if not (v.size == w.size == b.size):
            raise DomainError(f"v, w, b must have equal length, got {v.size}, {w.size}, {b.size}")
        if poly.size != self.activation.null_space_dim:
            raise DomainError(
                f"poly must have {self.activation.null_space_dim} coefficients, got {poly.size}"
            )
        if not all(np.all(np.isfinite(a)) for a in (v, w, b, poly)):
            raise DomainError("network parameters must be finite")
        if np.any(w == 0.0):
            raise DomainError("input weights must be nonzero")
        if not self.activation.is_integer_order and np.any(w < 0.0):
            raise DomainError("fractional activations require positive input weights")
        for name, arr in (("v", v), ("w", w), ("b", b), ("poly", poly)):
            object.__setattr__(self, name, arr)

    @property
    def width(self) -> int:
        return int(self.v.size)

    @property
    def knots(self) -> np.ndarray:
        """Neuron knots b_k / w_k"""
        return self.b / self.w

    def to_vector(self) -> np.ndarray:
        """Flat parameter vector [v, w, b, poly]"""
        return np.concatenate([self.v, self.w, self.b, self.poly])

    @classmethod
    def from_vector(cls, activation: PowerActivation, vector: np.ndarray, width: int) -> "NetworkParams":
        v, w, b, poly = split_vector(vector, width)
        return cls(activation, v, w, b, poly)

    def with_arrays(self, **arrays: np.ndarray) -> "NetworkParams":
        return replace(self, **arrays)


@dataclass(frozen=True, eq=False)
class Gradient:
    """Gradient with the shapes of NetworkParams"""
    dv: np.ndarray
    dw: np.ndarray
    db: np.ndarray
    dpoly: np.ndarray

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.dv, self.dw, self.db, self.dpoly])


def split_vector(vector: np.ndarray, width: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Views (v, w, b, poly) into a flat parameter vector"""
    return (
        vector[:width],
        vector[width:2 * width],
        vector[2 * width:3 * width],
        vector[3 * width:],
    )


def zero_network(activation: PowerActivation) -> NetworkParams:
    """The K = 0 network with a zero polynomial"""
    return NetworkParams(activation, [], [], [], np.zeros(activation.null_space_dim))


def forward(params: NetworkParams, x: ArrayLike) -> ArrayOrFloat:
    """
    Evaluate f_theta(x) = sum_k v_k rho(w_k x - b_k) + sum_j poly[j] x^j
    """
    x_arr = np.asarray(x, dtype=float)
    flat = x_arr.reshape(-1)
    pre = np.multiply.outer(flat, params.w) - params.b
    values = params.activation(pre) @ params.v + npoly.polyval(flat, params.poly)
    if x_arr.ndim == 0:
        return float(values[0])
    return values.reshape(x_arr.shape)


def objective_terms(
    act: PowerActivation,
    vector: np.ndarray,
    width: int,
    x: np.ndarray,
    y: np.ndarray,
    vander: np.ndarray,
    reg: RegKind,
    lam: float
) -> Tuple[float, float, np.ndarray]:
    """
    Data loss, regularizer value and gradient of the training objective

    Works on the flat vector so the trainer can call it once per epoch
    without rebuilding NetworkParams.

    Args:
        act: Activation
        vector: Flat parameters [v, w, b, poly]
        width: K
        x, y: Samples
        vander: x^j for j < ceil(gamma), shape (N, ceil(gamma))
        reg: Regularizer kind
        lam: Regularization weight

    Returns:
        (sum of squared residuals, regularizer value, gradient vector)
    """
    v, w, b, poly = split_vector(vector, width)
    pre = np.multiply.outer(x, w) - b
    activations = act(pre)
    residual = activations @ v + vander @ poly - y
    twice = 2.0 * residual

    slopes = act.derivative(pre)
    back = slopes.T @ twice
    grad = np.empty_like(vector)
    dv, dw, db, dpoly = split_vector(grad, width)
    dv[:] = activations.T @ twice
    dw[:] = v * (slopes.T @ (twice * x))
    db[:] = -v * back
    dpoly[:] = vander.T @ twice

    reg_value = penalty_value(v, w, act.gamma, reg)
    if lam != 0.0 and reg is not RegKind.NONE:
        reg_dv, reg_dw = penalty_gradient(v, w, act.gamma, reg)
        dv += lam * reg_dv
        dw += lam * reg_dw

    return float(residual @ residual), reg_value, grad


def vandermonde(x: np.ndarray, act: PowerActivation) -> np.ndarray:
    return np.vander(np.asarray(x, dtype=float), act.null_space_dim, increasing=True)


def gradient(params: NetworkParams, dataset: Dataset, lam: float, reg: RegKind) -> Gradient:
    """
    Analytic gradient of sum (f(x_n) - y_n)^2 + lam * R(theta)

    R is weight_decay, path_norm (subgradient) or nothing, per reg.
    """
    if lam < 0.0:
        raise DomainError(f"lambda must be >= 0, got {lam}")
    reg = RegKind(reg)
    _, _, grad = objective_terms(
        params.activation,
        params.to_vector(),
        params.width,
        dataset.x,
        dataset.y,
        vandermonde(dataset.x, params.activation),
        reg,
        lam
    )
    return Gradient(*split_vector(grad, params.width))


def rescale_neuron(params: NetworkParams, k: int, t: float) -> NetworkParams:
    """
    Replace neuron k by (v_k / t^(gamma-1), t w_k, t b_k); f is unchanged

    Raises:
        DomainError: If t <= 0
    """
    if not t > 0.0:
        raise DomainError(f"rescaling factor must be positive, got {t}")
    if not 0 <= k < params.width:
        raise IndexError(f"neuron index {k} out of range for width {params.width}")

    v, w, b = params.v.copy(), params.w.copy(), params.b.copy()
    v[k] /= t ** (params.activation.gamma - 1.0)
    w[k] *= t
    b[k] *= t
    return params.with_arrays(v=v, w=w, b=b)


def balance(params: NetworkParams) -> NetworkParams:
    """
    Rescale every neuron so that |v_k| = |w_k|^(gamma-1)

    Afterwards weight_decay equals path_norm. Neurons with v_k = 0 are left
    alone; for gamma = 1 the weights do not enter the regularizer and nothing
    changes.
    """
    gamma = params.activation.gamma
    if params.width == 0 or gamma == 1.0:
        return params

    abs_v, abs_w = np.abs(params.v), np.abs(params.w)
    t = np.ones(params.width)
    active = abs_v > 0.0
    t[active] = (abs_v[active] / abs_w[active] ** (gamma - 1.0)) ** (1.0 / (2.0 * gamma - 2.0))

    return params.with_arrays(
        v=params.v / t ** (gamma - 1.0),
        w=params.w * t,
        b=params.b * t,
    )


def reduce(params: NetworkParams, rtol: Optional[float] = None) -> NetworkParams:
    """
    Reduced form: merge neurons with equal (w_k, b_k), drop v_k = 0

    Pairs are equal when both components agree within rtol * (1 + max |w|, |b|).
    """
    if params.width == 0:
        return params
    rtol = settings.reduce_rtol if rtol is None else rtol
    tol = rtol * (1.0 + max(float(np.max(np.abs(params.w))), float(np.max(np.abs(params.b)))))

    order = np.lexsort((params.b, params.w))
    w, b, v = params.w[order], params.b[order], params.v[order]

    merged_v, merged_w, merged_b, magnitude = [], [], [], []
    for wk, bk, vk in zip(w, b, v):
        if merged_w and abs(wk - merged_w[-1]) <= tol and abs(bk - merged_b[-1]) <= tol:
            merged_v[-1] += vk
            magnitude[-1] += abs(vk)
        else:
            merged_w.append(wk)
            merged_b.append(bk)
            merged_v.append(vk)
            magnitude.append(abs(vk))

    merged_v = np.array(merged_v)
    keep = np.abs(merged_v) > rtol * np.array(magnitude)
    return params.with_arrays(
        v=merged_v[keep],
        w=np.array(merged_w)[keep],
        b=np.array(merged_b)[keep],
    )


def to_canonical_spline(params: NetworkParams, scale: Optional[float] = None) -> CanonicalSpline:
    """
    Canonical spline form of the network

    Each neuron v rho(w x - b) equals v |w|^(gamma-1) rho_s(x - b/w), with
    rho_s = rho for w > 0 and the reflected activation for w < 0. Writing
    rho_s(y) = alpha_s y^(gamma-1) + (beta_s - alpha_s) y_+^(gamma-1) splits it into
    a polynomial part and a right-sided atom at the knot b/w.

    Args:
        params: Network
        scale: Data range; knots closer than knot_merge_rtol * scale are merged
            (defaults to the knot span)

    Raises:
        UnsupportedError: For fractional gamma with some w_k < 0
    """
    act = params.activation
    poly = np.array(params.poly, dtype=float)
    if params.width == 0:
        return CanonicalSpline(act.gamma, [], [], poly)

    positive = params.w > 0.0
    if not act.is_integer_order and not positive.all():
        raise UnsupportedError("fractional activations need w > 0 for the canonical form")

    knots = params.knots
    magnitude = params.v * np.abs(params.w) ** (act.gamma - 1.0)
    c = green_constant(act)

    if act.is_integer_order:
        reflected, dirac_sign = reflect(act)
        sign = np.where(positive, 1.0, float(dirac_sign))
        alpha = np.where(positive, act.alpha, reflected.alpha)
        weights = magnitude * alpha
        degree = int(act.gamma) - 1
        poly += weights @ shifted_power_coefficients(knots, degree, act.null_space_dim)
    else:
        sign = np.ones(params.width)

    coeffs = magnitude * sign * c

    if scale is None:
        span = float(np.ptp(knots))
        scale = span if span > 0.0 else max(1.0, float(np.max(np.abs(knots))))

    return CanonicalSpline.from_atoms(
        act.gamma,
        knots,
        coeffs,
        poly,
        merge_tol=settings.knot_merge_rtol * scale
    )
