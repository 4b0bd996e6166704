"""
Regularizers matched to power activations

path_norm is sum |v_k| |w_k|^(gamma-1); weight_decay is its smooth surrogate
1/2 sum (v_k^2 + |w_k|^(2 gamma - 2)), equal to it at balanced parameters.
"""
from enum import Enum
from typing import TYPE_CHECKING, Optional, Tuple

import numpy as np

from splinenet.core.activations import PowerActivation, green_constant, operator_dilation_factor

if TYPE_CHECKING:
    from splinenet.core.model import NetworkParams


class RegKind(str, Enum):
    """Regularizer applied during training"""
    PATH_NORM = "path_norm"
    WEIGHT_DECAY = "weight_decay"
    NONE = "none"


def penalty_value(v: np.ndarray, w: np.ndarray, gamma: float, kind: RegKind) -> float:
    """Regularizer value on raw weight arrays"""
    kind = RegKind(kind)
    if kind is RegKind.PATH_NORM:
        return float(np.sum(np.abs(v) * np.abs(w) ** (gamma - 1.0)))
    if kind is RegKind.WEIGHT_DECAY:
        return float(0.5 * np.sum(v * v + np.abs(w) ** (2.0 * gamma - 2.0)))
    return 0.0


def penalty_gradient(
    v: np.ndarray,
    w: np.ndarray,
    gamma: float,
    kind: RegKind
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gradient (or subgradient) of the regularizer with respect to v and w

    The path-norm subgradient in v is taken as 0 at v = 0. w = 0 never occurs.
    """
    kind = RegKind(kind)
    if kind is RegKind.WEIGHT_DECAY:
        dv = np.array(v, dtype=float)
        dw = (gamma - 1.0) * np.abs(w) ** (2.0 * gamma - 3.0) * np.sign(w)
        return dv, dw
    if kind is RegKind.PATH_NORM:
        abs_w = np.abs(w)
        dv = np.sign(v) * abs_w ** (gamma - 1.0)
        dw = np.abs(v) * (gamma - 1.0) * abs_w ** (gamma - 2.0) * np.sign(w)
        return dv, dw
    return np.zeros_like(v, dtype=float), np.zeros_like(w, dtype=float)


def path_norm(params: "NetworkParams") -> float:
    """sum_k |v_k| |w_k|^(gamma-1)"""
    return penalty_value(params.v, params.w, params.activation.gamma, RegKind.PATH_NORM)


def weight_decay(params: "NetworkParams") -> float:
    """1/2 sum_k (v_k^2 + |w_k|^(2 gamma - 2))"""
    return penalty_value(params.v, params.w, params.activation.gamma, RegKind.WEIGHT_DECAY)


def theorem_objective(params: "NetworkParams") -> float:
    """sum_k |v_k| |g(w_k)| / |w_k| with g(w) = w^gamma"""
    if params.width == 0:
        return 0.0
    g = operator_dilation_factor(params.activation, params.w)
    return float(np.sum(np.abs(params.v) * np.abs(g) / np.abs(params.w)))


def seminorm_of_network(params: "NetworkParams", scale: Optional[float] = None) -> float:
    """
    ||D^gamma f_theta||_M computed exactly through the canonical spline

    Args:
        params: Network
        scale: Length scale for knot merging (data range); defaults to the knot span
    """
    from splinenet.core.model import reduce, to_canonical_spline
    from splinenet.splines.canonical import spline_seminorm

    return spline_seminorm(to_canonical_spline(reduce(params), scale=scale))


def matched_oracle_lambda(act: PowerActivation, lam: float) -> float:
    """
    Measure-norm weight equivalent to a path-norm weight lam

    sum r^2 + lam * PN equals sum r^2 + (lam / |c|) * ||D^gamma f||_M on
    balanced, reduced networks with distinct knots.
    """
    return lam / abs(green_constant(act))
