"""
Power activation functions

The (alpha, beta, gamma)-power activation is alpha * x^(gamma-1) for x < 0 and
beta * x^(gamma-1) for x >= 0. Up to the constant returned by green_constant it
is a Green's function of D^gamma, and every admissible activation has this form;
check_admissibility tests a sampled function for it.
"""
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union
import math

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import expit
from scipy.special import gamma as gamma_fn

from splinenet.config import settings
from splinenet.error_handling import DomainError, InputError, ParseError, UnsupportedError

ArrayOrFloat = Union[float, np.ndarray]


def _shaped(x_in: ArrayLike, values: np.ndarray) -> ArrayOrFloat:
    """Return a float for scalar input, the array otherwise"""
    if np.ndim(x_in) == 0:
        return float(values)
    return values


@dataclass(frozen=True)
class PowerActivation:
    """
    (alpha, beta, gamma)-power activation

    Attributes:
        alpha: Left-branch coefficient
        beta: Right-branch coefficient
        gamma: Order, >= 1
    """
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = float(getattr(self, name)) + 0.0
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

        if self.gamma < 1.0:
            raise DomainError(f"gamma must be >= 1, got {self.gamma}")
        if self.alpha == self.beta:
            raise DomainError("alpha equals beta: the activation has no Dirac part")
        if not self.is_integer_order and self.alpha != 0.0:
            raise DomainError("non-integer gamma requires alpha = 0")

    @property
    def is_integer_order(self) -> bool:
        return self.gamma.is_integer()

    @property
    def null_space_dim(self) -> int:
        """Number of generalized-bias coefficients, ceil(gamma)"""
        return math.ceil(self.gamma)

    def __call__(self, x: ArrayLike) -> ArrayOrFloat:
        return evaluate(self, x)

    def derivative(self, x: ArrayLike) -> ArrayOrFloat:
        return evaluate_derivative(self, x)

    def __str__(self) -> str:
        return format_activation(self)


def evaluate(act: PowerActivation, x: ArrayLike) -> ArrayOrFloat:
    """
    Evaluate the activation

    Args:
        act: Activation
        x: Scalar or array input

    Returns:
        alpha * x^(gamma-1) for x < 0, beta * x^(gamma-1) for x >= 0
    """
    x_arr = np.asarray(x, dtype=float)
    exponent = act.gamma - 1.0

    with np.errstate(invalid="ignore", divide="ignore"):
        right = act.beta * np.power(np.maximum(x_arr, 0.0), exponent)
        if act.is_integer_order and act.alpha != 0.0:
            left = act.alpha * np.power(np.minimum(x_arr, 0.0), exponent)
        else:
            # fractional orders have alpha = 0
            left = np.zeros_like(x_arr)

    return _shaped(x, np.where(x_arr < 0.0, left, right))


def evaluate_derivative(act: PowerActivation, x: ArrayLike) -> ArrayOrFloat:
    """
    Derivative of the activation, with rho'(0) = 0
    """
    x_arr = np.asarray(x, dtype=float)
    scale = act.gamma - 1.0
    if scale == 0.0:
        return _shaped(x, np.zeros_like(x_arr))

    exponent = act.gamma - 2.0
    with np.errstate(invalid="ignore", divide="ignore"):
        right = scale * act.beta * np.power(np.maximum(x_arr, 0.0), exponent)
        if act.is_integer_order and act.alpha != 0.0:
            left = scale * act.alpha * np.power(np.minimum(x_arr, 0.0), exponent)
        else:
            left = np.zeros_like(x_arr)

    values = np.where(x_arr < 0.0, left, np.where(x_arr > 0.0, right, 0.0))
    return _shaped(x, values)


def homogeneity_factor(act: PowerActivation, w: ArrayLike) -> ArrayOrFloat:
    """
    |w|^(gamma-1), the factor in rho(w x) = |w|^(gamma-1) rho(sgn(w) x)

    Raises:
        DomainError: If w = 0
    """
    w_arr = np.asarray(w, dtype=float)
    if np.any(w_arr == 0.0):
        raise DomainError("homogeneity factor is undefined at w = 0")
    return _shaped(w, np.power(np.abs(w_arr), act.gamma - 1.0))


def operator_dilation_factor(act: PowerActivation, w: ArrayLike) -> ArrayOrFloat:
    """
    g(w) = w^gamma, the dilation factor of D^gamma

    Raises:
        DomainError: If w = 0, or w < 0 with a fractional order
    """
    w_arr = np.asarray(w, dtype=float)
    if np.any(w_arr == 0.0):
        raise DomainError("dilation factor is undefined at w = 0")
    if not act.is_integer_order and np.any(w_arr < 0.0):
        raise DomainError("fractional dilation factor requires w > 0")
    return _shaped(w, np.power(w_arr, act.gamma))


def green_constant(act: PowerActivation) -> float:
    """
    c = (beta - alpha) * Gamma(gamma), so that D^gamma rho = c * delta
    """
    return float((act.beta - act.alpha) * gamma_fn(act.gamma))


def reflect(act: PowerActivation) -> Tuple[PowerActivation, int]:
    """
    Activation of the reflected input, rho(-x) = rho'(x)

    Returns:
        (rho', s) where s = (-1)^gamma is the sign picked up by the Dirac
        coefficient under reflection

    Raises:
        UnsupportedError: For non-integer gamma
    """
    if not act.is_integer_order:
        raise UnsupportedError("reflection is only defined for integer gamma")

    order = int(act.gamma)
    odd = -1.0 if (order - 1) % 2 else 1.0
    reflected = PowerActivation(odd * act.beta, odd * act.alpha, act.gamma)
    dirac_sign = -1 if order % 2 else 1
    return reflected, dirac_sign


def truncated_power(y: ArrayLike, gamma: float) -> ArrayOrFloat:
    """
    Normalized one-sided atom y_+^(gamma-1) / Gamma(gamma)

    D^gamma of this function is exactly delta; for gamma = 1 it is the unit step.
    """
    y_arr = np.asarray(y, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(y_arr >= 0.0, np.power(np.maximum(y_arr, 0.0), gamma - 1.0), 0.0)
    return _shaped(y, values / gamma_fn(gamma))


# ==================== Parsing ====================

ALIASES = ("relu", "leaky_relu:A", "tpow:G", "alpha,beta,gamma")


def parse_activation(text: str) -> PowerActivation:
    """
    Parse an activation spec

    Accepted forms: `relu`, `leaky_relu:A`, `tpow:G` (positive integer G) and
    `alpha,beta,gamma`.
    """
    spec = text.strip().lower()
    try:
        if spec == "relu":
            return PowerActivation(0.0, 1.0, 2.0)
        if spec.startswith("leaky_relu:"):
            return PowerActivation(float(spec.split(":", 1)[1]), 1.0, 2.0)
        if spec.startswith("tpow:"):
            order = float(spec.split(":", 1)[1])
            if not order.is_integer() or order < 1:
                raise ParseError(f"tpow order must be a positive integer, got {order}")
            return PowerActivation(0.0, 1.0 / math.factorial(int(order) - 1), order)

        parts = [p.strip() for p in spec.split(",")]
        if len(parts) != 3:
            raise ParseError(f"unrecognized activation '{text}', expected one of {', '.join(ALIASES)}")
        alpha, beta, gamma = (float(p) for p in parts)
        return PowerActivation(alpha, beta, gamma)
    except ValueError as e:
        if isinstance(e, DomainError):
            raise
        raise ParseError(f"invalid activation '{text}': {e}") from e


def format_activation(act: PowerActivation) -> str:
    """Inverse of parse_activation's triple form"""
    return f"{act.alpha!r},{act.beta!r},{act.gamma!r}"


# ==================== Admissibility ====================

@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the admissibility classifier"""
    admissible: bool
    fitted: Optional[PowerActivation]
    gamma_estimate: float
    max_residual: float
    rejection_reason: Optional[str] = None


@dataclass(frozen=True)
class _BranchFit:
    status: str  # "zero", "mixed" or "ok"
    slope: float = math.nan
    intercept: float = math.nan
    sign: float = 0.0
    linearity_residual: float = math.nan


def _fit_branch(magnitudes: np.ndarray, values: np.ndarray) -> _BranchFit:
    """Fit ln|rho| against ln|x| on one branch; only exact zeros count as a vanishing branch"""
    nonzero = values != 0.0
    if not nonzero.any():
        return _BranchFit("zero")

    signs = np.sign(values[nonzero])
    if not nonzero.all() or np.any(signs != signs[0]):
        return _BranchFit("mixed")

    t = np.log(magnitudes)
    if np.ptp(t) == 0.0:
        raise InputError("samples must span a range of magnitudes on each branch")
    profile = np.log(np.abs(values))
    slope, intercept = np.polyfit(t, profile, 1)

    predicted = signs[0] * np.exp(intercept + slope * t)
    residual = float(np.max(np.abs(values - predicted) / np.abs(values)))
    return _BranchFit("ok", float(slope), float(intercept), float(signs[0]), residual)


def _relative_error(actual: np.ndarray, predicted: np.ndarray) -> float:
    """Max relative error, absolute where the actual value is exactly zero"""
    denom = np.where(actual != 0.0, np.abs(actual), 1.0)
    return float(np.max(np.abs(actual - predicted) / denom))


def _branch_coefficient(x: np.ndarray, values: np.ndarray, exponent: float) -> float:
    """Least-squares coefficient c in values ~ c * x^exponent"""
    basis = np.power(x, exponent)
    return float(basis @ values / (basis @ basis))


def _reject(reason: str, gamma_estimate: float = math.nan, residual: float = math.inf) -> AdmissibilityReport:
    return AdmissibilityReport(
        admissible=False,
        fitted=None,
        gamma_estimate=gamma_estimate,
        max_residual=residual,
        rejection_reason=reason
    )


def check_admissibility(
    samples: Union[Sequence[Tuple[float, float]], np.ndarray],
    tolerance: Optional[float] = None
) -> AdmissibilityReport:
    """
    Decide whether sampled values come from a power activation

    P(t) = ln|rho(e^t)| must be affine in t with a constant sign per branch;
    its slope gives gamma - 1, the branch coefficients follow by least squares
    and the fitted activation must reproduce every sample (equivalently satisfy
    rho(w x) = |w|^(gamma-1) rho(sgn(w) x)) to the relative tolerance.

    Args:
        samples: (x, rho(x)) pairs covering both signs of x
        tolerance: Relative residual tolerance

    Returns:
        AdmissibilityReport

    Raises:
        InputError: On non-finite samples or samples missing a sign of x
    """
    tolerance = settings.admissibility_tolerance if tolerance is None else tolerance

    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InputError("samples must be (x, rho(x)) pairs")
    if not np.all(np.isfinite(arr)):
        raise InputError("samples contain non-finite values")

    x, values = arr[:, 0], arr[:, 1]
    pos, neg = x > 0.0, x < 0.0
    if pos.sum() < 2 or neg.sum() < 2:
        raise InputError("samples must cover both signs of x")

    if not np.any(values):
        return _reject("activation vanishes identically")

    right = _fit_branch(x[pos], values[pos])
    left = _fit_branch(-x[neg], values[neg])
    if right.status == "mixed":
        return _reject("sign of rho is not constant on x > 0")
    if left.status == "mixed":
        return _reject("sign of rho is not constant on x < 0")

    source = right if right.status == "ok" else left
    gamma_estimate = source.slope + 1.0
    if source.linearity_residual > tolerance:
        return _reject(
            "ln rho(e^t) is not affine: its finite difference depends on t",
            gamma_estimate,
            source.linearity_residual
        )
    if gamma_estimate < 1.0 - tolerance:
        return _reject("fitted order is below 1", gamma_estimate, source.linearity_residual)

    gamma = gamma_estimate
    if abs(gamma - round(gamma)) <= 1e-8 * max(1.0, abs(gamma)):
        gamma = float(round(gamma))
    gamma = max(gamma, 1.0)
    exponent = gamma - 1.0

    beta = 0.0 if right.status == "zero" else _branch_coefficient(x[pos], values[pos], exponent)
    if left.status == "zero":
        alpha = 0.0
    elif gamma.is_integer():
        alpha = _branch_coefficient(x[neg], values[neg], exponent)
    else:
        return _reject(
            "fractional order requires a vanishing left branch",
            gamma_estimate,
            source.linearity_residual
        )

    if abs(alpha - beta) <= tolerance * max(abs(alpha), abs(beta)):
        return _reject("alpha equals beta: no Dirac part", gamma_estimate, source.linearity_residual)

    fitted = PowerActivation(alpha, beta, gamma)
    predicted = evaluate(fitted, x)
    residual = _relative_error(values, predicted)
    if residual > tolerance:
        return _reject("functional-equation residual exceeds tolerance", gamma_estimate, residual)

    return AdmissibilityReport(
        admissible=True,
        fitted=fitted,
        gamma_estimate=gamma_estimate,
        max_residual=residual
    )


def sample_activation(
    fn: Callable[[np.ndarray], ArrayLike],
    points: Optional[int] = None,
    log_range: Optional[float] = None
) -> np.ndarray:
    """
    Sample fn on x = +-e^t, t uniform on [-log_range, log_range]

    Returns:
        Array of shape (2 * points, 2) with columns x, fn(x)
    """
    points = points or settings.admissibility_points
    log_range = settings.admissibility_log_range if log_range is None else log_range

    t = np.linspace(-log_range, log_range, points)
    x = np.concatenate([-np.exp(t[::-1]), np.exp(t)])
    values = np.asarray(fn(x), dtype=float)
    if values.shape != x.shape:
        values = np.array([float(fn(xi)) for xi in x])
    return np.column_stack([x, values])


CROSS_VALIDATION_DILATIONS = (-2.0, -0.5, 0.5, 2.0)


def check_admissibility_of(
    fn: Callable[[np.ndarray], ArrayLike],
    tolerance: Optional[float] = None
) -> AdmissibilityReport:
    """
    Sample a callable, classify it, then cross-validate the dilation identity
    rho(w x) = |w|^(gamma-1) rho(sgn(w) x) at a few w directly on fn
    """
    tolerance = settings.admissibility_tolerance if tolerance is None else tolerance
    samples = sample_activation(fn)
    report = check_admissibility(samples, tolerance)
    if not report.admissible:
        return report

    x = samples[:, 0]
    residual = report.max_residual
    for w in CROSS_VALIDATION_DILATIONS:
        lhs = np.asarray(fn(w * x), dtype=float)
        rhs = abs(w) ** (report.fitted.gamma - 1.0) * np.asarray(fn(np.sign(w) * x), dtype=float)
        residual = max(residual, _relative_error(lhs, rhs))

    if residual > tolerance:
        return _reject("dilation identity fails on the cross-validation grid", report.gamma_estimate, residual)
    return AdmissibilityReport(True, report.fitted, report.gamma_estimate, residual)


# Non-power reference functions for the admissibility command
NAMED_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "tanh": np.tanh,
    "sigmoid": expit,
    "softplus": lambda x: np.logaddexp(0.0, x),
    "square": np.square,
}
