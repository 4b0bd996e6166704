"""
Full-batch AdaGrad training of power-activation networks

Minimizes sum_n (f(x_n) - y_n)^2 + lambda * R(theta) with R the weight-decay
or path-norm regularizer.
"""
from dataclasses import dataclass
from typing import NamedTuple, Tuple
import logging

import numpy as np

from splinenet.config import PROGRESS_LOGGER
from splinenet.core.dataset import Dataset
from splinenet.core.model import (
    NetworkParams,
    forward,
    objective_terms,
    vandermonde,
)
from splinenet.core.regularizers import RegKind, penalty_value
from splinenet.error_handling import DomainError, TrainingError
from splinenet.models.schemas import TrainConfig
from splinenet.training.optimizer import AdaGrad

logger = logging.getLogger(__name__)
progress_logger = logging.getLogger(PROGRESS_LOGGER)

# lower bound on w for fractional activations
W_FLOOR = 1e-8


@dataclass(frozen=True, eq=False)
class TrainHistory:
    """
    Per-epoch objective records, measured before each update

    Attributes:
        data_loss: Sum of squared residuals
        reg: Regularizer value (0 when reg is none)
        objective: data_loss + lambda * reg
    """
    data_loss: np.ndarray
    reg: np.ndarray
    objective: np.ndarray

    @classmethod
    def allocate(cls, epochs: int) -> "TrainHistory":
        return cls(np.zeros(epochs), np.zeros(epochs), np.zeros(epochs))

    def __len__(self) -> int:
        return int(self.objective.size)

    def tail(self, fraction: float = 0.1) -> np.ndarray:
        """Objective over the trailing fraction of epochs"""
        count = max(1, int(round(fraction * len(self))))
        return self.objective[-count:]


class TrainResult(NamedTuple):
    params: NetworkParams
    history: TrainHistory


def init(config: TrainConfig, x_range: Tuple[float, float]) -> NetworkParams:
    """
    Seeded initialization

    w_k uniform on [-s, s] without 0 (positive for fractional gamma), knots
    b_k / w_k uniform over x_range, v_k uniform on [-c s / sqrt(K), c s / sqrt(K)]
    with c = config.output_scale,
    polynomial zero.
    """
    act = config.activation
    scale = config.init_scale
    width = config.width
    low, high = x_range
    rng = np.random.default_rng(config.seed)

    w = rng.uniform(-scale, scale, width)
    if not act.is_integer_order:
        w = np.abs(w)
    w[w == 0.0] = scale
    knots = rng.uniform(low, high, width)
    v = rng.uniform(-scale, scale, width) * config.output_scale / np.sqrt(width)

    return NetworkParams(act, v, w, w * knots, np.zeros(act.null_space_dim))


def loss(params: NetworkParams, dataset: Dataset, lam: float, reg: RegKind) -> float:
    """Squared-error sum plus lam times the regularizer"""
    if lam < 0.0:
        raise DomainError(f"lambda must be >= 0, got {lam}")
    residual = forward(params, dataset.x) - dataset.y
    data_term = float(residual @ residual)
    if RegKind(reg) is RegKind.NONE or lam == 0.0:
        return data_term
    return data_term + lam * penalty_value(params.v, params.w, params.activation.gamma, reg)


def train(config: TrainConfig, dataset: Dataset) -> TrainResult:
    """
    Train for config.epochs full-batch AdaGrad epochs from init(config)

    Returns:
        TrainResult(params, history)

    Raises:
        TrainingError: If the objective becomes NaN or infinite
    """
    act = config.activation
    lam = config.lam
    reg = RegKind(config.reg)
    recommended = dataset.size - act.null_space_dim
    if config.width < recommended:
        logger.warning(
            "Width %d is below N - N0 = %d; the network may not reach the spline minimum",
            config.width,
            recommended
        )

    params = init(config, dataset.x_range)
    width = params.width
    theta = params.to_vector()
    w_view = theta[width:2 * width]
    vander = vandermonde(dataset.x, act)
    optimizer = AdaGrad(theta.size, config.epsilon)
    history = TrainHistory.allocate(config.epochs)
    fractional = not act.is_integer_order

    logger.info(
        "Training %s network: K=%d, lambda=%g, reg=%s, epochs=%d",
        act, width, lam, reg.value, config.epochs
    )

    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(config.epochs):
            data_loss, reg_value, grad = objective_terms(
                act, theta, width, dataset.x, dataset.y, vander, reg, lam
            )
            objective = data_loss + lam * reg_value
            if not np.isfinite(objective) or not np.all(np.isfinite(grad)):
                raise TrainingError("objective diverged", epoch=epoch + 1)

            history.data_loss[epoch] = data_loss
            history.reg[epoch] = reg_value
            history.objective[epoch] = objective
            if config.log_every and (epoch + 1) % config.log_every == 0:
                progress_logger.info("%d,%.17g,%.17g,%.17g", epoch + 1, data_loss, reg_value, objective)

            optimizer.step(theta, grad, config.learning_rate)
            if fractional:
                np.maximum(w_view, W_FLOOR, out=w_view)
            else:
                w_view[w_view == 0.0] = W_FLOOR

    if not np.all(np.isfinite(theta)):
        raise TrainingError("parameters diverged", epoch=config.epochs)

    final = NetworkParams.from_vector(act, theta, width)
    logger.info("Training finished: objective %.6g", history.objective[-1])
    return TrainResult(final, history)
