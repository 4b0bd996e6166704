"""
AdaGrad optimizer

Per coordinate: G <- G + g^2, p <- p - lr * g / (sqrt(G) + eps).
"""
from typing import Tuple

import numpy as np

from splinenet.core.model import Gradient, NetworkParams, split_vector


def _apply(theta: np.ndarray, accum: np.ndarray, grad: np.ndarray, learning_rate: float, epsilon: float) -> None:
    accum += grad * grad
    theta -= learning_rate * grad / (np.sqrt(accum) + epsilon)


def adagrad_update(
    theta: np.ndarray,
    accum: np.ndarray,
    grad: np.ndarray,
    learning_rate: float,
    epsilon: float
) -> Tuple[np.ndarray, np.ndarray]:
    """One AdaGrad update on flat arrays; inputs are not modified"""
    theta = np.array(theta, dtype=float)
    accum = np.array(accum, dtype=float)
    _apply(theta, accum, np.asarray(grad, dtype=float), learning_rate, epsilon)
    return theta, accum


class AdaGrad:
    """
    Stateful AdaGrad over a flat parameter vector

    Attributes:
        epsilon: Denominator offset
        accum: Running sum of squared gradients
    """

    def __init__(self, num_params: int, epsilon: float):
        self.epsilon = epsilon
        self.accum = np.zeros(num_params)

    def step(self, theta: np.ndarray, grad: np.ndarray, learning_rate: float) -> None:
        """Update theta in place"""
        _apply(theta, self.accum, grad, learning_rate, self.epsilon)


def adagrad_step(
    params: NetworkParams,
    accumulators: np.ndarray,
    grad: Gradient,
    learning_rate: float,
    epsilon: float
) -> Tuple[NetworkParams, np.ndarray]:
    """
    AdaGrad step on a network

    Args:
        params: Current parameters
        accumulators: Squared-gradient sums, flat in the order of NetworkParams.to_vector
        grad: Gradient at params
        learning_rate: Step size
        epsilon: Denominator offset

    Returns:
        (updated params, updated accumulators)

    Raises:
        ValueError: If the accumulator length does not match the parameters
    """
    theta = params.to_vector()
    accumulators = np.asarray(accumulators, dtype=float)
    if accumulators.shape != theta.shape:
        raise ValueError(
            f"accumulator shape {accumulators.shape} does not match parameters {theta.shape}"
        )
    theta, accumulators = adagrad_update(theta, accumulators, grad.to_vector(), learning_rate, epsilon)
    v, w, b, poly = split_vector(theta, params.width)
    return params.with_arrays(v=v, w=w, b=b, poly=poly), accumulators
