"""
Synthetic datasets for experiments
"""
import numpy as np

from splinenet.core.dataset import Dataset
from splinenet.error_handling import InputError


def target(x: np.ndarray) -> np.ndarray:
    """Piecewise-smooth reference function: a sine plus a ramp kinked at 0.6"""
    x = np.asarray(x, dtype=float)
    return np.sin(2.0 * np.pi * x) + 3.0 * np.maximum(x - 0.6, 0.0)


def generate_dataset(n: int, seed: int = 0, noise: float = 0.0) -> Dataset:
    """
    n samples with x uniform on [0, 1] and y = target(x) + noise * N(0, 1)

    Raises:
        InputError: If n < 2 or noise < 0
    """
    if n < 2:
        raise InputError(f"a dataset needs at least 2 samples, got {n}")
    if noise < 0.0:
        raise InputError(f"noise must be >= 0, got {noise}")

    rng = np.random.default_rng(seed)
    x = np.unique(rng.uniform(0.0, 1.0, n))
    while x.size < n:
        x = np.unique(np.concatenate([x, rng.uniform(0.0, 1.0, n - x.size)]))

    y = target(x)
    if noise > 0.0:
        y = y + noise * rng.standard_normal(n)
    return Dataset(x, y)
