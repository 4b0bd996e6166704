"""
Shared fixtures
"""
import numpy as np
import pytest

from splinenet.core.activations import PowerActivation
from splinenet.core.dataset import Dataset
from splinenet.core.model import NetworkParams


@pytest.fixture
def relu() -> PowerActivation:
    return PowerActivation(0.0, 1.0, 2.0)


@pytest.fixture
def cubic() -> PowerActivation:
    return PowerActivation(0.0, 1.0, 4.0)


@pytest.fixture
def hat() -> Dataset:
    return Dataset([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def random_network(
    rng: np.random.Generator,
    act: PowerActivation,
    width: int = 6,
    positive_w: bool = False
) -> NetworkParams:
    """Random network with |w| bounded away from zero"""
    w = rng.uniform(0.3, 2.0, width)
    if not positive_w:
        w *= rng.choice([-1.0, 1.0], width)
    knots = rng.uniform(-1.0, 1.0, width)
    return NetworkParams(
        act,
        rng.normal(size=width),
        w,
        w * knots,
        rng.normal(size=act.null_space_dim),
    )
