"""
Tests for AdaGrad and the full-batch trainer
"""
import logging

import numpy as np
import pytest
from pydantic import ValidationError

from splinenet.config import PROGRESS_LOGGER
from splinenet.core.activations import PowerActivation
from splinenet.core.dataset import Dataset
from splinenet.core.model import Gradient, balance, forward, gradient, zero_network
from splinenet.core.regularizers import RegKind, path_norm, seminorm_of_network, weight_decay
from splinenet.error_handling import DomainError, TrainingError
from splinenet.experiments.datasets import generate_dataset
from splinenet.models.schemas import TrainConfig
from splinenet.splines import connect_the_dots, spline_seminorm
from splinenet.training import AdaGrad, adagrad_step, adagrad_update, init, loss, train
from splinenet.training.trainer import W_FLOOR

from conftest import random_network


class TestAdaGrad:
    def test_first_step_has_size_learning_rate(self):
        theta, accum = adagrad_update(np.array([0.0]), np.array([0.0]), np.array([3.0]), 0.1, 0.0)
        assert accum[0] == 9.0
        assert theta[0] == pytest.approx(-0.1)

    def test_zero_gradient_leaves_parameters(self):
        theta, accum = adagrad_update(np.array([1.5]), np.array([0.0]), np.array([0.0]), 0.1, 1e-10)
        assert theta[0] == 1.5
        assert accum[0] == 0.0

    def test_steps_shrink(self):
        theta, accum = np.array([0.0]), np.array([0.0])
        theta, accum = adagrad_update(theta, accum, np.array([1.0]), 0.1, 0.0)
        first = theta[0]
        theta, accum = adagrad_update(theta, accum, np.array([1.0]), 0.1, 0.0)
        assert first == pytest.approx(-0.1)
        assert theta[0] - first == pytest.approx(-0.1 / np.sqrt(2.0))
        assert theta[0] - first == pytest.approx(-0.0707, abs=1e-4)

    def test_update_does_not_mutate(self):
        theta, accum = np.array([1.0]), np.array([0.0])
        adagrad_update(theta, accum, np.array([2.0]), 0.1, 0.0)
        assert theta[0] == 1.0 and accum[0] == 0.0

    def test_stateful_matches_functional(self, rng):
        optimizer = AdaGrad(4, 1e-10)
        theta = rng.normal(size=4)
        reference, accum = theta.copy(), np.zeros(4)
        for _ in range(5):
            grad = rng.normal(size=4)
            optimizer.step(theta, grad, 0.05)
            reference, accum = adagrad_update(reference, accum, grad, 0.05, 1e-10)
        np.testing.assert_array_equal(theta, reference)
        np.testing.assert_array_equal(optimizer.accum, accum)

    def test_network_step(self, relu, hat, rng):
        params = random_network(rng, relu, width=3)
        grad = gradient(params, hat, 0.1, RegKind.WEIGHT_DECAY)
        stepped, accum = adagrad_step(params, np.zeros(params.to_vector().size), grad, 0.01, 1e-10)
        expected, _ = adagrad_update(params.to_vector(), np.zeros_like(accum), grad.to_vector(), 0.01, 1e-10)
        np.testing.assert_array_equal(stepped.to_vector(), expected)
        np.testing.assert_array_equal(accum, grad.to_vector() ** 2)

    def test_network_step_shape_mismatch(self, relu):
        params = zero_network(relu)
        grad = Gradient(np.zeros(0), np.zeros(0), np.zeros(0), np.zeros(2))
        with pytest.raises(ValueError):
            adagrad_step(params, np.zeros(5), grad, 0.01, 1e-10)


class TestInit:
    def test_deterministic(self):
        config = TrainConfig(width=10, seed=7, activation="relu")
        first, second = init(config, (0.0, 1.0)), init(config, (0.0, 1.0))
        np.testing.assert_array_equal(first.to_vector(), second.to_vector())
        other = init(TrainConfig(width=10, seed=8, activation="relu"), (0.0, 1.0))
        assert not np.array_equal(first.to_vector(), other.to_vector())

    def test_knots_inside_range(self):
        params = init(TrainConfig(width=50, seed=1, init_scale=2.0, output_scale=0.5), (-2.0, 3.0))
        assert np.all((params.w != 0.0) & (np.abs(params.w) <= 2.0))
        assert np.all((params.knots >= -2.0) & (params.knots <= 3.0))
        np.testing.assert_array_equal(params.poly, 0.0)
        assert np.max(np.abs(params.v)) <= 1.0 / np.sqrt(50)

    def test_fractional_weights_positive(self):
        params = init(TrainConfig(width=20, activation="0,1,2.5"), (0.0, 1.0))
        assert np.all(params.w > 0.0)
        assert params.poly.size == 3


class TestLoss:
    def test_zero_network(self, relu):
        data = Dataset([0.0, 1.0], [1.0, 2.0])
        assert loss(zero_network(relu), data, 0.0, RegKind.NONE) == 5.0
        assert loss(zero_network(relu), data, 3.0, RegKind.WEIGHT_DECAY) == 5.0

    def test_adds_penalty(self, relu, hat, rng):
        params = random_network(rng, relu, width=3)
        plain = loss(params, hat, 0.0, RegKind.WEIGHT_DECAY)
        penalized = loss(params, hat, 0.5, RegKind.WEIGHT_DECAY)
        expected = 0.25 * np.sum(params.v ** 2 + params.w ** 2)
        assert penalized - plain == pytest.approx(expected)

    def test_negative_lambda(self, relu, hat):
        with pytest.raises(DomainError):
            loss(zero_network(relu), hat, -0.1, RegKind.NONE)


class TestConfig:
    def test_aliases(self):
        config = TrainConfig.model_validate({"K": 12, "lambda": 0.5, "activation": "0,1,4"})
        assert config.width == 12
        assert config.lam == 0.5
        assert config.activation == PowerActivation(0, 1, 4)

    def test_rejects_minibatch(self):
        with pytest.raises(ValidationError):
            TrainConfig(full_batch=False)

    def test_rejects_unknown_field(self):
        with pytest.raises(ValidationError):
            TrainConfig(batch_size=4)

    def test_serializes_activation(self):
        dumped = TrainConfig(activation="relu").model_dump(mode="json", by_alias=True)
        assert dumped["activation"] == "0.0,1.0,2.0"
        assert dumped["reg"] == "weight_decay"


class TestTrain:
    def test_history_and_determinism(self, hat):
        config = TrainConfig(width=5, lam=1e-3, epochs=300, learning_rate=0.05, seed=3)
        first, second = train(config, hat), train(config, hat)
        assert len(first.history) == 300
        np.testing.assert_array_equal(first.history.objective, second.history.objective)
        np.testing.assert_array_equal(first.params.to_vector(), second.params.to_vector())
        np.testing.assert_allclose(
            first.history.objective,
            first.history.data_loss + 1e-3 * first.history.reg,
            rtol=1e-12
        )
        assert first.history.objective[-1] < first.history.objective[0]
        assert first.history.tail(0.1).size == 30

    def test_first_record_is_initial_objective(self, hat):
        config = TrainConfig(width=4, lam=0.1, epochs=5, seed=2)
        result = train(config, hat)
        assert result.history.objective[0] == pytest.approx(loss(init(config, hat.x_range), hat, 0.1, RegKind.WEIGHT_DECAY))

    def test_unregularized_records_no_penalty(self, hat):
        config = TrainConfig(width=4, lam=0.0, reg="none", epochs=20)
        result = train(config, hat)
        np.testing.assert_array_equal(result.history.reg, 0.0)

    def test_divergence_raises(self, hat):
        config = TrainConfig(width=4, lam=0.0, epochs=20, learning_rate=1e150, activation="0,1,4")
        with pytest.raises(TrainingError) as exc:
            train(config, hat)
        assert exc.value.epoch is not None

    def test_fractional_weights_stay_positive(self, hat):
        config = TrainConfig(width=6, lam=1e-3, epochs=200, learning_rate=0.5, activation="0,1,2.5")
        result = train(config, hat)
        assert np.all(result.params.w >= W_FLOOR)

    def test_progress_lines(self, hat, caplog):
        progress = logging.getLogger(PROGRESS_LOGGER)
        progress.addHandler(caplog.handler)
        config = TrainConfig(width=3, epochs=10, log_every=5)
        try:
            with caplog.at_level(logging.INFO, logger=PROGRESS_LOGGER):
                train(config, hat)
        finally:
            progress.removeHandler(caplog.handler)
        lines = [r.getMessage() for r in caplog.records if r.name == PROGRESS_LOGGER]
        assert [line.split(",")[0] for line in lines] == ["5", "10"]
        assert all(len(line.split(",")) == 4 for line in lines)

    def test_narrow_network_warns(self, caplog):
        data = Dataset(np.linspace(0, 1, 6), np.arange(6.0) ** 2)
        with caplog.at_level(logging.WARNING, logger="splinenet.training.trainer"):
            train(TrainConfig(width=2, epochs=2), data)
        assert any("below N - N0" in r.getMessage() for r in caplog.records)


@pytest.fixture(scope="module")
def interpolating_networks():
    """Unregularized K = 200 ReLU fits of a few five-point datasets"""
    fits = {}
    for seed in (0, 2, 4, 7):
        data = generate_dataset(5, seed=seed)
        config = TrainConfig(width=200, lam=0.0, reg="none", epochs=20_000, activation="relu")
        fits[seed] = (data, train(config, data).params)
    return fits


class TestTrainingOutcomes:
    def test_two_points_fit_by_a_line(self):
        data = Dataset([0.0, 1.0], [0.0, 1.0])
        params, _ = train(TrainConfig(width=10, lam=1e-5, epochs=5000, activation="relu"), data)
        assert np.max(np.abs(forward(params, data.x) - data.y)) <= 1e-2
        assert abs(path_norm(params) - 1.0) <= 0.1

    @pytest.mark.parametrize("seed", [0, 2, 4, 7])
    def test_overparametrized_network_interpolates(self, interpolating_networks, seed):
        data, params = interpolating_networks[seed]
        assert loss(params, data, 0.0, RegKind.NONE) <= 1e-4

    @pytest.mark.parametrize("seed", [0, 2, 7])
    def test_no_interpolant_beats_connect_the_dots(self, interpolating_networks, seed):
        data, params = interpolating_networks[seed]
        assert np.max(np.abs(forward(params, data.x) - data.y)) <= 1e-6
        reference = spline_seminorm(connect_the_dots(data))
        assert reference <= seminorm_of_network(params, scale=data.span) + 1e-6

    def test_balance_closes_the_weight_decay_gap(self, hat):
        params, _ = train(TrainConfig(width=8, lam=1e-5, epochs=2000, seed=1), hat)
        assert weight_decay(params) >= path_norm(params)
        assert weight_decay(balance(params)) - path_norm(params) <= 1e-8
