"""
Tests for the network model: forward, gradient, rescaling and canonical form
"""
import numpy as np
import pytest

from splinenet.core.activations import PowerActivation
from splinenet.core.dataset import Dataset
from splinenet.core.model import (
    NetworkParams,
    balance,
    forward,
    gradient,
    reduce,
    rescale_neuron,
    to_canonical_spline,
    zero_network,
)
from splinenet.core.regularizers import RegKind, path_norm, seminorm_of_network, weight_decay
from splinenet.error_handling import DomainError
from splinenet.splines.canonical import eval_spline, spline_seminorm
from splinenet.training.trainer import loss

from conftest import random_network


def net(act, v, w, b, poly=None):
    poly = np.zeros(act.null_space_dim) if poly is None else poly
    return NetworkParams(act, v, w, b, poly)


class TestParams:
    def test_rejects_zero_weight(self, relu):
        with pytest.raises(DomainError):
            net(relu, [1.0], [0.0], [0.0])

    def test_rejects_wrong_poly_length(self, cubic):
        with pytest.raises(DomainError):
            net(cubic, [1.0], [1.0], [0.0], [0.0, 0.0])

    def test_fractional_needs_positive_w(self):
        act = PowerActivation(0, 1, 2.5)
        with pytest.raises(DomainError):
            net(act, [1.0], [-1.0], [0.0])

    def test_vector_round_trip(self, rng, cubic):
        params = random_network(rng, cubic)
        back = NetworkParams.from_vector(cubic, params.to_vector(), params.width)
        np.testing.assert_array_equal(back.to_vector(), params.to_vector())

    def test_arrays_are_read_only(self, relu):
        params = net(relu, [1.0], [1.0], [0.0])
        with pytest.raises(ValueError):
            params.v[0] = 2.0


class TestForward:
    def test_single_relu(self, relu):
        assert forward(net(relu, [1.0], [1.0], [0.0]), 2.0) == 2.0

    def test_cancellation(self, relu):
        params = net(relu, [1.0, -1.0], [1.0, 1.0], [0.0, 0.0])
        np.testing.assert_array_equal(forward(params, np.linspace(-2, 2, 9)), 0.0)

    def test_polynomial_part(self, relu):
        params = net(relu, [2.0], [-1.0], [1.0], [3.0, 1.0])
        assert forward(params, 0.0) == 3.0

    def test_zero_network(self, cubic):
        params = zero_network(cubic)
        assert params.width == 0
        assert forward(params, 1.5) == 0.0


class TestGradient:
    def test_zero_at_interpolation(self, relu):
        params = net(relu, [1.0], [1.0], [-1.0])
        data = Dataset([0.0, 2.0], [1.0, 3.0])
        grad = gradient(params, data, 0.0, RegKind.WEIGHT_DECAY)
        np.testing.assert_allclose(grad.to_vector(), 0.0, atol=1e-12)

    def test_weight_decay_part(self, relu):
        params = net(relu, [1.0], [1.0], [-1.0])
        data = Dataset([0.0, 2.0], [1.0, 3.0])
        grad = gradient(params, data, 2.0, RegKind.WEIGHT_DECAY)
        np.testing.assert_allclose(grad.dv, [2.0])
        np.testing.assert_allclose(grad.dw, [2.0])
        np.testing.assert_allclose(grad.db, [0.0], atol=1e-12)

    def test_negative_lambda(self, relu, hat):
        with pytest.raises(DomainError):
            gradient(net(relu, [1.0], [1.0], [0.0]), hat, -1.0, RegKind.WEIGHT_DECAY)

    @pytest.mark.parametrize("gamma", [2.0, 4.0])
    @pytest.mark.parametrize("reg", [RegKind.WEIGHT_DECAY, RegKind.PATH_NORM, RegKind.NONE])
    def test_matches_finite_differences(self, gamma, reg):
        rng = np.random.default_rng(int(gamma) * 10 + len(reg.value))
        act = PowerActivation(0.0, 1.0, gamma)
        h = 1e-6
        checked = 0
        for _ in range(20):
            params = random_network(rng, act, width=4)
            x = np.sort(rng.uniform(-1.0, 1.0, 5))
            data = Dataset(x, rng.normal(size=5))
            lam = 0.3

            # skip draws with a data site next to a kink
            pre = np.multiply.outer(x, params.w) - params.b
            if np.min(np.abs(pre)) < 1e-3:
                continue

            analytic = gradient(params, data, lam, reg).to_vector()
            theta = params.to_vector()
            numeric = np.empty_like(theta)
            for i in range(theta.size):
                up, down = theta.copy(), theta.copy()
                up[i] += h
                down[i] -= h
                f_up = loss(NetworkParams.from_vector(act, up, params.width), data, lam, reg)
                f_down = loss(NetworkParams.from_vector(act, down, params.width), data, lam, reg)
                numeric[i] = (f_up - f_down) / (2 * h)

            scale = np.maximum(np.abs(numeric), 1.0)
            assert np.max(np.abs(analytic - numeric) / scale) <= 1e-5
            checked += 1
        assert checked >= 10


class TestRescaling:
    def test_identity(self, relu):
        params = net(relu, [4.0], [1.0], [0.5])
        out = rescale_neuron(params, 0, 1.0)
        np.testing.assert_array_equal(out.to_vector(), params.to_vector())

    def test_relu_example(self, relu):
        out = rescale_neuron(net(relu, [4.0], [1.0], [0.0]), 0, 2.0)
        np.testing.assert_allclose([out.v[0], out.w[0], out.b[0]], [2.0, 2.0, 0.0])

    def test_cubic_example(self, cubic):
        params = net(cubic, [8.0], [1.0], [1.0])
        out = rescale_neuron(params, 0, 2.0)
        np.testing.assert_allclose([out.v[0], out.w[0], out.b[0]], [1.0, 2.0, 2.0])
        x = np.linspace(-2, 3, 100)
        np.testing.assert_allclose(forward(out, x), forward(params, x), rtol=1e-12, atol=1e-12)

    def test_rejects_non_positive(self, relu):
        with pytest.raises(DomainError):
            rescale_neuron(net(relu, [1.0], [1.0], [0.0]), 0, 0.0)
        with pytest.raises(DomainError):
            rescale_neuron(net(relu, [1.0], [1.0], [0.0]), 0, -1.0)


class TestBalance:
    def test_relu_example(self, relu):
        out = balance(net(relu, [4.0], [1.0], [0.0]))
        assert out.v[0] == pytest.approx(2.0)
        assert out.w[0] == pytest.approx(2.0)
        assert weight_decay(out) == pytest.approx(4.0)
        assert path_norm(out) == pytest.approx(4.0)

    def test_cubic_example(self, cubic):
        out = balance(net(cubic, [16.0], [1.0], [0.0]))
        assert abs(out.v[0]) == pytest.approx(4.0)
        assert abs(out.w[0]) ** 3 == pytest.approx(4.0)
        assert weight_decay(out) == pytest.approx(16.0)
        assert path_norm(out) == pytest.approx(16.0)

    def test_balanced_unchanged(self, relu):
        params = net(relu, [2.0, -3.0], [2.0, -3.0], [0.0, 1.0])
        np.testing.assert_allclose(balance(params).to_vector(), params.to_vector())

    def test_zero_output_weight_left_alone(self, cubic):
        params = net(cubic, [0.0, 1.0], [3.0, 1.0], [1.0, 0.0])
        out = balance(params)
        assert out.w[0] == 3.0
        assert out.v[0] == 0.0

    @pytest.mark.parametrize("gamma", [2.0, 3.0, 4.0])
    def test_weight_decay_bounds_path_norm(self, gamma, rng):
        act = PowerActivation(0.0, 1.0, gamma)
        x = np.linspace(-3, 3, 1000)
        for _ in range(100):
            params = random_network(rng, act, width=5)
            assert weight_decay(params) >= path_norm(params) - 1e-12
            balanced = balance(params)
            assert weight_decay(balanced) == pytest.approx(path_norm(balanced), abs=1e-12, rel=1e-12)
            assert path_norm(balanced) == pytest.approx(path_norm(params), rel=1e-12)
            before, after = forward(params, x), forward(balanced, x)
            assert np.max(np.abs(after - before)) <= 1e-10 * (1 + np.max(np.abs(before)))


class TestReduce:
    def test_merges_duplicates(self, relu):
        out = reduce(net(relu, [1.0, 2.0], [1.0, 1.0], [0.0, 0.0]))
        assert out.width == 1
        assert out.v[0] == 3.0

    def test_cancellation(self, relu):
        out = reduce(net(relu, [1.0, -1.0], [1.0, 1.0], [0.0, 0.0], [0.5, 0.0]))
        assert out.width == 0
        np.testing.assert_array_equal(out.poly, [0.5, 0.0])

    def test_distinct_unchanged(self, rng, relu):
        params = random_network(rng, relu)
        out = reduce(params)
        assert out.width == params.width
        x = np.linspace(-3, 3, 1000)
        np.testing.assert_allclose(forward(out, x), forward(params, x), rtol=1e-10, atol=1e-10)

    def test_drops_zero_output(self, relu):
        out = reduce(net(relu, [0.0, 1.0], [1.0, 2.0], [0.0, 1.0]))
        assert out.width == 1


class TestCanonicalSpline:
    def test_cancellation(self, relu):
        spline = to_canonical_spline(net(relu, [1.0, -1.0], [1.0, 1.0], [0.0, 0.0]))
        assert spline_seminorm(spline) == 0.0
        assert seminorm_of_network(net(relu, [1.0, -1.0], [1.0, 1.0], [0.0, 0.0])) == 0.0

    def test_scaled_knot(self, relu):
        spline = to_canonical_spline(net(relu, [1.0], [2.0], [2.0]))
        np.testing.assert_allclose(spline.knots, [1.0])
        np.testing.assert_allclose(spline.coeffs, [2.0])

    def test_negative_weight(self, relu):
        params = net(relu, [1.0], [-1.0], [0.0])
        spline = to_canonical_spline(params)
        np.testing.assert_allclose(spline.knots, [0.0])
        np.testing.assert_allclose(spline.coeffs, [1.0])
        np.testing.assert_allclose(spline.poly, [0.0, -1.0], atol=1e-15)

    @pytest.mark.parametrize("act", [(0, 1, 2), (0.01, 1, 2), (0, 1, 3), (0, 1, 4), (-0.5, 2, 4)])
    def test_fidelity(self, act, rng):
        act = PowerActivation(*act)
        x = np.linspace(-4, 4, 801)
        for _ in range(50):
            params = random_network(rng, act)
            expected = forward(params, x)
            got = eval_spline(to_canonical_spline(params), x)
            assert np.max(np.abs(got - expected)) <= 1e-9 * (1 + np.max(np.abs(expected)))

    def test_fractional_fidelity(self, rng):
        act = PowerActivation(0, 1, 2.5)
        params = random_network(rng, act, positive_w=True)
        x = np.linspace(-3, 3, 301)
        expected = forward(params, x)
        got = eval_spline(to_canonical_spline(params), x)
        assert np.max(np.abs(got - expected)) <= 1e-9 * (1 + np.max(np.abs(expected)))

    def test_fractional_negative_weight_rejected(self):
        params = net(PowerActivation(0, 1, 2.5), [1.0], [1.0], [0.0])
        with pytest.raises(DomainError):
            params.with_arrays(w=np.array([-1.0]))

    def test_seminorm_consistency(self, rng, cubic):
        params = reduce(random_network(rng, cubic))
        spline = to_canonical_spline(params)
        expected = 6.0 * np.sum(np.abs(params.v) * np.abs(params.w) ** 3)
        assert spline_seminorm(spline) == pytest.approx(expected, rel=1e-12)

    def test_seminorm_equals_path_norm_for_distinct_knots(self, rng, relu):
        for _ in range(50):
            params = random_network(rng, relu)
            assert seminorm_of_network(params) <= path_norm(params) * (1 + 1e-12)
            assert seminorm_of_network(params) == pytest.approx(path_norm(params), rel=1e-12)
