import numpy as np
import pytest

from star_uvaa.errors import NumericalError
from star_uvaa.nn import (
    Adam,
    Linear,
    Mlp,
    ParamTensor,
    Tensor,
    check_finite,
    clip,
    concat,
    exp,
    log,
    softmax,
    softplus,
    soft_update,
    tanh,
    tsum,
)
from star_uvaa.nn.gradcheck import check_gradients, max_relative_error, numerical_gradient

# ============================================================================
# Test Tensor operations
# ============================================================================


class TestTensorGradients:
    """Finite-difference checks of the reverse-mode operations."""

    def test_elementwise_chain(self):
        """Test exp, log, tanh, softplus, division and powers in one graph."""
        gen = np.random.default_rng(0)
        a = ParamTensor(gen.uniform(0.5, 1.5, (3, 4)), "a")
        b = ParamTensor(gen.uniform(0.5, 1.5, (3, 4)), "b")

        def loss():
            return tsum(log(exp(a) + b) * tanh(a) / b + softplus(a - b) ** 2)

        assert check_gradients(loss, [a, b]) < 1e-5

    def test_broadcast_bias(self):
        """Test that a broadcast row vector receives summed gradients."""
        gen = np.random.default_rng(1)
        x = Tensor(gen.standard_normal((5, 3)))
        w = ParamTensor(gen.standard_normal((3, 2)), "w")
        bias = ParamTensor(gen.standard_normal((1, 2)), "bias")

        def loss():
            return tsum(tanh(x @ w + bias))

        assert check_gradients(loss, [w, bias]) < 1e-5

    def test_indexing_concat_softmax(self):
        """Test slicing, concatenation, softmax, mean and clip."""
        gen = np.random.default_rng(2)
        a = ParamTensor(gen.standard_normal((4, 6)), "a")

        def loss():
            left, right = a[:, :3], a[:, 3:]
            joined = concat([right, left * 2.0], axis=1)
            weights = softmax(joined, axis=1)
            return (weights * clip(a, -0.8, 0.8)).mean(axis=1).sum()

        assert check_gradients(loss, [a]) < 1e-5

    def test_reused_node(self):
        """Test that a node used twice accumulates both contributions."""
        a = ParamTensor(np.array([[2.0]]), "a")
        y = a * a + a
        y.backward()
        assert a.grad[0, 0] == pytest.approx(5.0)

    def test_nonscalar_backward(self):
        """Test that an implicit seed gradient needs a scalar output."""
        a = ParamTensor(np.ones((2, 2)), "a")
        with pytest.raises(ValueError):
            (a * 2.0).backward()

    def test_matmul_needs_matrices(self):
        """Test that vectors are refused by matmul."""
        with pytest.raises(ValueError):
            Tensor(np.ones(3)) @ Tensor(np.ones(3))

    def test_constants_are_not_recorded(self):
        """Test that graphs without parameters do not require gradients."""
        y = Tensor(np.ones(2)) * 3.0 + 1.0
        assert not y.requires_grad

    def test_softplus_is_stable(self):
        """Test softplus at large magnitudes."""
        out = softplus(Tensor(np.array([-800.0, 0.0, 800.0]))).data
        np.testing.assert_allclose(out, [0.0, np.log(2.0), 800.0])

    def test_numpy_on_the_left(self):
        """Test that ndarray op Tensor dispatches to the Tensor operator."""
        a = ParamTensor(np.ones((1, 2)), "a")
        out = np.array([[1.0, 2.0]]) - a
        assert isinstance(out, Tensor)
        out.sum().backward()
        np.testing.assert_array_equal(a.grad, [[-1.0, -1.0]])


# ============================================================================
# Test gradient-check helpers
# ============================================================================


class TestGradcheck:
    """Tests for the finite-difference helpers themselves."""

    def test_numerical_gradient_of_square(self):
        """Test central differences on a quadratic."""
        a = ParamTensor(np.array([1.0, -2.0]), "a")
        grad = numerical_gradient(lambda: tsum(a * a), a)
        np.testing.assert_allclose(grad, [2.0, -4.0], rtol=1e-6)
        np.testing.assert_array_equal(a.data, [1.0, -2.0])

    def test_relative_error_ignores_tiny_differences(self):
        """Test the absolute tolerance cut-off."""
        assert max_relative_error(np.array([1e-9]), np.array([0.0])) == 0.0
        assert max_relative_error(np.array([1.0]), np.array([2.0])) == pytest.approx(0.5)


# ============================================================================
# Test layers and optimizer
# ============================================================================


class TestLayers:
    """Tests for Linear, Mlp, Module state and Adam."""

    def test_linear_initialization(self):
        """Test the uniform fan-in initialization range."""
        layer = Linear(16, 8, np.random.default_rng(0))
        assert layer.weight.shape == (16, 8)
        assert layer.bias.shape == (1, 8)
        assert np.all(np.abs(layer.weight.data) <= 0.25)

    def test_mlp_gradients(self):
        """Test backpropagation through a two-layer MLP."""
        gen = np.random.default_rng(3)
        net = Mlp([5, 7, 2], gen)
        x = Tensor(gen.standard_normal((4, 5)))

        def loss():
            return tsum(net(x) ** 2)

        assert check_gradients(loss, net.parameters()) < 1e-5

    def test_named_parameters(self):
        """Test parameter discovery through module lists."""
        net = Mlp([3, 4, 1], np.random.default_rng(0))
        names = [name for name, _ in net.named_parameters()]
        assert names == [
            "layers.0.weight",
            "layers.0.bias",
            "layers.1.weight",
            "layers.1.bias",
        ]

    def test_state_dict_round_trip(self):
        """Test copying parameters between identically shaped networks."""
        a = Mlp([3, 4, 1], np.random.default_rng(0))
        b = Mlp([3, 4, 1], np.random.default_rng(1))

        b.copy_from(a)

        for (_, pa), (_, pb) in zip(a.named_parameters(), b.named_parameters()):
            np.testing.assert_array_equal(pa.data, pb.data)

    def test_state_dict_mismatch(self):
        """Test that missing keys and wrong shapes are refused."""
        net = Mlp([3, 4, 1], np.random.default_rng(0))
        state = net.state_dict()

        with pytest.raises(KeyError):
            net.load_state_dict({k: v for k, v in state.items() if k != "layers.0.bias"})
        state["layers.0.bias"] = np.zeros((1, 5))
        with pytest.raises(ValueError):
            net.load_state_dict(state)

    def test_check_finite_names_layer(self):
        """Test the non-finite guard."""
        with pytest.raises(NumericalError, match="layer=head"):
            check_finite(Tensor(np.array([np.nan])), "head")

    def test_adam_minimizes_quadratic(self):
        """Test that Adam drives a parameter towards the minimum."""
        a = ParamTensor(np.array([3.0, -2.0]), "a")
        optimizer = Adam([a], lr=0.1)
        for _ in range(500):
            optimizer.zero_grad()
            tsum((a - 1.0) ** 2).backward()
            optimizer.step()
        np.testing.assert_allclose(a.data, [1.0, 1.0], atol=1e-2)
        assert optimizer.state()["t"] == 500

    def test_soft_update(self):
        """Test the Polyak average and its validation."""
        online = Mlp([2, 1], np.random.default_rng(0))
        target = Mlp([2, 1], np.random.default_rng(1))
        before = target.state_dict()

        soft_update(online, target, 0.25)

        for name, value in target.state_dict().items():
            expected = 0.25 * online.state_dict()[name] + 0.75 * before[name]
            np.testing.assert_allclose(value, expected)
        with pytest.raises(ValueError):
            soft_update(online, target, 1.5)
        with pytest.raises(ValueError):
            soft_update(online, Mlp([2, 3, 1], np.random.default_rng(2)), 0.5)

    def test_soft_update_converges_geometrically(self):
        """Test that the target gap to a frozen online network shrinks by (1 − τ) per step."""
        online = Mlp([3, 4, 1], np.random.default_rng(0))
        target = Mlp([3, 4, 1], np.random.default_rng(1))
        tau = 0.1

        def gap():
            return {
                name: online.state_dict()[name] - value
                for name, value in target.state_dict().items()
            }

        start = gap()
        soft_update(online, target, tau)
        soft_update(online, target, tau)

        for name, value in gap().items():
            np.testing.assert_allclose(value, (1.0 - tau) ** 2 * start[name], atol=1e-12)
