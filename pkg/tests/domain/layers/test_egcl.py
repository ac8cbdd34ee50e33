# tests/domain/layers/test_egcl.py
import numpy as np
import pytest

from common.errors import MissingForwardStateError, ParameterRangeError, ShapeMismatchError
from domain.entities.grid import Kernel
from domain.entities.layer_io import EgclParams, GammaKind, LayerIO
from domain.layers import (
    egcl_backward,
    egcl_forward,
    egcl_forward_with_state,
    nconv_forward,
)
from domain.numerics import grad_check
from tests.conftest import make_io, make_params

EPS = 1e-20


def _unit_params(k: int = 3, bias: float = 0.0) -> EgclParams:
    # relu_shift keeps Γ(1) = 1 exactly
    return EgclParams(
        w=Kernel(weights=np.ones((k, k, 1, 1))),
        b=np.array([bias]),
        gamma=GammaKind.RELU_SHIFT,
    )


class TestForwardExamples:
    def test_edge_weighted_center(self):
        z = np.array([[1, 2, 3], [4, 5, 6], [7, 8, 9]], dtype=np.float64)
        e = np.array([[1, 1, 1], [1, 1, 1], [0.1, 0.1, 0.1]], dtype=np.float64)
        io = LayerIO.from_data(z, np.ones_like(z), e)
        out = egcl_forward(io, _unit_params())
        assert out.data[1, 1, 0] == pytest.approx(23.4 / 6.3, rel=1e-12)
        assert out.data[1, 1, 0] == pytest.approx(3.714, abs=5e-4)

    def test_nconv_center_is_mean(self):
        z = np.arange(1, 10, dtype=np.float64).reshape(3, 3)
        out = nconv_forward(LayerIO.from_data(z), _unit_params())
        assert out.data[1, 1, 0] == pytest.approx(5.0, rel=1e-12)

    def test_zero_confidence_yields_bias(self, rng):
        z = rng.uniform(1, 5, size=(4, 4))
        io = LayerIO.from_data(z, np.zeros_like(z))
        out = egcl_forward(io, _unit_params(bias=0.25))
        np.testing.assert_array_equal(out.data, np.full((4, 4, 1), 0.25))
        assert out.confidence[0, 0, 0] == pytest.approx(EPS / 9.0, rel=1e-9)
        assert np.all(np.isfinite(out.data))

    def test_single_pixel_grid(self):
        io = LayerIO.from_data(np.array([[7.0]]))
        out = egcl_forward(io, _unit_params())
        assert out.data[0, 0, 0] == pytest.approx(7.0, rel=1e-12)
        # only the centre tap lands inside; mass counts all nine
        assert out.confidence[0, 0, 0] == pytest.approx(1.0 / 9.0, rel=1e-12)

    def test_one_by_one_kernel_keeps_values(self, rng):
        io = make_io(rng, 5, 4)
        params = EgclParams(w=Kernel(weights=np.full((1, 1, 1, 1), 0.3)), b=np.zeros(1))
        out = egcl_forward(io, params)
        np.testing.assert_allclose(out.data, io.data, rtol=1e-12)
        np.testing.assert_allclose(out.confidence, io.confidence, rtol=1e-12)

    def test_output_shape(self, rng):
        io = make_io(rng, 6, 9, channels=2)
        out = egcl_forward(io, make_params(rng, 5, 2, 3))
        assert out.data.shape == (6, 9, 3)
        assert out.confidence.shape == (6, 9, 3)
        assert out.edge_dist.shape == (6, 9, 1)


class TestInvariants:
    @pytest.mark.parametrize("seed", range(100))
    def test_uniform_edge_reduces_to_nconv(self, seed):
        rng = np.random.default_rng(seed)
        h, w = rng.integers(1, 9, size=2)
        k = int(rng.choice([1, 3, 5]))
        c_in, c_out = rng.integers(1, 4, size=2)
        io = make_io(rng, int(h), int(w), int(c_in), edge=np.ones((h, w, 1)))
        params = make_params(rng, k, int(c_in), int(c_out))
        np.testing.assert_array_equal(egcl_forward(io, params).data, nconv_forward(io, params).data)
        np.testing.assert_array_equal(
            egcl_forward(io, params).confidence, nconv_forward(io, params).confidence
        )

    @pytest.mark.parametrize("seed", range(20))
    def test_output_interpolates_window(self, seed):
        rng = np.random.default_rng(seed)
        io = make_io(rng, 6, 7)
        params = make_params(rng, 3)
        params = params.model_copy(update={"b": np.zeros(1)})
        out = egcl_forward(io, params).data[:, :, 0]
        z = io.data[:, :, 0]
        for i in range(6):
            for j in range(7):
                window = z[max(i - 1, 0):i + 2, max(j - 1, 0):j + 2]
                assert window.min() - 1e-9 <= out[i, j] <= window.max() + 1e-9

    @pytest.mark.parametrize("seed", range(20))
    def test_confidence_stays_in_unit_range(self, seed):
        rng = np.random.default_rng(seed)
        io = make_io(rng, 5, 5, channels=2)
        out = egcl_forward(io, make_params(rng, 3, 2, 2))
        assert np.all(out.confidence >= 0.0)
        assert np.all(out.confidence <= 1.0 + 1e-12)

    def test_edge_stream_is_shifted_by_epsilon(self, rng):
        io = make_io(rng, 5, 5)
        out = egcl_forward(io, make_params(rng, 5))
        np.testing.assert_array_equal(out.edge_dist, io.edge_dist + EPS)

    def test_nconv_passes_edge_stream(self, rng):
        io = make_io(rng, 4, 4)
        out = nconv_forward(io, make_params(rng, 3))
        assert out.edge_dist is io.edge_dist

    def test_float32_storage(self, rng):
        io = make_io(rng, 4, 4, dtype=np.float32)
        out = egcl_forward(io, make_params(rng, 3, dtype=np.float32))
        assert out.data.dtype == np.float32
        assert out.confidence.dtype == np.float32


class TestErrors:
    def test_channel_mismatch(self, rng):
        with pytest.raises(ShapeMismatchError):
            egcl_forward(make_io(rng, 4, 4, channels=2), make_params(rng, 3, 1, 1))

    def test_relu_shift_zero_mass(self, rng):
        params = EgclParams(
            w=Kernel(weights=-np.ones((3, 3, 1, 1))), b=np.zeros(1), gamma=GammaKind.RELU_SHIFT
        )
        with pytest.raises(ParameterRangeError):
            egcl_forward(make_io(rng, 3, 3), params)

    def test_backward_without_state(self):
        with pytest.raises(MissingForwardStateError):
            egcl_backward(None, np.ones((2, 2, 1)))

    def test_backward_upstream_shape(self, rng):
        _, state = egcl_forward_with_state(make_io(rng, 4, 4), make_params(rng, 3))
        with pytest.raises(ShapeMismatchError):
            egcl_backward(state, np.ones((4, 5, 1)))


def _loss_terms(rng, io, c_out):
    u = rng.normal(size=io.data.shape[:2] + (c_out,))
    v = rng.normal(size=io.data.shape[:2] + (c_out,))
    return u, v


class TestGradients:
    @pytest.mark.parametrize("seed", range(20))
    @pytest.mark.parametrize("gamma_kind", [GammaKind.SOFTPLUS, GammaKind.RELU_SHIFT])
    def test_weight_gradient(self, seed, gamma_kind):
        rng = np.random.default_rng(seed)
        io = make_io(rng, 5, 5, channels=2)
        base = make_params(rng, 3, 2, 2, gamma=gamma_kind)
        if gamma_kind is GammaKind.RELU_SHIFT:
            # keep every weight away from the kink
            base = base.model_copy(update={"w": Kernel(weights=np.abs(base.w.weights) + 0.2)})
        u, v = _loss_terms(rng, io, 2)

        def f(w_flat):
            params = base.model_copy(update={"w": Kernel(weights=w_flat.reshape(base.w.weights.shape))})
            out, state = egcl_forward_with_state(io, params)
            loss = float(np.sum(u * out.data) + np.sum(v * out.confidence))
            return loss, egcl_backward(state, u, v).grad_w.reshape(-1)

        assert grad_check(f, base.w.weights.reshape(-1), h=1e-3) < 1e-3

    @pytest.mark.parametrize("seed", range(20))
    def test_input_gradients(self, seed):
        rng = np.random.default_rng(seed)
        io = make_io(rng, 5, 4)
        params = make_params(rng, 3, 1, 2)
        u, v = _loss_terms(rng, io, 2)

        def loss(stream_io):
            out, state = egcl_forward_with_state(stream_io, params)
            return float(np.sum(u * out.data) + np.sum(v * out.confidence)), egcl_backward(state, u, v)

        def f_data(z_flat):
            value, grads = loss(io.model_copy(update={"data": z_flat.reshape(io.data.shape)}))
            return value, grads.grad_data.reshape(-1)

        def f_conf(c_flat):
            value, grads = loss(io.model_copy(update={"confidence": c_flat.reshape(io.data.shape)}))
            return value, grads.grad_conf.reshape(-1)

        assert grad_check(f_data, io.data.reshape(-1)) < 1e-3
        assert grad_check(f_conf, io.confidence.reshape(-1)) < 1e-3

    def test_bias_gradient_is_spatial_sum(self, rng):
        io = make_io(rng, 4, 6)
        _, state = egcl_forward_with_state(io, make_params(rng, 3, 1, 2))
        upstream = rng.normal(size=(4, 6, 2))
        grads = egcl_backward(state, upstream)
        np.testing.assert_allclose(grads.grad_b, upstream.sum(axis=(0, 1)), rtol=1e-12)

    def test_zero_upstream_gives_zero_gradients(self, rng):
        io = make_io(rng, 4, 4)
        _, state = egcl_forward_with_state(io, make_params(rng, 3))
        zeros = np.zeros((4, 4, 1))
        grads = egcl_backward(state, zeros, zeros)
        for grad in (grads.grad_w, grads.grad_b, grads.grad_data, grads.grad_conf):
            assert not np.any(grad)
