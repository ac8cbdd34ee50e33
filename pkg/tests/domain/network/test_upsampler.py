# tests/domain/network/test_upsampler.py
import numpy as np
import pytest

from common.errors import ConfigError, ShapeMismatchError
from domain.entities.depth_sample import SparseDepthSample
from domain.entities.edge_field import EdgeDistField
from domain.entities.layer_io import GammaKind
from domain.entities.network_spec import UpsamplerKind, upsampler_spec
from domain.network import build_upsampler, upsample


def _sample(rng, h=24, w=20, rate=0.05) -> SparseDepthSample:
    dense = rng.uniform(2.0, 20.0, size=(h, w, 1)).astype(np.float32)
    mask = np.zeros(h * w, dtype=np.float32)
    mask[rng.choice(h * w, max(1, int(rate * h * w + 0.5)), replace=False)] = 1.0
    mask = mask.reshape(h, w, 1)
    return SparseDepthSample(sparse_depth=dense * mask, confidence=mask, ground_truth=dense, sampling_rate=rate)


@pytest.mark.parametrize("kind", list(UpsamplerKind))
def test_preset_parameter_count(kind):
    model = build_upsampler(kind, seed=0)
    assert model.parameter_count == 373
    assert upsampler_spec(kind).parameter_count == 373
    assert len(model.layers) == 7


def test_equal_seeds_give_equal_parameters_across_kinds():
    edge = build_upsampler(UpsamplerKind.EDGE, seed=5)
    normal = build_upsampler(UpsamplerKind.NORMAL, seed=5)
    for a, b in zip(edge.parameters(), normal.parameters()):
        np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("h,w", [(7, 11), (1, 1), (24, 20)])
@pytest.mark.parametrize("kind", list(UpsamplerKind))
def test_output_keeps_input_size(rng, kind, h, w):
    sample = _sample(rng, h, w, rate=0.3)
    field = EdgeDistField.uniform(h, w, 0.5) if kind is UpsamplerKind.EDGE else None
    data, conf = upsample(build_upsampler(kind), sample, field)
    assert data.shape == (h, w, 1)
    assert conf.shape == (h, w, 1)
    assert np.all(np.isfinite(data))


def test_unit_field_matches_normal_network(rng):
    sample = _sample(rng)
    edge = build_upsampler(UpsamplerKind.EDGE, seed=3)
    normal = build_upsampler(UpsamplerKind.NORMAL, seed=3)
    edge_out, edge_conf = upsample(edge, sample, EdgeDistField.uniform(sample.height, sample.width))
    normal_out, normal_conf = upsample(normal, sample)
    np.testing.assert_array_equal(edge_out, normal_out)
    np.testing.assert_array_equal(edge_conf, normal_conf)


def test_edge_stream_survives_every_layer(rng):
    sample = _sample(rng)
    field = EdgeDistField(values=rng.uniform(0.1, 1.0, size=(sample.height, sample.width, 1)))
    model = build_upsampler(UpsamplerKind.EDGE)
    io = model.prepare_inputs(sample, field)
    for layer in model.layers:
        previous = io.edge_dist
        io, _ = layer.forward(io)
        expected = (previous.astype(np.float64) + layer.params.epsilon).astype(np.float32)
        np.testing.assert_array_equal(io.edge_dist, expected)


def test_normalized_confidence_does_not_saturate(rng):
    sample = _sample(rng, 40, 40, rate=0.05)
    _, conf = upsample(build_upsampler(UpsamplerKind.NORMAL, seed=1), sample)
    assert np.unique(conf).size > 2
    assert np.all(conf >= 0.0)
    assert np.all(conf <= 1.0 + 1e-6)


def test_sparse_mask_saturates_to_binary(rng):
    sample = _sample(rng, 40, 40, rate=0.05)
    _, mask = upsample(build_upsampler(UpsamplerKind.SPARSE, seed=1), sample)
    assert set(np.unique(mask).tolist()) <= {0.0, 1.0}


def test_zero_confidence_returns_bias_response():
    empty = SparseDepthSample(
        sparse_depth=np.zeros((6, 6, 1)), confidence=np.zeros((6, 6, 1)), sampling_rate=0.05
    )
    data, _ = upsample(build_upsampler(UpsamplerKind.NORMAL), empty)
    np.testing.assert_array_equal(data, np.zeros((6, 6, 1), dtype=np.float32))


def test_dense_input_is_finite(rng):
    dense = rng.uniform(1.0, 5.0, size=(10, 10, 1))
    sample = SparseDepthSample(sparse_depth=dense, confidence=np.ones_like(dense))
    data, _ = upsample(build_upsampler(UpsamplerKind.EDGE), sample, EdgeDistField.uniform(10, 10))
    assert np.all(np.isfinite(data))


def test_edge_model_needs_a_field(rng):
    with pytest.raises(ConfigError):
        upsample(build_upsampler(UpsamplerKind.EDGE), _sample(rng))


def test_misaligned_field(rng):
    with pytest.raises(ShapeMismatchError):
        upsample(build_upsampler(UpsamplerKind.EDGE), _sample(rng, 8, 8), EdgeDistField.uniform(8, 9))


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("kind", list(UpsamplerKind))
def test_relu_shift_models_run_for_every_seed(rng, kind, seed):
    model = build_upsampler(kind, seed=seed, gamma_kind=GammaKind.RELU_SHIFT)
    if kind is not UpsamplerKind.SPARSE:
        for p in model.params:
            assert np.all(np.maximum(p.w.weights, 0).sum(axis=(0, 1, 2)) > 0)
    dense = rng.uniform(2.0, 20.0, size=(8, 8, 1)).astype(np.float32)
    sample = SparseDepthSample(sparse_depth=dense, confidence=np.ones_like(dense))
    field = EdgeDistField.uniform(8, 8, 0.5) if kind is UpsamplerKind.EDGE else None
    data, conf = upsample(model, sample, field)
    assert np.all(np.isfinite(data))
    assert np.all(np.isfinite(conf))
