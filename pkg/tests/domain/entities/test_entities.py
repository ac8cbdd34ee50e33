# tests/domain/entities/test_entities.py
import numpy as np
import pytest
from pydantic import ValidationError

from common.errors import ShapeMismatchError
from domain.entities.depth_sample import SceneConfig, SparseDepthSample
from domain.entities.edge_field import EdgeDistField
from domain.entities.grid import Kernel, as_grid, dump_grid, storage_dtype
from domain.entities.layer_io import EgclParams, LayerIO
from domain.entities.metric_report import MetricReport
from domain.entities.network_spec import LayerSpec, NetworkSpec, UpsamplerKind, fusion_spec, upsampler_spec


def test_as_grid_adds_channel_axis():
    g = as_grid([[1, 2], [3, 4]])
    assert g.shape == (2, 2, 1)
    assert g.dtype == np.float32


@pytest.mark.parametrize("bad", [np.zeros(3), np.zeros((0, 2)), np.zeros((1, 1, 1, 1))])
def test_as_grid_rejects(bad):
    with pytest.raises(ShapeMismatchError):
        as_grid(bad)


def test_storage_dtype():
    a32 = np.zeros(2, dtype=np.float32)
    assert storage_dtype(a32, a32) == np.float32
    assert storage_dtype(a32, np.zeros(2)) == np.float64


def test_dump_grid():
    assert dump_grid(np.array([[1.0, 2.0], [3.0, 4.5]])) == "1 2\n3 4.5\n"


def test_center_only_kernel():
    k = Kernel.center_only(3, 5)
    assert k.weights.shape == (3, 5, 1, 1)
    assert k.weights[1, 2, 0, 0] == 1.0
    assert k.weights.sum() == 1.0


def test_kernel_rejects_even_extent():
    with pytest.raises(ValidationError):
        Kernel(weights=np.zeros((2, 3, 1, 1)))


def test_layer_io_fills_confidence_and_edges():
    io = LayerIO.from_data(np.ones((3, 4)))
    assert io.confidence.shape == (3, 4, 1)
    assert np.all(io.edge_dist == 1.0)
    assert (io.height, io.width, io.channels) == (3, 4, 1)


def test_layer_io_rejects_misaligned_edges():
    with pytest.raises(ValidationError):
        LayerIO(data=np.ones((3, 4, 2)), confidence=np.ones((3, 4, 2)), edge_dist=np.ones((3, 4, 2)))


def test_params_build_w_prime():
    p = EgclParams(w=Kernel.filled(3, 3, 1, 2, 0.5), b=np.zeros(2))
    assert p.w_prime.weights.shape == (3, 3, 1, 1)
    assert p.parameter_count == 20


def test_params_reject_bad_w_prime():
    wp = np.zeros((3, 3, 1, 1))
    wp[0, 0, 0, 0] = 1.0
    with pytest.raises(ValidationError):
        EgclParams(w=Kernel.filled(3, 3, 1, 1, 0.5), b=np.zeros(1), w_prime=Kernel(weights=wp))


@pytest.mark.parametrize(
    "kwargs",
    [{"b": np.zeros(2)}, {"b": np.zeros(1), "epsilon": 0.0}, {"b": np.array([np.nan])}],
)
def test_params_reject(kwargs):
    with pytest.raises(ValidationError):
        EgclParams(w=Kernel.filled(3, 3, 1, 1, 0.5), **kwargs)


def test_upsampler_spec_shape():
    spec = upsampler_spec(UpsamplerKind.EDGE)
    assert [layer.kernel_size for layer in spec.layers] == [5, 5, 5, 3, 3, 3, 1]
    assert spec.in_channels == 1
    assert spec.out_channels == 1
    assert spec.parameter_count == 373


def test_fusion_spec_parameter_count():
    assert fusion_spec(2, 4).parameter_count == 153


def test_spec_rejects_broken_chaining():
    a = LayerSpec(kind="nconv", kernel_size=3, in_channels=1, out_channels=2)
    b = LayerSpec(kind="nconv", kernel_size=3, in_channels=3, out_channels=1)
    with pytest.raises(ValidationError):
        NetworkSpec(layers=[a, b])


def test_sparse_sample_confidence_range():
    with pytest.raises(ValidationError):
        SparseDepthSample(sparse_depth=np.ones((2, 2)), confidence=np.full((2, 2), 1.5))


def test_sparse_sample_is_binary():
    mask = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert SparseDepthSample(sparse_depth=mask * 3, confidence=mask).is_binary
    assert not SparseDepthSample(sparse_depth=mask, confidence=mask * 0.5).is_binary


def test_edge_field_range():
    with pytest.raises(ValidationError):
        EdgeDistField(values=np.ones((2, 2)), e_edge=0.5, e_max=0.4)
    with pytest.raises(ValidationError):
        EdgeDistField(values=np.ones((2, 2)), tau=0.0)


def test_scene_config_validation():
    with pytest.raises(ValidationError):
        SceneConfig(height=3)
    with pytest.raises(ValidationError):
        SceneConfig(depth_min=5.0, depth_max=5.0)
    assert SceneConfig(background_depth=30.0).resolved_background_depth == 30.0


def test_metric_report_mean():
    a = MetricReport(mae=1, rmse=2, imae=0.1, irmse=0.2, delta1=0.5, delta2=0.7, delta3=0.9)
    b = MetricReport(mae=3, rmse=4, imae=0.3, irmse=0.4, delta1=0.7, delta2=0.9, delta3=1.0)
    m = MetricReport.mean([a, b])
    assert m.mae == 2.0
    assert m.delta3 == pytest.approx(0.95)


def test_metric_report_order():
    with pytest.raises(ValidationError):
        MetricReport(mae=1, rmse=2, imae=0, irmse=0, delta1=0.9, delta2=0.5, delta3=1.0)
