# tests/domain/imaging/test_edge_dist.py
import numpy as np
import pytest

from common.errors import ParameterRangeError
from domain.entities.edge_field import EdgeMap
from domain.imaging import build_edge_dist_field, distance_transform, ramp


def _column_edge(h: int = 20, w: int = 20, col: int = 10) -> EdgeMap:
    mask = np.zeros((h, w), dtype=bool)
    mask[:, col] = True
    return EdgeMap(mask=mask)


def test_ramp_two_pixels_from_edge():
    field = build_edge_dist_field(_column_edge(), e_edge=0.1, e_max=1.0, tau=5.0)
    assert field.values[5, 12, 0] == pytest.approx(0.46, abs=1e-6)
    assert field.values[5, 10, 0] == pytest.approx(0.1, abs=1e-7)
    assert field.values[5, 16, 0] == 1.0


def test_no_edges_saturates():
    field = build_edge_dist_field(EdgeMap(mask=np.zeros((6, 6), dtype=bool)))
    np.testing.assert_array_equal(field.values, np.ones((6, 6, 1), dtype=np.float32))


def test_all_edges_is_floor():
    field = build_edge_dist_field(EdgeMap(mask=np.ones((4, 4), dtype=bool)), e_edge=0.2)
    np.testing.assert_allclose(field.values, 0.2, rtol=1e-6)


def test_ramp_in_float64():
    out = ramp(np.array([0.0, 2.5, 5.0, 1e30]), 0.0, 1.0, 5.0)
    np.testing.assert_array_equal(out, [0.0, 0.5, 1.0, 1.0])


@pytest.mark.parametrize("seed", range(50))
def test_bounded_and_monotone_in_distance(seed):
    rng = np.random.default_rng(seed)
    mask = rng.uniform(size=(16, 16)) < rng.uniform(0.0, 0.2)
    edges = EdgeMap(mask=mask)
    field = build_edge_dist_field(edges, e_edge=0.1, e_max=1.0, tau=5.0).values.ravel()
    assert np.all(field >= np.float32(0.1))
    assert np.all(field <= np.float32(1.0))
    d = distance_transform(edges).ravel()
    order = np.argsort(d, kind="stable")
    assert np.all(np.diff(field[order]) >= 0)


@pytest.mark.parametrize(
    "e_edge,e_max,tau",
    [(0.5, 0.5, 5.0), (-0.1, 1.0, 5.0), (0.1, 1.5, 5.0), (0.1, 1.0, 0.0)],
)
def test_rejects_bad_parameters(e_edge, e_max, tau):
    with pytest.raises(ParameterRangeError):
        build_edge_dist_field(_column_edge(), e_edge=e_edge, e_max=e_max, tau=tau)
