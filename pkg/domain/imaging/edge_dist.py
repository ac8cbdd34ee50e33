# domain/imaging/edge_dist.py

import numpy as np

from common.config import settings
from common.errors import ParameterRangeError
from domain.entities.edge_field import EdgeDistField, EdgeMap
from domain.imaging.distance import distance_transform


def ramp(distance: np.ndarray, e_edge: float, e_max: float, tau: float) -> np.ndarray:
    """min(e_max, e_edge + (e_max − e_edge)·d/tau), evaluated in float64."""
    d = np.asarray(distance, dtype=np.float64)
    frac = np.minimum(d / tau, 1.0)
    return np.minimum(e_max, e_edge + (e_max - e_edge) * frac)


def build_edge_dist_field(
    edges: EdgeMap,
    e_edge: float = settings.e_edge,
    e_max: float = settings.e_max,
    tau: float = settings.tau,
) -> EdgeDistField:
    """
    Turn an edge mask into the guidance field: e_edge on edge pixels, rising
    linearly with chamfer distance and saturating at e_max from `tau` pixels out.

    Raises:
        ParameterRangeError: unless 0 <= e_edge < e_max <= 1 and tau > 0.
    """
    if not 0.0 <= e_edge < e_max <= 1.0:
        raise ParameterRangeError(f"need 0 <= e_edge < e_max <= 1, got e_edge={e_edge}, e_max={e_max}")
    if not tau > 0:
        raise ParameterRangeError(f"tau must be positive, got {tau}")
    values = ramp(distance_transform(edges), e_edge, e_max, tau).astype(np.float32)
    return EdgeDistField(values=values, e_edge=e_edge, e_max=e_max, tau=tau)
