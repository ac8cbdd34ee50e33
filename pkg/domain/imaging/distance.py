# domain/imaging/distance.py
# -----------------------------------------------------------------------------
# Chamfer (3,4)/3 distance transform in two raster sweeps. Each sweep handles
# the previous row with vectorized shifts and the in-row neighbour with a
# running minimum, which is the classic sequential scan in closed form.
# -----------------------------------------------------------------------------

import numpy as np

from domain.entities.edge_field import EdgeMap

AXIAL = 3
DIAGONAL = 4
# Stand-in for +∞ when there are no edges; finite so grids stay finite
NO_EDGE_DISTANCE = 1e30

_UNREACHED = np.iinfo(np.int64).max // 4


def _sweep_row(row: np.ndarray, prev: np.ndarray, reverse: bool) -> np.ndarray:
    t = np.minimum(row, prev + AXIAL)
    t[1:] = np.minimum(t[1:], prev[:-1] + DIAGONAL)
    t[:-1] = np.minimum(t[:-1], prev[1:] + DIAGONAL)
    return _scan(t, reverse)


def _scan(t: np.ndarray, reverse: bool) -> np.ndarray:
    # t[j] = min(t[j], t[j∓1] + AXIAL) carried along the row
    idx = np.arange(t.size, dtype=np.int64) * AXIAL
    if reverse:
        return np.minimum.accumulate((t + idx)[::-1])[::-1] - idx
    return np.minimum.accumulate(t - idx) + idx


def chamfer_units(edges: EdgeMap) -> np.ndarray:
    """Integer chamfer distances in units of 1/3 pixel; unreachable pixels stay huge."""
    h, w = edges.mask.shape
    d = np.where(edges.mask, 0, _UNREACHED).astype(np.int64)
    for i in range(h):
        if i == 0:
            d[i] = _scan(d[i], reverse=False)
        else:
            d[i] = _sweep_row(d[i], d[i - 1], reverse=False)
    for i in range(h - 1, -1, -1):
        if i == h - 1:
            d[i] = _scan(d[i], reverse=True)
        else:
            d[i] = _sweep_row(d[i], d[i + 1], reverse=True)
    return d


def distance_transform(edges: EdgeMap) -> np.ndarray:
    """
    Chamfer distance to the nearest edge pixel, as an (H, W, 1) float32 grid.

    An empty edge map yields NO_EDGE_DISTANCE everywhere.
    """
    if edges.edge_count == 0:
        return np.full((edges.height, edges.width, 1), NO_EDGE_DISTANCE, dtype=np.float32)
    units = chamfer_units(edges)
    return (units.astype(np.float64) / AXIAL).astype(np.float32)[:, :, np.newaxis]
