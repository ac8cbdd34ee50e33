# domain/metrics.py
# -----------------------------------------------------------------------------
# Depth error metrics. All averages run over every pixel of the ground truth
# (or over a mask when one is given). Inverse-depth metrics use constant 1.
# -----------------------------------------------------------------------------

from typing import Optional

import numpy as np

from common.config import settings
from common.errors import ParameterRangeError, ShapeMismatchError
from domain.entities.metric_report import MetricReport

DELTA_BASE = 1.25


def _masked_pair(z: np.ndarray, t: np.ndarray, mask: Optional[np.ndarray]):
    z = np.asarray(z, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if z.shape != t.shape:
        raise ShapeMismatchError(f"prediction {z.shape} and target {t.shape} differ")
    if mask is None:
        if z.size == 0:
            raise ParameterRangeError("cannot compute a metric over zero pixels")
        return z.ravel(), t.ravel()
    m = np.asarray(mask)
    if m.shape != z.shape:
        raise ShapeMismatchError(f"mask {m.shape} does not match grids {z.shape}")
    selected = m.astype(bool)
    if not np.any(selected):
        raise ParameterRangeError("mask selects no pixels")
    return z[selected], t[selected]


def mae(z: np.ndarray, t: np.ndarray, mask: Optional[np.ndarray] = None) -> float:
    zs, ts = _masked_pair(z, t, mask)
    return float(np.mean(np.abs(zs - ts)))


def rmse(z: np.ndarray, t: np.ndarray, mask: Optional[np.ndarray] = None) -> float:
    zs, ts = _masked_pair(z, t, mask)
    return float(np.sqrt(np.mean((zs - ts) ** 2)))


def delta_n(z: np.ndarray, t: np.ndarray, n: int, mask: Optional[np.ndarray] = None) -> float:
    """Fraction of pixels with max(Z/T, T/Z) < 1.25**n."""
    if n not in (1, 2, 3):
        raise ParameterRangeError(f"delta order must be 1, 2 or 3, got {n}")
    zs, ts = _masked_pair(z, t, mask)
    if np.any(zs <= 0) or np.any(ts <= 0):
        raise ParameterRangeError("inlier ratios need strictly positive depths")
    ratio = np.maximum(zs / ts, ts / zs)
    return float(np.mean(ratio < DELTA_BASE ** n))


def depth_disparity_convert(g: np.ndarray, constant: float = 1.0) -> np.ndarray:
    """constant / g elementwise; the same call maps depth to disparity and back."""
    arr = np.asarray(g)
    if np.any(arr <= 0):
        raise ParameterRangeError("depth/disparity conversion needs strictly positive values")
    dtype = arr.dtype if np.issubdtype(arr.dtype, np.floating) else np.float64
    return (constant / arr.astype(np.float64)).astype(dtype)


def imae(z: np.ndarray, t: np.ndarray, mask: Optional[np.ndarray] = None) -> float:
    return mae(depth_disparity_convert(np.asarray(z, dtype=np.float64)),
               depth_disparity_convert(np.asarray(t, dtype=np.float64)), mask)


def irmse(z: np.ndarray, t: np.ndarray, mask: Optional[np.ndarray] = None) -> float:
    return rmse(depth_disparity_convert(np.asarray(z, dtype=np.float64)),
                depth_disparity_convert(np.asarray(t, dtype=np.float64)), mask)


def evaluate(
    prediction: np.ndarray,
    target: np.ndarray,
    min_depth: Optional[float] = settings.min_depth,
) -> MetricReport:
    """
    All seven metrics of one prediction.

    Args:
        prediction: Dense depth from a model.
        target: Dense ground truth, strictly positive.
        min_depth: Predictions are floored here before the inverse-depth and
            inlier-ratio metrics; None disables the floor.

    Raises:
        ShapeMismatchError: misaligned grids.
        ParameterRangeError: nonpositive depths reaching the inverse metrics.
    """
    z = np.asarray(prediction, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    floored = z if min_depth is None else np.maximum(z, min_depth)
    return MetricReport(
        mae=mae(z, t),
        rmse=rmse(z, t),
        imae=imae(floored, t),
        irmse=irmse(floored, t),
        delta1=delta_n(floored, t, 1),
        delta2=delta_n(floored, t, 2),
        delta3=delta_n(floored, t, 3),
    )
