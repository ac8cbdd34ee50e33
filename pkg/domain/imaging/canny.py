# domain/imaging/canny.py
# -----------------------------------------------------------------------------
# Canny edge detector: Gaussian blur, Sobel gradients (aperture 3 or 5),
# non-maximum suppression along the gradient direction quantized to 4 bins,
# and double-threshold hysteresis over 8-connected components.
# Thresholds are in units of unnormalized Sobel magnitude on 8-bit intensities.
# -----------------------------------------------------------------------------

from typing import Tuple

import numpy as np
from scipy import ndimage

from common.errors import ParameterRangeError, ShapeMismatchError
from domain.entities.edge_field import CannyConfig, EdgeMap

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

_SOBEL_SMOOTH = {3: np.array([1.0, 2.0, 1.0]), 5: np.array([1.0, 4.0, 6.0, 4.0, 1.0])}
_SOBEL_DERIV = {3: np.array([-1.0, 0.0, 1.0]), 5: np.array([-1.0, -2.0, 0.0, 2.0, 1.0])}

# (row, col) step toward the "after" neighbour of each direction bin
_BIN_OFFSETS = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}


def to_luma(image: np.ndarray) -> np.ndarray:
    """(H, W) float64 intensity; RGB uses BT.601 weights."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim == 3 and arr.shape[2] == 3:
        arr = arr @ LUMA_WEIGHTS
    if arr.ndim != 2:
        raise ShapeMismatchError(f"expected grayscale or RGB image, got shape {np.shape(image)}")
    if arr.size == 0:
        raise ShapeMismatchError("image is empty")
    return arr


def sobel_kernels(aperture: int) -> Tuple[np.ndarray, np.ndarray]:
    """(kx, ky): kx differentiates along columns, ky along rows."""
    if aperture not in _SOBEL_SMOOTH:
        raise ParameterRangeError(f"aperture must be 3 or 5, got {aperture}")
    kx = np.outer(_SOBEL_SMOOTH[aperture], _SOBEL_DERIV[aperture])
    return kx, kx.T


def gradients(gray: np.ndarray, cfg: CannyConfig) -> Tuple[np.ndarray, np.ndarray]:
    smoothed = ndimage.gaussian_filter(gray, cfg.blur_sigma, mode="nearest") if cfg.blur_sigma > 0 else gray
    kx, ky = sobel_kernels(cfg.aperture)
    gx = ndimage.correlate(smoothed, kx, mode="nearest")
    gy = ndimage.correlate(smoothed, ky, mode="nearest")
    return gx, gy


def direction_bins(gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """0: horizontal gradient, 1: 45°, 2: vertical, 3: 135° (row axis pointing down)."""
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    bins = np.zeros(angle.shape, dtype=np.int8)
    bins[(angle >= 22.5) & (angle < 67.5)] = 1
    bins[(angle >= 67.5) & (angle < 112.5)] = 2
    bins[(angle >= 112.5) & (angle < 157.5)] = 3
    return bins


def _shifted(values: np.ndarray, dr: int, dc: int) -> np.ndarray:
    """out[i, j] = values[i + dr, j + dc], zero outside the image."""
    h, w = values.shape
    out = np.zeros_like(values)
    src_r = slice(max(dr, 0), h + min(dr, 0))
    src_c = slice(max(dc, 0), w + min(dc, 0))
    dst_r = slice(max(-dr, 0), h + min(-dr, 0))
    dst_c = slice(max(-dc, 0), w + min(-dc, 0))
    out[dst_r, dst_c] = values[src_r, src_c]
    return out


def non_maximum_suppression(magnitude: np.ndarray, bins: np.ndarray) -> np.ndarray:
    """
    Keep a pixel when it beats its "before" neighbour strictly and its "after"
    neighbour or ties with it, so a symmetric two-pixel ridge keeps one pixel.
    """
    keep = np.zeros(magnitude.shape, dtype=bool)
    for b, (dr, dc) in _BIN_OFFSETS.items():
        after = _shifted(magnitude, dr, dc)
        before = _shifted(magnitude, -dr, -dc)
        selected = bins == b
        keep |= selected & (magnitude > before) & (magnitude >= after)
    return np.where(keep & (magnitude > 0), magnitude, 0.0)


def hysteresis(suppressed: np.ndarray, low: float, high: float) -> np.ndarray:
    weak = suppressed >= low
    strong = suppressed >= high
    labels, count = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if count == 0:
        return np.zeros(suppressed.shape, dtype=bool)
    accepted = np.zeros(count + 1, dtype=bool)
    accepted[np.unique(labels[strong])] = True
    accepted[0] = False
    return accepted[labels]


def canny_edges(image: np.ndarray, cfg: CannyConfig = CannyConfig()) -> EdgeMap:
    """
    Detect edges in a grayscale or RGB image.

    Raises:
        ShapeMismatchError: the image is empty or not grayscale/RGB.
    """
    gray = to_luma(image)
    gx, gy = gradients(gray, cfg)
    magnitude = np.hypot(gx, gy)
    suppressed = non_maximum_suppression(magnitude, direction_bins(gx, gy))
    return EdgeMap(mask=hysteresis(suppressed, cfg.low_threshold, cfg.high_threshold))
