# domain/entities/grid.py
# -----------------------------------------------------------------------------
# A Grid is a plain numpy array of shape (H, W, C). Storage is float32; the
# numerics accumulate in float64 and hand float64 back only when a caller
# passed float64 in (gradient checks do this).
# -----------------------------------------------------------------------------

from __future__ import annotations

from typing import Any, Union

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, field_validator

from common.errors import NonFiniteError, ParameterRangeError, ShapeMismatchError

Grid = npt.NDArray[np.floating]

STORAGE_DTYPE = np.float32


def as_grid(values: Union[npt.ArrayLike, Grid], dtype: Any = STORAGE_DTYPE) -> Grid:
    """Coerce a 2-D or 3-D array into an (H, W, C) grid of the given dtype."""
    arr = np.asarray(values, dtype=dtype)
    if arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    if arr.ndim != 3:
        raise ShapeMismatchError(f"Grid must be 2-D or 3-D, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0 or arr.shape[2] == 0:
        raise ShapeMismatchError(f"Grid must be nonempty, got shape {arr.shape}")
    return arr


def storage_dtype(*arrays: np.ndarray) -> Any:
    """float64 if any input is float64, float32 otherwise."""
    if any(np.asarray(a).dtype == np.float64 for a in arrays):
        return np.float64
    return STORAGE_DTYPE


def ensure_finite(grid: np.ndarray, what: str = "grid") -> np.ndarray:
    if not np.all(np.isfinite(grid)):
        bad = int(np.size(grid) - np.count_nonzero(np.isfinite(grid)))
        raise NonFiniteError(f"{what} contains {bad} non-finite value(s)")
    return grid


def require_same_shape(a: np.ndarray, b: np.ndarray, what: str = "grids") -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"{what} differ in shape: {a.shape} vs {b.shape}")


def dump_grid(grid: np.ndarray, precision: int = 6) -> str:
    """Plain-text matrix dump, one line per row, channels joined by '/'."""
    g = as_grid(grid, dtype=np.float64)
    lines = []
    for row in g:
        cells = ["/".join(f"{v:.{precision}g}" for v in pixel) for pixel in row]
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"


class Kernel(BaseModel):
    """Filter bank of shape (k_h, k_w, in_channels, out_channels)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    weights: np.ndarray

    @field_validator("weights")
    @classmethod
    def _check_weights(cls, value: np.ndarray) -> np.ndarray:
        arr = np.asarray(value)
        if arr.ndim != 4:
            raise ValueError(f"kernel weights must be 4-D (k_h, k_w, c_in, c_out), got {arr.shape}")
        if arr.shape[0] % 2 == 0 or arr.shape[1] % 2 == 0:
            raise ValueError(f"kernel extents must be odd, got {arr.shape[:2]}")
        if not np.issubdtype(arr.dtype, np.floating):
            arr = arr.astype(STORAGE_DTYPE)
        return arr

    @property
    def k_h(self) -> int:
        return int(self.weights.shape[0])

    @property
    def k_w(self) -> int:
        return int(self.weights.shape[1])

    @property
    def in_channels(self) -> int:
        return int(self.weights.shape[2])

    @property
    def out_channels(self) -> int:
        return int(self.weights.shape[3])

    @classmethod
    def center_only(cls, k_h: int, k_w: int, channels: int = 1) -> "Kernel":
        """1 at (⌊k_h/2⌋, ⌊k_w/2⌋) on the channel diagonal, 0 elsewhere."""
        if k_h % 2 == 0 or k_w % 2 == 0:
            raise ParameterRangeError(f"kernel extents must be odd, got {(k_h, k_w)}")
        w = np.zeros((k_h, k_w, channels, channels), dtype=STORAGE_DTYPE)
        for c in range(channels):
            w[k_h // 2, k_w // 2, c, c] = 1.0
        return cls(weights=w)

    @classmethod
    def filled(cls, k_h: int, k_w: int, in_channels: int, out_channels: int, value: float) -> "Kernel":
        return cls(weights=np.full((k_h, k_w, in_channels, out_channels), value, dtype=STORAGE_DTYPE))
