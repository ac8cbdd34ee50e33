# domain/entities/edge_field.py

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from common.config import settings


class EdgeMap(BaseModel):
    """Boolean (H, W) mask, True on depth-edge pixels."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mask: np.ndarray

    @field_validator("mask")
    @classmethod
    def _check_mask(cls, value: np.ndarray) -> np.ndarray:
        arr = np.asarray(value)
        if arr.ndim == 3 and arr.shape[2] == 1:
            arr = arr[:, :, 0]
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"edge mask must be a nonempty 2-D array, got {arr.shape}")
        return arr.astype(bool)

    @property
    def height(self) -> int:
        return int(self.mask.shape[0])

    @property
    def width(self) -> int:
        return int(self.mask.shape[1])

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.mask))


class EdgeDistField(BaseModel):
    """Per-pixel guidance weights, e_edge on edges ramping to e_max."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    e_edge: float = settings.e_edge
    e_max: float = settings.e_max
    tau: float = settings.tau

    @field_validator("values")
    @classmethod
    def _check_values(cls, value: np.ndarray) -> np.ndarray:
        arr = np.asarray(value, dtype=np.float32)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3 or arr.shape[2] != 1:
            raise ValueError(f"edge-dist field must be single-channel (H, W, 1), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("edge-dist field contains non-finite values")
        return arr

    @model_validator(mode="after")
    def _check_range(self) -> "EdgeDistField":
        if not 0.0 <= self.e_edge < self.e_max <= 1.0:
            raise ValueError(f"need 0 <= e_edge < e_max <= 1, got {self.e_edge}, {self.e_max}")
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        return self

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @classmethod
    def uniform(cls, height: int, width: int, value: float = 1.0) -> "EdgeDistField":
        """Field with every pixel at `value`; with 1.0 an EGCL acts as a normalized convolution."""
        return cls(values=np.full((height, width, 1), value, dtype=np.float32))


class CannyConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    low_threshold: float = 50.0
    high_threshold: float = 150.0
    aperture: int = 3
    blur_sigma: float = 1.0

    @field_validator("aperture")
    @classmethod
    def _check_aperture(cls, value: int) -> int:
        if value not in (3, 5):
            raise ValueError(f"aperture must be 3 or 5, got {value}")
        return value

    @field_validator("blur_sigma")
    @classmethod
    def _check_sigma(cls, value: float) -> float:
        if value < 0:
            raise ValueError(f"blur_sigma must be >= 0, got {value}")
        return value

    @model_validator(mode="after")
    def _check_thresholds(self) -> "CannyConfig":
        if self.low_threshold >= self.high_threshold:
            raise ValueError(
                f"low_threshold ({self.low_threshold}) must be below high_threshold ({self.high_threshold})"
            )
        return self
