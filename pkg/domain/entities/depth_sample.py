# domain/entities/depth_sample.py

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from domain.entities.layer_io import LayerIO


class SparseDepthSample(BaseModel):
    """Sparse depth + binary confidence drawn from a dense ground truth."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sparse_depth: np.ndarray
    confidence: np.ndarray
    ground_truth: Optional[np.ndarray] = None
    sampling_rate: float = 1.0

    @field_validator("sparse_depth", "confidence", "ground_truth")
    @classmethod
    def _three_dims(cls, value: Optional[np.ndarray]) -> Optional[np.ndarray]:
        if value is None:
            return value
        arr = np.asarray(value, dtype=np.float32)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3 or arr.shape[2] != 1:
            raise ValueError(f"depth grids must be single-channel (H, W, 1), got {arr.shape}")
        return arr

    @field_validator("sampling_rate")
    @classmethod
    def _check_rate(cls, value: float) -> float:
        if not 0.0 < value <= 1.0:
            raise ValueError(f"sampling_rate must lie in (0, 1], got {value}")
        return value

    @model_validator(mode="after")
    def _check_consistency(self) -> "SparseDepthSample":
        if self.sparse_depth.shape != self.confidence.shape:
            raise ValueError(
                f"sparse depth and confidence differ: {self.sparse_depth.shape} vs {self.confidence.shape}"
            )
        if self.ground_truth is not None and self.ground_truth.shape != self.sparse_depth.shape:
            raise ValueError(
                f"ground truth {self.ground_truth.shape} not aligned with {self.sparse_depth.shape}"
            )
        if np.any((self.confidence < 0) | (self.confidence > 1)):
            raise ValueError("confidence must lie in [0, 1]")
        return self

    @property
    def height(self) -> int:
        return int(self.sparse_depth.shape[0])

    @property
    def width(self) -> int:
        return int(self.sparse_depth.shape[1])

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.confidence == 0) | (self.confidence == 1)))

    def to_layer_io(self, edge_dist: Optional[np.ndarray] = None) -> LayerIO:
        return LayerIO.from_data(self.sparse_depth, self.confidence, edge_dist)


class Rectangle(BaseModel):
    """Axis-aligned box [top, bottom) × [left, right) at constant depth."""

    model_config = ConfigDict(frozen=True)

    top: int
    left: int
    bottom: int
    right: int
    depth: float
    color: Tuple[int, int, int]
    stripe_period: int
    stripe_vertical: bool

    @model_validator(mode="after")
    def _check_box(self) -> "Rectangle":
        if not (0 <= self.top < self.bottom and 0 <= self.left < self.right):
            raise ValueError(f"degenerate rectangle {self}")
        if self.depth <= 0:
            raise ValueError(f"depth must be positive, got {self.depth}")
        return self


class SceneConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    height: int = 128
    width: int = 128
    rectangles: int = 4
    depth_min: float = 2.0
    depth_max: float = 20.0
    background_depth: Optional[float] = None
    texture_amplitude: float = 80.0
    seed: int = 0

    @field_validator("height", "width")
    @classmethod
    def _check_size(cls, value: int) -> int:
        if value < 4:
            raise ValueError(f"scene extents must be >= 4, got {value}")
        return value

    @field_validator("rectangles")
    @classmethod
    def _check_count(cls, value: int) -> int:
        if value < 0:
            raise ValueError(f"rectangle count must be >= 0, got {value}")
        return value

    @model_validator(mode="after")
    def _check_depths(self) -> "SceneConfig":
        if not 0 < self.depth_min < self.depth_max:
            raise ValueError(f"need 0 < depth_min < depth_max, got {self.depth_min}, {self.depth_max}")
        if self.background_depth is not None and self.background_depth <= 0:
            raise ValueError(f"background_depth must be positive, got {self.background_depth}")
        return self

    @property
    def resolved_background_depth(self) -> float:
        return self.background_depth if self.background_depth is not None else self.depth_max


class SceneRecord(BaseModel):
    """Manifest entry for one synthetic scene."""

    name: str
    color_file: str
    depth_file: str
    config: SceneConfig
    rectangles: List[Rectangle]


class SceneManifest(BaseModel):
    seed: int
    scenes: List[SceneRecord]
