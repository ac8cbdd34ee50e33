# domain/entities/layer_io.py

from __future__ import annotations

from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

from common.config import settings
from domain.entities.grid import Kernel


class GammaKind(str, Enum):
    SOFTPLUS = "softplus"
    RELU_SHIFT = "relu_shift"


class LayerKind(str, Enum):
    EGCL = "egcl"
    NCONV = "nconv"
    SCONV = "sconv"
    PLAIN = "plain"


class Activation(str, Enum):
    NONE = "none"
    RELU = "relu"


class LayerIO(BaseModel):
    """Data, confidence and edge-dist streams flowing between guided layers."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: np.ndarray
    confidence: np.ndarray
    edge_dist: np.ndarray

    @field_validator("data", "confidence", "edge_dist")
    @classmethod
    def _three_dims(cls, value: np.ndarray) -> np.ndarray:
        arr = np.asarray(value)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3:
            raise ValueError(f"layer streams must be (H, W, C), got {arr.shape}")
        return arr

    @model_validator(mode="after")
    def _check_alignment(self) -> "LayerIO":
        if self.data.shape != self.confidence.shape:
            raise ValueError(
                f"data and confidence must match: {self.data.shape} vs {self.confidence.shape}"
            )
        if self.edge_dist.shape != self.data.shape[:2] + (1,):
            raise ValueError(
                f"edge_dist must be single-channel and aligned: {self.edge_dist.shape} vs {self.data.shape}"
            )
        return self

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def channels(self) -> int:
        return int(self.data.shape[2])

    @classmethod
    def from_data(
        cls,
        data: np.ndarray,
        confidence: Optional[np.ndarray] = None,
        edge_dist: Optional[np.ndarray] = None,
    ) -> "LayerIO":
        """Fill missing confidence / edge-dist with ones."""
        arr = np.asarray(data)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if confidence is None:
            confidence = np.ones_like(arr)
        if edge_dist is None:
            edge_dist = np.ones(arr.shape[:2] + (1,), dtype=arr.dtype)
        return cls(data=arr, confidence=confidence, edge_dist=edge_dist)


class EgclParams(BaseModel):
    """W, b, the fixed center-only W′, ε and the Γ choice of one guided layer."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    w: Kernel
    b: np.ndarray
    epsilon: float = settings.epsilon
    gamma: GammaKind = GammaKind(settings.gamma)
    # Built from w's extents when omitted
    w_prime: Optional[Kernel] = Field(default=None, validate_default=True)

    @field_validator("b")
    @classmethod
    def _check_bias(cls, value: np.ndarray) -> np.ndarray:
        arr = np.asarray(value)
        if arr.ndim != 1:
            raise ValueError(f"bias must be 1-D, got {arr.shape}")
        if not np.issubdtype(arr.dtype, np.floating):
            arr = arr.astype(np.float32)
        return arr

    @field_validator("w_prime")
    @classmethod
    def _check_w_prime(cls, value: Optional[Kernel], info: ValidationInfo) -> Optional[Kernel]:
        w = info.data.get("w")
        if w is None:
            return value
        if value is None:
            return Kernel.center_only(w.k_h, w.k_w)
        expected = np.zeros((w.k_h, w.k_w), dtype=bool)
        expected[w.k_h // 2, w.k_w // 2] = True
        wp = value.weights
        if wp.shape != (w.k_h, w.k_w, 1, 1):
            raise ValueError(f"w_prime must be ({w.k_h}, {w.k_w}, 1, 1), got {wp.shape}")
        if wp[w.k_h // 2, w.k_w // 2, 0, 0] != 1.0 or np.any(wp[~expected] != 0.0):
            raise ValueError("w_prime must be 1 at the window center and 0 elsewhere")
        return value

    @model_validator(mode="after")
    def _check_params(self) -> "EgclParams":
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.b.shape[0] != self.w.out_channels:
            raise ValueError(
                f"bias length {self.b.shape[0]} != out_channels {self.w.out_channels}"
            )
        if not (np.all(np.isfinite(self.w.weights)) and np.all(np.isfinite(self.b))):
            raise ValueError("layer parameters contain non-finite values")
        return self

    @property
    def kernel_size(self) -> int:
        return self.w.k_h

    @property
    def in_channels(self) -> int:
        return self.w.in_channels

    @property
    def out_channels(self) -> int:
        return self.w.out_channels

    @property
    def parameter_count(self) -> int:
        return int(self.w.weights.size + self.b.size)
