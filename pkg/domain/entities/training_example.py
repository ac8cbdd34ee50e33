# domain/entities/training_example.py

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from domain.entities.layer_io import LayerIO


class TrainingExample(BaseModel):
    """Network input streams plus the dense target they should reproduce."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    inputs: LayerIO
    target: np.ndarray

    @field_validator("target")
    @classmethod
    def _check_target(cls, value: np.ndarray) -> np.ndarray:
        arr = np.asarray(value, dtype=np.float32)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3 or arr.shape[2] != 1:
            raise ValueError(f"target must be (H, W, 1), got {arr.shape}")
        return arr

    @model_validator(mode="after")
    def _check_alignment(self) -> "TrainingExample":
        if self.inputs.data.shape[:2] != self.target.shape[:2]:
            raise ValueError(
                f"inputs {self.inputs.data.shape[:2]} and target {self.target.shape[:2]} not aligned"
            )
        return self
