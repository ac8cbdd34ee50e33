# domain/contracts/i_raster_store.py
# -----------------------------------------------------------------------------
# File access for images, depth maps, edge maps and edge-dist fields. The
# domain and application layers only see this interface; the codecs live in
# infrastructure/.
# -----------------------------------------------------------------------------

from __future__ import annotations

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Optional, Union

import numpy as np

from domain.entities.edge_field import EdgeDistField, EdgeMap

PathLike = Union[str, Path]


class IRasterStore(ABC):
    """Read/write contract for every raster the toolkit exchanges with disk."""

    @abstractmethod
    def read_image(self, path: PathLike) -> np.ndarray:
        """8-bit grayscale or RGB image (PNG or PGM) as an (H, W, C) float32 grid."""

    @abstractmethod
    def write_image(self, path: PathLike, image: np.ndarray) -> None:
        """Write an 8-bit image, clipping to [0, 255]."""

    @abstractmethod
    def read_depth(self, path: PathLike, scale: Optional[float] = None) -> np.ndarray:
        """PFM, or 16-bit PNG/PGM divided by `scale`, as an (H, W, 1) float32 grid."""

    @abstractmethod
    def read_confidence(self, path: PathLike) -> np.ndarray:
        """PFM as stored, or 8/16-bit PNG/PGM divided by its full-scale value, as an (H, W, 1) grid."""

    @abstractmethod
    def write_depth(self, path: PathLike, depth: np.ndarray, scale: Optional[float] = None) -> None:
        """PFM (lossless) or 16-bit PNG/PGM multiplied by `scale`, chosen by suffix."""

    @abstractmethod
    def read_edge_map(self, path: PathLike) -> EdgeMap:
        """Binary image, nonzero = edge."""

    @abstractmethod
    def write_edge_map(self, path: PathLike, edges: EdgeMap) -> None:
        """8-bit PGM with 0 / 255."""

    @abstractmethod
    def read_field(self, path: PathLike) -> EdgeDistField:
        """Edge-dist field from PFM or 16-bit PGM."""

    @abstractmethod
    def write_field(self, path: PathLike, field: EdgeDistField) -> None:
        """PFM (lossless) or 16-bit PGM scaled by 65535, chosen by suffix."""
