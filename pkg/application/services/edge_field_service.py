# application/services/edge_field_service.py

from __future__ import annotations

import logging
from typing import Dict, Optional

import numpy as np

from common.config import settings
from common.errors import ConfigError, ShapeMismatchError
from domain.contracts.i_raster_store import IRasterStore, PathLike
from domain.entities.edge_field import CannyConfig, EdgeDistField, EdgeMap
from domain.imaging import build_edge_dist_field, canny_edges
from infrastructure.edge_field_cache import EdgeFieldCache, image_digest
from infrastructure.raster_store import LocalRasterStore

logger = logging.getLogger(__name__)

FILE_PREFIX = "file:"

PRESETS: Dict[str, CannyConfig] = {
    "canny-k3": CannyConfig(low_threshold=50, high_threshold=150, aperture=3),
    "canny-k5": CannyConfig(low_threshold=50, high_threshold=150, aperture=5),
}


def load_edge_map(path: PathLike, store: Optional[IRasterStore] = None) -> EdgeMap:
    """
    Binary edge image (PGM or PNG, nonzero = edge).

    Raises:
        RasterFormatError: unreadable file or unsupported format.
    """
    return (store or LocalRasterStore()).read_edge_map(path)


def validate_preset(preset: str) -> str:
    if preset in PRESETS:
        return preset
    if preset.startswith(FILE_PREFIX) and len(preset) > len(FILE_PREFIX):
        return preset
    raise ConfigError(f"unknown edge preset {preset!r}; use one of {sorted(PRESETS)} or file:PATH")


class EdgeFieldService:
    """
    Builds edge-dist fields from images with a named preset.

    Args:
        store: Raster access, used for `file:` edge maps and the cache.
        cache: Optional on-disk cache; None computes every field afresh.
    """

    def __init__(self, store: IRasterStore, cache: Optional[EdgeFieldCache] = None):
        self.store = store
        self.cache = cache

    def edge_map(self, image: np.ndarray, preset: str) -> EdgeMap:
        preset = validate_preset(preset)
        if preset.startswith(FILE_PREFIX):
            edges = load_edge_map(preset[len(FILE_PREFIX):], self.store)
            if (edges.height, edges.width) != tuple(image.shape[:2]):
                raise ShapeMismatchError(
                    f"edge map {(edges.height, edges.width)} does not match image {tuple(image.shape[:2])}"
                )
            return edges
        return canny_edges(image, PRESETS[preset])

    def field_for_image(
        self,
        image: np.ndarray,
        preset: str,
        tau: float = settings.tau,
        e_edge: float = settings.e_edge,
        e_max: float = settings.e_max,
    ) -> EdgeDistField:
        key = f"{validate_preset(preset)}_e{e_edge!r}-{e_max!r}"
        # file: presets are read fresh since the map on disk may change
        use_cache = self.cache is not None and preset in PRESETS
        digest = image_digest(image) if use_cache else ""
        if use_cache:
            cached = self.cache.get(digest, key, tau)
            if cached is not None:
                return EdgeDistField(values=cached.values, e_edge=e_edge, e_max=e_max, tau=tau)
        field = build_edge_dist_field(self.edge_map(image, preset), e_edge, e_max, tau)
        if use_cache:
            self.cache.put(digest, key, tau, field)
        return field

    def field_for_file(self, image_path: PathLike, preset: str, tau: float = settings.tau) -> EdgeDistField:
        return self.field_for_image(self.store.read_image(image_path), preset, tau)

    def fields_for_scenes(self, scenes, preset: str, tau: float = settings.tau) -> Dict[str, EdgeDistField]:
        """Field per scene name, computed from each scene's colour image."""
        fields = {scene.name: self.field_for_image(scene.color, preset, tau) for scene in scenes}
        logger.debug("built %d %s fields (tau=%g)", len(fields), preset, tau)
        return fields
