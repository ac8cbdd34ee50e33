# infrastructure/edge_field_cache.py

from __future__ import annotations

import hashlib
import logging
import re
from pathlib import Path
from typing import Optional

import numpy as np

from common.config import settings
from common.errors import RasterFormatError
from domain.contracts.i_raster_store import IRasterStore, PathLike
from domain.entities.edge_field import EdgeDistField

logger = logging.getLogger(__name__)

_UNSAFE = re.compile(r"[^A-Za-z0-9_.-]+")


def image_digest(image: np.ndarray) -> str:
    """sha256 over the decoded pixels and their shape."""
    arr = np.ascontiguousarray(image, dtype=np.float32)
    h = hashlib.sha256()
    h.update(repr(arr.shape).encode("ascii"))
    h.update(arr.tobytes())
    return h.hexdigest()


class EdgeFieldCache:
    """Directory of PFM fields keyed by (image digest, preset, tau)."""

    def __init__(self, store: IRasterStore, root: PathLike = settings.cache_dir):
        self.store = store
        self.root = Path(root)

    def path_for(self, digest: str, preset: str, tau: float) -> Path:
        name = f"{digest}_{_UNSAFE.sub('-', preset)}_tau{tau!r}.pfm"
        return self.root / name

    def get(self, digest: str, preset: str, tau: float) -> Optional[EdgeDistField]:
        path = self.path_for(digest, preset, tau)
        if not path.exists():
            logger.debug("edge-field cache miss %s", path.name)
            return None
        try:
            field = self.store.read_field(path)
        except RasterFormatError:
            logger.warning("discarding unreadable cache entry %s", path)
            path.unlink(missing_ok=True)
            return None
        logger.debug("edge-field cache hit %s", path.name)
        return field

    def put(self, digest: str, preset: str, tau: float, field: EdgeDistField) -> Path:
        path = self.path_for(digest, preset, tau)
        self.store.write_field(path, field)
        return path
