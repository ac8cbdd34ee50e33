# infrastructure/__init__.py

from infrastructure.checkpoint_store import load_checkpoint, save_checkpoint
from infrastructure.edge_field_cache import EdgeFieldCache, image_digest
from infrastructure.raster_store import LocalRasterStore

__all__ = ["EdgeFieldCache", "LocalRasterStore", "image_digest", "load_checkpoint", "save_checkpoint"]
