# infrastructure/raster_store.py
# -----------------------------------------------------------------------------
# Local-disk raster codecs. PFM and PGM are parsed with numpy; PNG goes through
# Pillow. Depth and field formats are picked from the file suffix.
# -----------------------------------------------------------------------------

from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from PIL import Image, UnidentifiedImageError

from common.config import settings
from common.errors import RasterFormatError, ShapeMismatchError
from domain.contracts.i_raster_store import IRasterStore, PathLike
from domain.entities.edge_field import EdgeDistField, EdgeMap
from domain.entities.grid import as_grid

logger = logging.getLogger(__name__)

FIELD_PGM_SCALE = 65535.0
# full-scale value of single-channel PNG modes, for rasters holding values in [0, 1]
_PNG_FULL_SCALE = {"1": 1.0, "L": 255.0, "I": 65535.0, "I;16": 65535.0, "I;16B": 65535.0, "I;16L": 65535.0}
_PGM_TOKEN = re.compile(rb"(#[^\n]*\n)|(\S+)")


def read_pfm(path: PathLike) -> np.ndarray:
    """(H, W, C) float32, top row first; C is 1 for "Pf" and 3 for "PF"."""
    data = _read_bytes(path)
    try:
        header, rest = data.split(b"\n", 1)
        dims, rest = rest.split(b"\n", 1)
        scale_line, raster = rest.split(b"\n", 1)
        channels = {b"Pf": 1, b"PF": 3}[header.strip()]
        width, height = (int(v) for v in dims.split())
        scale = float(scale_line)
    except (ValueError, KeyError) as e:
        raise RasterFormatError(f"{path}: malformed PFM header") from e
    dtype = np.dtype("<f4") if scale < 0 else np.dtype(">f4")
    count = width * height * channels
    if len(raster) < count * 4:
        raise RasterFormatError(f"{path}: PFM raster truncated ({len(raster)} of {count * 4} bytes)")
    values = np.frombuffer(raster, dtype=dtype, count=count).reshape(height, width, channels)
    # PFM stores the bottom row first
    return np.ascontiguousarray(values[::-1]).astype(np.float32)


def write_pfm(path: PathLike, grid: np.ndarray) -> None:
    g = as_grid(grid)
    height, width, channels = g.shape
    if channels not in (1, 3):
        raise ShapeMismatchError(f"PFM holds 1 or 3 channels, got {channels}")
    header = f"{'Pf' if channels == 1 else 'PF'}\n{width} {height}\n-1.0\n".encode("ascii")
    body = np.ascontiguousarray(g[::-1]).astype("<f4").tobytes()
    _write_bytes(path, header + body)


def read_pgm(path: PathLike) -> Tuple[np.ndarray, int]:
    """Raw integer samples (H, W) and maxval of a P2 or P5 file."""
    data = _read_bytes(path)
    tokens = []
    pos = 0
    while len(tokens) < 4:
        match = _PGM_TOKEN.search(data, pos)
        if match is None:
            raise RasterFormatError(f"{path}: truncated PGM header")
        pos = match.end()
        if match.group(2) is not None:
            tokens.append(match.group(2))
    magic = tokens[0]
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError as e:
        raise RasterFormatError(f"{path}: malformed PGM header") from e
    if magic not in (b"P2", b"P5") or not 0 < maxval < 65536:
        raise RasterFormatError(f"{path}: unsupported PGM variant {magic!r} maxval={maxval}")
    count = width * height
    if magic == b"P2":
        values = np.array(data[pos:].split()[:count], dtype=np.int64)
        if values.size < count:
            raise RasterFormatError(f"{path}: PGM raster truncated")
        return values.reshape(height, width), maxval
    # single whitespace byte separates header and raster
    raster = data[pos + 1:]
    dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    if len(raster) < count * dtype.itemsize:
        raise RasterFormatError(f"{path}: PGM raster truncated")
    return np.frombuffer(raster, dtype=dtype, count=count).reshape(height, width).astype(np.int64), maxval


def write_pgm(path: PathLike, values: np.ndarray, maxval: int) -> None:
    arr = np.asarray(values)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim != 2:
        raise ShapeMismatchError(f"PGM holds one channel, got shape {arr.shape}")
    dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode("ascii")
    _write_bytes(path, header + np.clip(arr, 0, maxval).astype(dtype).tobytes())


def _read_bytes(path: PathLike) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise RasterFormatError(f"cannot read {path}: {e}") from e


def _write_bytes(path: PathLike, payload: bytes) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(payload)
    logger.debug("wrote %s (%d bytes)", target, len(payload))


def _suffix(path: PathLike) -> str:
    return Path(path).suffix.lower()


class LocalRasterStore(IRasterStore):
    """IRasterStore over the local filesystem."""

    def __init__(self, depth_scale: float = settings.depth_png_scale):
        self.depth_scale = depth_scale

    def read_image(self, path: PathLike) -> np.ndarray:
        if _suffix(path) in (".pgm", ".pnm"):
            values, maxval = read_pgm(path)
            return as_grid(values * (255.0 / maxval))
        try:
            with Image.open(path) as img:
                img = img.convert("RGB") if img.mode not in ("L", "RGB") else img
                return as_grid(np.array(img))
        except (OSError, UnidentifiedImageError) as e:
            raise RasterFormatError(f"cannot decode image {path}: {e}") from e

    def write_image(self, path: PathLike, image: np.ndarray) -> None:
        g = as_grid(image)
        pixels = np.clip(np.rint(g), 0, 255).astype(np.uint8)
        if _suffix(path) in (".pgm", ".pnm"):
            write_pgm(path, pixels, 255)
            return
        if g.shape[2] not in (1, 3):
            raise ShapeMismatchError(f"images have 1 or 3 channels, got {g.shape[2]}")
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(pixels[:, :, 0] if g.shape[2] == 1 else pixels).save(path, format="PNG")
        logger.debug("wrote image %s", path)

    def read_depth(self, path: PathLike, scale: Optional[float] = None) -> np.ndarray:
        scale = scale or self.depth_scale
        suffix = _suffix(path)
        if suffix == ".pfm":
            grid = read_pfm(path)
            if grid.shape[2] != 1:
                raise RasterFormatError(f"{path}: depth PFM must be single-channel")
            return grid
        if suffix in (".pgm", ".pnm"):
            values, _ = read_pgm(path)
            return as_grid(values / scale)
        try:
            with Image.open(path) as img:
                values = np.array(img, dtype=np.float64)
        except (OSError, UnidentifiedImageError) as e:
            raise RasterFormatError(f"cannot decode depth image {path}: {e}") from e
        if values.ndim != 2:
            raise RasterFormatError(f"{path}: depth PNG must be single-channel")
        return as_grid(values / scale)

    def read_confidence(self, path: PathLike) -> np.ndarray:
        suffix = _suffix(path)
        if suffix == ".pfm":
            grid = read_pfm(path)
            if grid.shape[2] != 1:
                raise RasterFormatError(f"{path}: confidence PFM must be single-channel")
            return grid
        if suffix in (".pgm", ".pnm"):
            values, maxval = read_pgm(path)
            return as_grid(values / float(maxval))
        try:
            with Image.open(path) as img:
                mode = img.mode
                values = np.array(img, dtype=np.float64)
        except (OSError, UnidentifiedImageError) as e:
            raise RasterFormatError(f"cannot decode confidence image {path}: {e}") from e
        if mode not in _PNG_FULL_SCALE or values.ndim != 2:
            raise RasterFormatError(f"{path}: confidence PNG must be single-channel, got mode {mode}")
        return as_grid(values / _PNG_FULL_SCALE[mode])

    def write_depth(self, path: PathLike, depth: np.ndarray, scale: Optional[float] = None) -> None:
        scale = scale or self.depth_scale
        g = as_grid(depth)
        if g.shape[2] != 1:
            raise ShapeMismatchError(f"depth maps are single-channel, got {g.shape}")
        suffix = _suffix(path)
        if suffix == ".pfm":
            write_pfm(path, g)
            return
        quantized = np.clip(np.rint(g[:, :, 0].astype(np.float64) * scale), 0, 65535).astype(np.uint16)
        if suffix in (".pgm", ".pnm"):
            write_pgm(path, quantized, 65535)
            return
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(quantized).save(path, format="PNG")
        logger.debug("wrote 16-bit depth %s (scale %g)", path, scale)

    def read_edge_map(self, path: PathLike) -> EdgeMap:
        image = self.read_image(path)
        return EdgeMap(mask=np.any(image > 0, axis=2))

    def write_edge_map(self, path: PathLike, edges: EdgeMap) -> None:
        write_pgm(path, edges.mask.astype(np.uint8) * 255, 255)

    def read_field(self, path: PathLike) -> EdgeDistField:
        if _suffix(path) == ".pfm":
            values = read_pfm(path)
        else:
            raw, maxval = read_pgm(path)
            values = as_grid(raw / float(maxval))
        return EdgeDistField(values=values)

    def write_field(self, path: PathLike, field: EdgeDistField) -> None:
        if _suffix(path) == ".pfm":
            write_pfm(path, field.values)
            return
        write_pgm(path, np.rint(field.values.astype(np.float64) * FIELD_PGM_SCALE), int(FIELD_PGM_SCALE))
