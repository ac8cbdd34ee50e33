# application/services/dataset_service.py
# -----------------------------------------------------------------------------
# Sparse sampling, the synthetic box-world generator and dataset directories.
#
# A box-world scene is a dark background at the far depth plus axis-aligned
# rectangles at constant depths. Each rectangle carries colour-only stripes,
# so its colour image has edges that its depth does not.
# -----------------------------------------------------------------------------

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from common.errors import DatasetError, ParameterRangeError
from domain.contracts.i_example_source import IExampleSource
from domain.contracts.i_raster_store import IRasterStore, PathLike
from domain.entities.depth_sample import Rectangle, SceneConfig, SceneManifest, SceneRecord, SparseDepthSample
from domain.entities.edge_field import EdgeDistField
from domain.entities.grid import as_grid
from domain.entities.training_example import TrainingExample
from domain.network.upsampler import UpsamplerModel

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
BACKGROUND_COLOR = (16, 16, 16)
# Fill channels stay in this band so stripes fit below 255 and borders stay bright against the background
_FILL_RANGE = (120, 176)
_STRIPE_PERIODS = (4, 11)


def sampled_count(rate: float, pixels: int) -> int:
    """round(rate·N), halves rounded up."""
    return int(np.floor(rate * pixels + 0.5))


def sparsify(dense: np.ndarray, rate: float, seed: int) -> SparseDepthSample:
    """
    Keep exactly round(rate·H·W) pixels, drawn uniformly without replacement.

    Raises:
        ParameterRangeError: rate outside (0, 1].
    """
    if not 0.0 < rate <= 1.0:
        raise ParameterRangeError(f"sampling rate must lie in (0, 1], got {rate}")
    gt = as_grid(dense)
    if gt.shape[2] != 1:
        raise ParameterRangeError(f"dense depth must be single-channel, got {gt.shape}")
    height, width = gt.shape[:2]
    n = height * width
    rng = np.random.default_rng(seed)
    chosen = rng.choice(n, size=sampled_count(rate, n), replace=False)
    mask = np.zeros(n, dtype=np.float32)
    mask[chosen] = 1.0
    confidence = mask.reshape(height, width, 1)
    return SparseDepthSample(
        sparse_depth=gt * confidence,
        confidence=confidence,
        ground_truth=gt,
        sampling_rate=rate,
    )


def plan_rectangles(cfg: SceneConfig) -> List[Rectangle]:
    """Seeded rectangle layout in painting order (farthest first)."""
    rng = np.random.default_rng(cfg.seed)
    rects = []
    for _ in range(cfg.rectangles):
        h = int(rng.integers(max(2, cfg.height // 6), max(3, cfg.height // 2) + 1))
        w = int(rng.integers(max(2, cfg.width // 6), max(3, cfg.width // 2) + 1))
        top = int(rng.integers(0, cfg.height - h + 1))
        left = int(rng.integers(0, cfg.width - w + 1))
        depth = float(rng.uniform(cfg.depth_min, min(cfg.depth_max, cfg.resolved_background_depth)))
        color = tuple(int(c) for c in rng.integers(_FILL_RANGE[0], _FILL_RANGE[1], size=3))
        rects.append(
            Rectangle(
                top=top,
                left=left,
                bottom=top + h,
                right=left + w,
                depth=depth,
                color=color,
                stripe_period=int(rng.integers(*_STRIPE_PERIODS)),
                stripe_vertical=bool(rng.integers(0, 2)),
            )
        )
    return sorted(rects, key=lambda r: -r.depth)


def render_scene(cfg: SceneConfig, rectangles: Sequence[Rectangle]) -> Tuple[np.ndarray, np.ndarray]:
    """Paint rectangles in order onto the background; later ones cover earlier ones."""
    color = np.empty((cfg.height, cfg.width, 3), dtype=np.float64)
    color[:] = BACKGROUND_COLOR
    depth = np.full((cfg.height, cfg.width, 1), cfg.resolved_background_depth, dtype=np.float32)
    for rect in rectangles:
        rows = slice(rect.top, min(rect.bottom, cfg.height))
        cols = slice(rect.left, min(rect.right, cfg.width))
        ys, xs = np.mgrid[rows, cols]
        phase = (xs - rect.left) if rect.stripe_vertical else (ys - rect.top)
        band = (phase // max(1, rect.stripe_period // 2)) % 2
        fill = np.asarray(rect.color, dtype=np.float64)
        color[rows, cols] = fill + cfg.texture_amplitude * band[:, :, np.newaxis]
        depth[rows, cols] = rect.depth
    return np.clip(np.rint(color), 0, 255).astype(np.float32), depth


def synth_scene(cfg: SceneConfig) -> Tuple[np.ndarray, np.ndarray]:
    """(color (H, W, 3), dense depth (H, W, 1)) for one seeded box-world scene."""
    return render_scene(cfg, plan_rectangles(cfg))


@dataclass
class Scene:
    name: str
    color: np.ndarray
    depth: np.ndarray


def scene_config(index: int, seed: int, height: int, width: int, rectangles: int) -> SceneConfig:
    return SceneConfig(height=height, width=width, rectangles=rectangles, seed=seed + index)


class DatasetService:
    """Reads and writes dataset directories through an IRasterStore."""

    def __init__(self, store: IRasterStore):
        self.store = store

    def write_synthetic(
        self,
        out_dir: PathLike,
        count: int,
        size: Tuple[int, int],
        seed: int,
        rectangles: int = 4,
    ) -> SceneManifest:
        """
        Write `count` scenes as color_NNNN.png / depth_NNNN.pfm plus manifest.json.

        Scene i uses seed + i, so equal arguments give byte-identical files.
        """
        if count < 1:
            raise ParameterRangeError(f"scene count must be >= 1, got {count}")
        root = Path(out_dir)
        root.mkdir(parents=True, exist_ok=True)
        records = []
        for index in range(count):
            cfg = scene_config(index, seed, size[0], size[1], rectangles)
            rects = plan_rectangles(cfg)
            color, depth = render_scene(cfg, rects)
            name = f"{index:04d}"
            color_file, depth_file = f"color_{name}.png", f"depth_{name}.pfm"
            self.store.write_image(root / color_file, color)
            self.store.write_depth(root / depth_file, depth)
            records.append(
                SceneRecord(name=name, color_file=color_file, depth_file=depth_file, config=cfg, rectangles=rects)
            )
        manifest = SceneManifest(seed=seed, scenes=records)
        (root / MANIFEST_NAME).write_text(manifest.model_dump_json(indent=2) + "\n")
        logger.info("wrote %d synthetic scenes to %s", count, root)
        return manifest

    def read_manifest(self, data_dir: PathLike) -> Optional[SceneManifest]:
        path = Path(data_dir) / MANIFEST_NAME
        if not path.exists():
            return None
        try:
            return SceneManifest.model_validate_json(path.read_text())
        except ValueError as e:
            raise DatasetError(f"invalid manifest {path}: {e}") from e

    def load(self, data_dir: PathLike) -> List[Scene]:
        """
        Scenes listed in manifest.json, or every color_*/depth_* pair when there is none.

        Raises:
            DatasetError: missing directory, unpaired files, or no scenes.
        """
        root = Path(data_dir)
        if not root.is_dir():
            raise DatasetError(f"dataset directory {root} does not exist")
        manifest = self.read_manifest(root)
        if manifest is not None:
            pairs = [(r.name, root / r.color_file, root / r.depth_file) for r in manifest.scenes]
        else:
            pairs = self._glob_pairs(root)
        if not pairs:
            raise DatasetError(f"no (color, depth) pairs in {root}")
        scenes = []
        for name, color_path, depth_path in pairs:
            if not color_path.exists() or not depth_path.exists():
                raise DatasetError(f"scene {name}: missing {color_path.name} or {depth_path.name}")
            depth = self.store.read_depth(depth_path)
            color = self.store.read_image(color_path)
            if color.shape[:2] != depth.shape[:2]:
                raise DatasetError(f"scene {name}: color {color.shape[:2]} and depth {depth.shape[:2]} differ")
            scenes.append(Scene(name=name, color=color, depth=depth))
        logger.debug("loaded %d scenes from %s", len(scenes), root)
        return scenes

    @staticmethod
    def _glob_pairs(root: Path) -> List[Tuple[str, Path, Path]]:
        pairs = []
        for color_path in sorted(root.glob("color_*.png")):
            name = color_path.stem[len("color_"):]
            matches = sorted(root.glob(f"depth_{name}.*"))
            if not matches:
                raise DatasetError(f"color image {color_path.name} has no depth_{name}.* partner")
            pairs.append((name, color_path, matches[0]))
        return pairs


def sample_seed(seed: int, index: int, epoch: int, count: int) -> int:
    """Epoch 0 uses seed + index; later epochs shift by whole dataset lengths."""
    return seed + epoch * count + index


def make_examples(
    scenes: Sequence[Scene],
    rate: float,
    seed: int,
    model: UpsamplerModel,
    fields: Optional[Dict[str, EdgeDistField]] = None,
    epoch: int = 0,
) -> List[TrainingExample]:
    fields = fields or {}
    examples = []
    for index, scene in enumerate(scenes):
        sample = sparsify(scene.depth, rate, sample_seed(seed, index, epoch, len(scenes)))
        io = model.prepare_inputs(sample, fields.get(scene.name))
        examples.append(TrainingExample(name=scene.name, inputs=io, target=scene.depth))
    return examples


class StaticExampleSource(IExampleSource):
    """The same examples every epoch."""

    def __init__(self, examples: List[TrainingExample]):
        self.examples = list(examples)

    def __len__(self) -> int:
        return len(self.examples)

    def epoch_examples(self, epoch: int) -> List[TrainingExample]:
        return self.examples


class ResamplingExampleSource(IExampleSource):
    """Redraws every sparse sample at the start of each epoch."""

    def __init__(
        self,
        scenes: Sequence[Scene],
        rate: float,
        seed: int,
        model: UpsamplerModel,
        fields: Optional[Dict[str, EdgeDistField]] = None,
    ):
        self.scenes = list(scenes)
        self.rate = rate
        self.seed = seed
        self.model = model
        self.fields = fields

    def __len__(self) -> int:
        return len(self.scenes)

    def epoch_examples(self, epoch: int) -> List[TrainingExample]:
        return make_examples(self.scenes, self.rate, self.seed, self.model, self.fields, epoch)
