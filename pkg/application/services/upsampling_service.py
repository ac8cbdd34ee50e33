# application/services/upsampling_service.py
# -----------------------------------------------------------------------------
# Orchestration around trained models: single-image upsampling from files and
# the fusion stage, which runs frozen branch upsamplers and combines them.
# -----------------------------------------------------------------------------

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from common.config import settings
from common.errors import ConfigError, ParameterRangeError, ShapeMismatchError
from domain.contracts.i_raster_store import IRasterStore, PathLike
from domain.entities.depth_sample import SparseDepthSample
from domain.entities.edge_field import EdgeDistField
from domain.entities.layer_io import LayerIO
from domain.entities.metric_report import MetricReport
from domain.entities.training_example import TrainingExample
from domain.metrics import evaluate
from domain.network.fusion import Branch, FusionModel, fuse, fusion_inputs
from domain.network.upsampler import UpsamplerModel, upsample
from application.services.dataset_service import Scene, sample_seed, sparsify
from application.services.edge_field_service import EdgeFieldService
from application.services.evaluation_service import ordered_map

logger = logging.getLogger(__name__)


def confidence_path(depth_out: PathLike) -> Path:
    """Where the final confidence is written next to a dense depth output."""
    path = Path(depth_out)
    return path.with_name(f"{path.stem}_conf{path.suffix or '.pfm'}")


@dataclass
class BranchModel:
    """A frozen upsampler plus the edge preset it was trained with."""

    name: str
    model: UpsamplerModel
    preset: Optional[str] = None
    tau: float = settings.tau

    def __post_init__(self) -> None:
        if self.model.needs_edge_field and self.preset is None:
            raise ConfigError(f"branch {self.name}: edge model has no edge preset recorded")


class UpsamplingService:
    def __init__(self, store: IRasterStore, edge_fields: EdgeFieldService):
        self.store = store
        self.edge_fields = edge_fields

    def upsample_files(
        self,
        model: UpsamplerModel,
        depth_path: PathLike,
        conf_path: PathLike,
        out_path: PathLike,
        field_path: Optional[PathLike] = None,
    ) -> Tuple[Path, Path]:
        """
        Read sparse depth, confidence and an optional field; write dense depth
        and final confidence as PFM.

        Raises:
            ConfigError: an edge model without a field.
            ShapeMismatchError: inputs of different sizes.
        """
        depth = self.store.read_depth(depth_path)
        conf = self.store.read_confidence(conf_path)
        if depth.shape != conf.shape:
            raise ShapeMismatchError(f"depth {depth.shape} and confidence {conf.shape} differ")
        field = self.store.read_field(field_path) if field_path is not None else None
        if field is None and model.needs_edge_field:
            raise ConfigError("an edge-guided checkpoint needs --edge-field")
        try:
            sample = SparseDepthSample(sparse_depth=depth, confidence=conf)
        except ValueError as e:
            raise ParameterRangeError(f"invalid sparse input: {e}") from e
        dense, out_conf = upsample(model, sample, field)
        out = Path(out_path)
        self.store.write_depth(out, dense)
        self.store.write_depth(confidence_path(out), out_conf)
        logger.info("upsampled %s -> %s", depth_path, out)
        return out, confidence_path(out)

    def branch_fields(self, branches: Sequence[BranchModel], scenes: Sequence[Scene]) -> List[Dict[str, EdgeDistField]]:
        return [
            self.edge_fields.fields_for_scenes(scenes, b.preset, b.tau) if b.model.needs_edge_field else {}
            for b in branches
        ]

    @staticmethod
    def branch_outputs(
        branches: Sequence[BranchModel],
        fields: Sequence[Dict[str, EdgeDistField]],
        scene: Scene,
        sample: SparseDepthSample,
    ) -> List[Branch]:
        return [upsample(b.model, sample, f.get(scene.name)) for b, f in zip(branches, fields)]

    def fusion_examples(
        self,
        branches: Sequence[BranchModel],
        scenes: Sequence[Scene],
        rate: float,
        seed: int,
        workers: int = settings.workers,
    ) -> List[TrainingExample]:
        """Fusion inputs per scene, from the branches' outputs on the epoch-0 samples."""
        if len(branches) < 2:
            raise ParameterRangeError(f"fusion needs at least 2 branches, got {len(branches)}")
        fields = self.branch_fields(branches, scenes)

        def run(index: int) -> TrainingExample:
            scene = scenes[index]
            sample = sparsify(scene.depth, rate, sample_seed(seed, index, 0, len(scenes)))
            outputs = self.branch_outputs(branches, fields, scene, sample)
            return TrainingExample(
                name=scene.name,
                inputs=LayerIO.from_data(fusion_inputs(outputs)),
                target=scene.depth,
            )

        return ordered_map(run, len(scenes), workers)

    def evaluate_fusion(
        self,
        fusion: FusionModel,
        branches: Sequence[BranchModel],
        scenes: Sequence[Scene],
        rate: float,
        seed: int,
        workers: int = settings.workers,
    ) -> Tuple[List[MetricReport], Dict[str, List[MetricReport]]]:
        """Reports of the fused output and of each branch alone, per scene."""
        if len(branches) != fusion.branch_count:
            raise ShapeMismatchError(f"fusion expects {fusion.branch_count} branches, got {len(branches)}")
        fields = self.branch_fields(branches, scenes)

        def run(index: int) -> Tuple[MetricReport, List[MetricReport]]:
            scene = scenes[index]
            sample = sparsify(scene.depth, rate, sample_seed(seed, index, 0, len(scenes)))
            outputs = self.branch_outputs(branches, fields, scene, sample)
            fused = evaluate(fuse(fusion, outputs), scene.depth)
            return fused, [evaluate(depth, scene.depth) for depth, _ in outputs]

        results = ordered_map(run, len(scenes), workers)
        fused = [r[0] for r in results]
        per_branch = {b.name: [r[1][k] for r in results] for k, b in enumerate(branches)}
        logger.info(
            "fusion rmse=%.6g, branches %s",
            float(np.mean([r.rmse for r in fused])),
            {name: round(float(np.mean([r.rmse for r in reps])), 6) for name, reps in per_branch.items()},
        )
        return fused, per_branch
