# application/services/evaluation_service.py

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, TypeVar

import numpy as np

from common.config import settings
from domain.entities.edge_field import EdgeDistField
from domain.entities.metric_report import MetricReport
from domain.metrics import evaluate
from domain.network.upsampler import UpsamplerModel, upsample
from application.services.dataset_service import Scene, sample_seed, sparsify

logger = logging.getLogger(__name__)

T = TypeVar("T")


def ordered_map(fn: Callable[[int], T], count: int, workers: int = settings.workers) -> List[T]:
    """fn(0..count-1), possibly on threads, results in index order."""
    if workers <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def evaluate_upsampler(
    model: UpsamplerModel,
    scenes: Sequence[Scene],
    rate: float,
    seed: int,
    fields: Optional[Dict[str, EdgeDistField]] = None,
    workers: int = settings.workers,
) -> List[MetricReport]:
    """
    One MetricReport per scene. Samples use the same seeds as training's
    epoch 0, so a held-out directory gets draws independent of its contents.
    """
    fields = fields or {}

    def run(index: int) -> MetricReport:
        scene = scenes[index]
        sample = sparsify(scene.depth, rate, sample_seed(seed, index, 0, len(scenes)))
        dense, _ = upsample(model, sample, fields.get(scene.name))
        return evaluate(dense, scene.depth)

    reports = ordered_map(run, len(scenes), workers)
    logger.info("evaluated %s model on %d scenes: mae=%.6g", model.kind.value, len(reports),
                float(np.mean([r.mae for r in reports])))
    return reports


def with_mean(reports: List[MetricReport]) -> List[MetricReport]:
    """Per-image rows followed by their mean."""
    return list(reports) + [MetricReport.mean(reports)]
