# tests/acceptance/test_direction.py
# End-to-end runs on 128×128 box-world scenes. Minutes on a 4-core CPU.

import numpy as np
import pytest

from application.services.dataset_service import (
    Scene,
    StaticExampleSource,
    make_examples,
    sample_seed,
    scene_config,
    sparsify,
    synth_scene,
)
from application.services.edge_field_service import EdgeFieldService
from application.services.evaluation_service import evaluate_upsampler
from application.services.training_service import train
from application.services.upsampling_service import BranchModel, UpsamplingService
from domain.entities.network_spec import TrainConfig, UpsamplerKind
from domain.metrics import mae
from domain.network import build_fusion, build_upsampler
from infrastructure.raster_store import LocalRasterStore

pytestmark = pytest.mark.slow

SCENES = 20
SIZE = 128
RATE = 0.05
TRAIN_SEED = 100
HELD_OUT_SEED = 900
BUDGET = TrainConfig(epochs=30, learning_rate=1e-2, batch_size=4, seed=0, workers=4, keep_best=True)


def _scenes(seed):
    out = []
    for index in range(SCENES):
        color, depth = synth_scene(scene_config(index, seed, SIZE, SIZE, 4))
        out.append(Scene(name=f"{seed}_{index:04d}", color=color, depth=depth))
    return out


@pytest.fixture(scope="module")
def edge_fields():
    return EdgeFieldService(LocalRasterStore())


@pytest.fixture(scope="module")
def train_scenes():
    return _scenes(TRAIN_SEED)


@pytest.fixture(scope="module")
def held_out():
    return _scenes(HELD_OUT_SEED)


def _fit(kind, scenes, edge_fields, preset="canny-k3"):
    model = build_upsampler(kind, seed=0)
    fields = edge_fields.fields_for_scenes(scenes, preset) if model.needs_edge_field else {}
    train(model, StaticExampleSource(make_examples(scenes, RATE, TRAIN_SEED, model, fields)), BUDGET)
    return model


def _held_out_mae(model, scenes, edge_fields, preset="canny-k3"):
    fields = edge_fields.fields_for_scenes(scenes, preset) if model.needs_edge_field else {}
    reports = evaluate_upsampler(model, scenes, RATE, HELD_OUT_SEED, fields, workers=4)
    return float(np.mean([r.mae for r in reports]))


@pytest.fixture(scope="module")
def trained(train_scenes, edge_fields):
    return {kind: _fit(kind, train_scenes, edge_fields) for kind in UpsamplerKind}


def test_edge_guidance_lowers_mae(trained, held_out, edge_fields):
    scores = {kind: _held_out_mae(model, held_out, edge_fields) for kind, model in trained.items()}
    assert scores[UpsamplerKind.EDGE] < scores[UpsamplerKind.NORMAL]
    assert scores[UpsamplerKind.EDGE] < scores[UpsamplerKind.SPARSE]


def test_trained_model_beats_mean_fill(trained, held_out, edge_fields):
    baseline = []
    for index, scene in enumerate(held_out):
        sample = sparsify(scene.depth, RATE, sample_seed(HELD_OUT_SEED, index, 0, len(held_out)))
        observed = sample.sparse_depth[sample.confidence > 0]
        baseline.append(mae(np.full_like(scene.depth, observed.mean()), scene.depth))
    assert _held_out_mae(trained[UpsamplerKind.EDGE], held_out, edge_fields) < float(np.mean(baseline))


def test_fusion_rmse_within_one_percent_of_best_branch(train_scenes, held_out, edge_fields):
    branches = [
        BranchModel(name=preset, model=_fit(UpsamplerKind.EDGE, train_scenes, edge_fields, preset), preset=preset)
        for preset in ("canny-k3", "canny-k5")
    ]
    service = UpsamplingService(LocalRasterStore(), edge_fields)
    examples = service.fusion_examples(branches, train_scenes, RATE, TRAIN_SEED, workers=4)
    fusion = build_fusion(len(branches), seed=0)
    train(fusion, StaticExampleSource(examples), BUDGET.model_copy(update={"batch_size": SCENES}))

    fused, per_branch = service.evaluate_fusion(fusion, branches, held_out, RATE, HELD_OUT_SEED, workers=4)
    fused_rmse = float(np.mean([r.rmse for r in fused]))
    best_branch = min(float(np.mean([r.rmse for r in reps])) for reps in per_branch.values())
    assert fused_rmse <= best_branch * 1.01
