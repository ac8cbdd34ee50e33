# api/cli/commands.py
# -----------------------------------------------------------------------------
# Command handlers. Each takes a resolved RunConfig and an Outputs tracker;
# files registered with the tracker are removed if the command fails.
# -----------------------------------------------------------------------------

from __future__ import annotations

import logging
import shutil
from pathlib import Path
from typing import Callable, Dict, List, Optional

from api.cli.run_config import RunConfig, read_key_values, run_config_path, write_run_config
from application.services.dataset_service import (
    MANIFEST_NAME,
    DatasetService,
    ResamplingExampleSource,
    StaticExampleSource,
    make_examples,
)
from application.services.edge_field_service import EdgeFieldService, validate_preset
from application.services.evaluation_service import evaluate_upsampler, with_mean
from application.services.training_service import train
from application.services.upsampling_service import BranchModel, UpsamplingService, confidence_path
from common.config import settings
from common.errors import ConfigError, DatasetError
from domain.entities.network_spec import TrainConfig
from domain.network.fusion import FusionModel, build_fusion
from domain.network.upsampler import UpsamplerModel, build_upsampler
from infrastructure.checkpoint_store import load_checkpoint, save_checkpoint
from infrastructure.edge_field_cache import EdgeFieldCache
from infrastructure.raster_store import LocalRasterStore
from infrastructure.report_writer import write_loss_history, write_metric_report

logger = logging.getLogger(__name__)


class Outputs:
    """Paths a command creates; `discard` removes the ones that did not exist before."""

    def __init__(self) -> None:
        self._created: List[Path] = []

    def add(self, path) -> Path:
        p = Path(path)
        if not p.exists():
            self._created.append(p)
        return p

    def discard(self) -> None:
        for path in reversed(self._created):
            if path.is_dir():
                shutil.rmtree(path, ignore_errors=True)
            elif path.exists():
                path.unlink()
            logger.debug("removed partial output %s", path)
        self._created.clear()


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) in (None, [])]
    if missing:
        raise ConfigError(f"{cfg.command}: missing required option(s) {', '.join('--' + n.replace('_', '-') for n in missing)}")


def _require_files(*paths: Optional[str]) -> None:
    for p in paths:
        if p is not None and not Path(p).is_file():
            raise ConfigError(f"input file {p} does not exist")


def _require_dir(path: str) -> None:
    if not Path(path).is_dir():
        raise DatasetError(f"dataset directory {path} does not exist")


def _write_sidecar(cfg: RunConfig, output: str, outputs: Outputs, directory: bool = False) -> None:
    outputs.add(run_config_path(output, directory))
    write_run_config(cfg, output, directory)


def _services():
    store = LocalRasterStore()
    edge_fields = EdgeFieldService(store, EdgeFieldCache(store, settings.cache_dir))
    return store, edge_fields


def _train_config(cfg: RunConfig) -> TrainConfig:
    return TrainConfig(
        learning_rate=cfg.learning_rate,
        epochs=cfg.epochs,
        batch_size=cfg.batch_size,
        seed=cfg.seed,
        workers=cfg.workers,
        keep_best=cfg.keep_best,
        resample_each_epoch=cfg.resample_each_epoch,
    )


def loss_csv_path(cfg: RunConfig) -> Path:
    if cfg.loss_csv:
        return Path(cfg.loss_csv)
    out = Path(cfg.out)
    return out.with_name(out.stem + "_loss.csv")


def _recorded_settings(ckpt: str) -> Dict[str, str]:
    path = run_config_path(ckpt)
    return read_key_values(str(path)) if path.is_file() else {}


def _edge_setup(cfg: RunConfig, ckpt: Optional[str] = None):
    """Preset and tau: explicit option, then the checkpoint's sidecar, then settings."""
    recorded = _recorded_settings(ckpt) if ckpt else {}
    preset = cfg.preset or recorded.get("preset") or settings.default_preset
    tau = cfg.tau if cfg.tau is not None else float(recorded.get("tau", settings.tau))
    return validate_preset(preset), tau


def _load_upsampler(path: str) -> UpsamplerModel:
    model = load_checkpoint(path)
    if not isinstance(model, UpsamplerModel):
        raise ConfigError(f"{path} holds a fusion network, expected an upsampler")
    return model


def _load_branches(cfg: RunConfig) -> List[BranchModel]:
    if len(cfg.branches) < 2:
        raise ConfigError(f"fusion needs at least 2 --branch checkpoints, got {len(cfg.branches)}")
    _require_files(*cfg.branches)
    branches = []
    for path in cfg.branches:
        model = _load_upsampler(path)
        recorded = _recorded_settings(path)
        branches.append(
            BranchModel(
                name=Path(path).stem,
                model=model,
                preset=recorded.get("preset") if model.needs_edge_field else None,
                tau=float(recorded.get("tau", settings.tau)),
            )
        )
    return branches


# -------------------------------
# Commands
# -------------------------------
def cmd_synth(cfg: RunConfig, outputs: Outputs) -> None:
    _require(cfg, "out")
    store, _ = _services()
    root = outputs.add(cfg.out)
    for index in range(cfg.count):
        outputs.add(root / f"color_{index:04d}.png")
        outputs.add(root / f"depth_{index:04d}.pfm")
    outputs.add(root / MANIFEST_NAME)
    DatasetService(store).write_synthetic(root, cfg.count, cfg.size_hw, cfg.seed, cfg.rectangles)
    _write_sidecar(cfg, cfg.out, outputs, directory=True)


def cmd_edge_field(cfg: RunConfig, outputs: Outputs) -> None:
    _require(cfg, "image", "out")
    _require_files(cfg.image)
    preset, tau = _edge_setup(cfg)
    store, edge_fields = _services()
    image = store.read_image(cfg.image)
    field = edge_fields.field_for_image(image, preset, tau, cfg.e_edge, cfg.e_max)
    store.write_field(outputs.add(cfg.out), field)
    _write_sidecar(cfg.model_copy(update={"preset": preset, "tau": tau}), cfg.out, outputs)


def cmd_train(cfg: RunConfig, outputs: Outputs) -> None:
    _require(cfg, "data", "kind", "out")
    _require_dir(cfg.data)
    store, edge_fields = _services()
    scenes = DatasetService(store).load(cfg.data)
    model = build_upsampler(cfg.kind, seed=cfg.seed, gamma_kind=cfg.gamma)
    preset, tau = _edge_setup(cfg)
    fields = edge_fields.fields_for_scenes(scenes, preset, tau) if model.needs_edge_field else {}

    train_cfg = _train_config(cfg)
    if train_cfg.resample_each_epoch:
        source = ResamplingExampleSource(scenes, cfg.rate, cfg.seed, model, fields)
    else:
        source = StaticExampleSource(make_examples(scenes, cfg.rate, cfg.seed, model, fields))
    logger.info("training %s upsampler on %d scenes at rate %g", model.kind.value, len(scenes), cfg.rate)
    result = train(model, source, train_cfg)

    save_checkpoint(model, outputs.add(cfg.out))
    write_loss_history(outputs.add(loss_csv_path(cfg)), result.history)
    resolved = cfg.model_copy(update={"preset": preset if model.needs_edge_field else None, "tau": tau})
    _write_sidecar(resolved, cfg.out, outputs)


def cmd_eval(cfg: RunConfig, outputs: Outputs) -> None:
    _require(cfg, "ckpt", "data", "report")
    _require_files(cfg.ckpt)
    _require_dir(cfg.data)
    store, edge_fields = _services()
    model = _load_upsampler(cfg.ckpt)
    scenes = DatasetService(store).load(cfg.data)
    fields = {}
    preset, tau = None, None
    if model.needs_edge_field:
        preset, tau = _edge_setup(cfg, cfg.ckpt)
        fields = edge_fields.fields_for_scenes(scenes, preset, tau)
    reports = evaluate_upsampler(model, scenes, cfg.rate, cfg.seed, fields, cfg.workers)
    write_metric_report(outputs.add(cfg.report), with_mean(reports))
    _write_sidecar(cfg.model_copy(update={"preset": preset, "tau": tau}), cfg.report, outputs)


def cmd_upsample(cfg: RunConfig, outputs: Outputs) -> None:
    _require(cfg, "ckpt", "depth", "conf", "out")
    _require_files(cfg.ckpt, cfg.depth, cfg.conf, cfg.edge_field)
    store, edge_fields = _services()
    model = _load_upsampler(cfg.ckpt)
    if model.needs_edge_field and cfg.edge_field is None:
        raise ConfigError("an edge-guided checkpoint needs --edge-field")
    outputs.add(cfg.out)
    outputs.add(confidence_path(cfg.out))
    UpsamplingService(store, edge_fields).upsample_files(model, cfg.depth, cfg.conf, cfg.out, cfg.edge_field)
    _write_sidecar(cfg, cfg.out, outputs)


def cmd_fuse_train(cfg: RunConfig, outputs: Outputs) -> None:
    _require(cfg, "data", "out")
    _require_dir(cfg.data)
    branches = _load_branches(cfg)
    store, edge_fields = _services()
    scenes = DatasetService(store).load(cfg.data)
    service = UpsamplingService(store, edge_fields)
    examples = service.fusion_examples(branches, scenes, cfg.rate, cfg.seed, cfg.workers)
    fusion = build_fusion(len(branches), cfg.hidden, cfg.seed)
    result = train(fusion, StaticExampleSource(examples), _train_config(cfg))
    save_checkpoint(fusion, outputs.add(cfg.out))
    write_loss_history(outputs.add(loss_csv_path(cfg)), result.history)
    _write_sidecar(cfg, cfg.out, outputs)


def cmd_fuse_eval(cfg: RunConfig, outputs: Outputs) -> None:
    _require(cfg, "ckpt", "data", "report")
    _require_files(cfg.ckpt)
    _require_dir(cfg.data)
    branches = _load_branches(cfg)
    fusion = load_checkpoint(cfg.ckpt)
    if not isinstance(fusion, FusionModel):
        raise ConfigError(f"{cfg.ckpt} holds an upsampler, expected a fusion network")
    store, edge_fields = _services()
    scenes = DatasetService(store).load(cfg.data)
    fused, per_branch = UpsamplingService(store, edge_fields).evaluate_fusion(
        fusion, branches, scenes, cfg.rate, cfg.seed, cfg.workers
    )
    report = Path(cfg.report)
    write_metric_report(outputs.add(report), with_mean(fused))
    for name, reports in per_branch.items():
        write_metric_report(outputs.add(report.with_name(f"{report.stem}_{name}{report.suffix}")), with_mean(reports))
    _write_sidecar(cfg, cfg.report, outputs)


def cmd_serve(host: str, port: int) -> None:
    import uvicorn

    uvicorn.run("main:app", host=host, port=port)


COMMANDS: Dict[str, Callable[[RunConfig, Outputs], None]] = {
    "synth": cmd_synth,
    "edge-field": cmd_edge_field,
    "train": cmd_train,
    "eval": cmd_eval,
    "upsample": cmd_upsample,
    "fuse-train": cmd_fuse_train,
    "fuse-eval": cmd_fuse_eval,
}
