# api/cli/run_config.py
# -----------------------------------------------------------------------------
# Plain-text key=value run configuration. Files and flags merge into one
# RunConfig (flags win); unknown keys are rejected. Every command writes the
# resolved config next to its outputs so the run can be repeated from it.
# -----------------------------------------------------------------------------

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from common.config import settings
from common.errors import ConfigError
from domain.entities.layer_io import GammaKind
from domain.entities.network_spec import UpsamplerKind

RUN_CONFIG_SUFFIX = ".run.cfg"
LIST_SEPARATOR = ","


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: str
    # paths
    data: Optional[str] = None
    out: Optional[str] = None
    ckpt: Optional[str] = None
    branches: List[str] = []
    report: Optional[str] = None
    loss_csv: Optional[str] = None
    image: Optional[str] = None
    depth: Optional[str] = None
    conf: Optional[str] = None
    edge_field: Optional[str] = None
    # data
    count: int = 1
    size: str = "128x128"
    rectangles: int = 4
    rate: float = 0.05
    preset: Optional[str] = None
    tau: Optional[float] = None
    e_edge: float = settings.e_edge
    e_max: float = settings.e_max
    # network and training
    kind: Optional[UpsamplerKind] = None
    gamma: GammaKind = GammaKind(settings.gamma)
    hidden: int = settings.fusion_hidden
    epochs: int = settings.epochs
    learning_rate: float = settings.learning_rate
    batch_size: int = settings.batch_size
    seed: int = settings.seed
    workers: int = settings.workers
    keep_best: bool = False
    resample_each_epoch: bool = False

    @field_validator("branches", mode="before")
    @classmethod
    def _split_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(LIST_SEPARATOR) if item.strip()]
        return value

    @field_validator("size")
    @classmethod
    def _check_size(cls, value: str) -> str:
        parse_size(value)
        return value

    @property
    def size_hw(self):
        return parse_size(self.size)

    def to_text(self) -> str:
        lines = []
        for name, value in self.model_dump(mode="json").items():
            if value is None:
                continue
            if isinstance(value, list):
                value = LIST_SEPARATOR.join(value)
            elif isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{name}={value}")
        return "\n".join(lines) + "\n"


def parse_size(text: str):
    try:
        h, w = (int(v) for v in text.lower().split("x"))
    except ValueError as e:
        raise ValueError(f"size must look like HxW, got {text!r}") from e
    if h < 4 or w < 4:
        raise ValueError(f"size must be at least 4x4, got {text!r}")
    return h, w


def parse_key_values(text: str, source: str = "<config>") -> Dict[str, str]:
    """`key=value` lines; blank lines and `#` comments are skipped."""
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{number}: empty key")
        values[key.replace("-", "_")] = value
    return values


def read_key_values(path: str) -> Dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_key_values(text, str(path))


def resolve_run_config(command: str, file_values: Dict[str, Any], flags: Dict[str, Any]) -> RunConfig:
    """
    Merge file values and explicit flags (flags win; None flags are ignored).

    Raises:
        ConfigError: unknown keys or values that fail validation.
    """
    merged: Dict[str, Any] = dict(file_values)
    merged.update({k: v for k, v in flags.items() if v is not None})
    merged["command"] = command
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as e:
        raise ConfigError(f"invalid run configuration: {e}") from e


def run_config_path(output: str, directory: bool = False) -> Path:
    """Sidecar of an output file (model.egc1 -> model.run.cfg), or run.cfg inside an output directory."""
    path = Path(output)
    if directory:
        return path / "run.cfg"
    return path.with_name(path.stem + RUN_CONFIG_SUFFIX)


def write_run_config(cfg: RunConfig, output: str, directory: bool = False) -> Path:
    target = run_config_path(output, directory)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(cfg.to_text())
    return target
