# api/v1/routes.py
from pathlib import Path

import numpy as np
from fastapi import APIRouter, Depends, HTTPException
from pydantic import ValidationError

from application.dto.edge_field_request_dto import EdgeFieldRequestDTO
from application.dto.edge_field_response_dto import EdgeFieldResponseDTO
from application.dto.evaluate_request_dto import EvaluateRequestDTO
from application.dto.evaluate_response_dto import EvaluateResponseDTO
from application.dto.upsample_request_dto import UpsampleRequestDTO
from application.dto.upsample_response_dto import UpsampleResponseDTO
from application.services.edge_field_service import EdgeFieldService
from common.config import settings
from common.errors import ConfigError, EgcnnError
from domain.entities.depth_sample import SparseDepthSample
from domain.entities.edge_field import EdgeDistField
from domain.metrics import evaluate
from domain.network.upsampler import UpsamplerModel, upsample
from infrastructure.checkpoint_store import load_checkpoint
from infrastructure.edge_field_cache import EdgeFieldCache
from infrastructure.raster_store import LocalRasterStore

router = APIRouter()


# -------------------------------
# Dependencies
# -------------------------------
def get_raster_store() -> LocalRasterStore:
    return LocalRasterStore()


def get_edge_field_service(store: LocalRasterStore = Depends(get_raster_store)) -> EdgeFieldService:
    """
    Edge-field service backed by the on-disk cache configured in settings.
    """
    return EdgeFieldService(store=store, cache=EdgeFieldCache(store, settings.cache_dir))


def get_checkpoint_dir() -> Path:
    return Path(settings.checkpoint_dir)


def _resolve_checkpoint(root: Path, name: str) -> Path:
    """
    Path of checkpoint `name` inside `root`. Absolute names and names that
    leave `root` are rejected before the filesystem is consulted.
    """
    if Path(name).is_absolute():
        raise HTTPException(status_code=422, detail="checkpoint must be a name inside the checkpoint directory")
    base = root.resolve()
    path = (base / name).resolve()
    if base not in path.parents:
        raise HTTPException(status_code=422, detail="checkpoint must be a name inside the checkpoint directory")
    return path


def _grid(rows, what: str) -> np.ndarray:
    arr = np.asarray(rows, dtype=np.float32)
    if arr.ndim not in (2, 3) or arr.size == 0:
        raise HTTPException(status_code=422, detail=f"{what} must be a nonempty 2-D array")
    return arr


def _rows(grid: np.ndarray) -> list:
    return np.asarray(grid, dtype=np.float64)[:, :, 0].tolist()


# -------------------------------
# Health
# -------------------------------
@router.get("/health")
async def health_check():
    return {"status": "healthy"}


@router.post("/edge-field", response_model=EdgeFieldResponseDTO)
def edge_field_endpoint(
    payload: EdgeFieldRequestDTO,
    service: EdgeFieldService = Depends(get_edge_field_service),
):
    """Edge-dist field of an image under a Canny or file: preset."""
    tau = payload.tau if payload.tau is not None else settings.tau
    try:
        field = service.field_for_image(_grid(payload.image, "image"), payload.preset, tau)
    except (EgcnnError, ValidationError) as e:
        raise HTTPException(status_code=422, detail=f"Edge field failed: {e}") from e
    return EdgeFieldResponseDTO(values=_rows(field.values), e_edge=field.e_edge, e_max=field.e_max, tau=field.tau)


@router.post("/upsample", response_model=UpsampleResponseDTO)
def upsample_endpoint(
    payload: UpsampleRequestDTO,
    checkpoint_dir: Path = Depends(get_checkpoint_dir),
):
    """
    Dense depth and final confidence from an upsampler checkpoint stored in
    the configured checkpoint directory. Edge-guided checkpoints need `edge_dist`.
    """
    checkpoint = payload.checkpoint or settings.default_checkpoint
    if checkpoint is None:
        raise HTTPException(status_code=422, detail="no checkpoint given and none configured")
    path = _resolve_checkpoint(checkpoint_dir, checkpoint)
    if not path.is_file():
        raise HTTPException(status_code=404, detail=f"checkpoint {checkpoint} not found")
    try:
        model = load_checkpoint(path)
        if not isinstance(model, UpsamplerModel):
            raise ConfigError(f"{checkpoint} holds a fusion network, not an upsampler")
        sample = SparseDepthSample(
            sparse_depth=_grid(payload.sparse_depth, "sparse_depth"),
            confidence=_grid(payload.confidence, "confidence"),
        )
        field = (
            EdgeDistField(values=_grid(payload.edge_dist, "edge_dist"))
            if payload.edge_dist is not None
            else None
        )
        dense, conf = upsample(model, sample, field)
    except (EgcnnError, ValidationError) as e:
        raise HTTPException(status_code=422, detail=f"Upsampling failed: {e}") from e
    return UpsampleResponseDTO(depth=_rows(dense), confidence=_rows(conf), kind=model.kind.value)


@router.post("/evaluate", response_model=EvaluateResponseDTO)
def evaluate_endpoint(payload: EvaluateRequestDTO):
    min_depth = payload.min_depth if payload.min_depth is not None else settings.min_depth
    try:
        report = evaluate(_grid(payload.prediction, "prediction"), _grid(payload.ground_truth, "ground_truth"), min_depth)
    except (EgcnnError, ValidationError) as e:
        raise HTTPException(status_code=422, detail=f"Evaluation failed: {e}") from e
    return EvaluateResponseDTO(**report.model_dump())
