# common/config.py
from functools import lru_cache
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Load from .env; ignore stray keys; allow case-insensitive env var lookup
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="EGCNN_",
        extra="ignore",
        case_sensitive=False,
    )

    # App metadata
    app_name: str = "Edge Guided Depth Upsampling"
    log_level: str = "INFO"

    # Layer constants
    epsilon: float = 1e-20
    gamma: str = "softplus"

    # Edge-dist ramp
    e_edge: float = 0.1
    e_max: float = 1.0
    tau: float = 5.0

    # Training defaults
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    epochs: int = 50
    batch_size: int = 1
    seed: int = 0
    workers: int = 1
    fusion_hidden: int = 4

    # Evaluation / I/O
    min_depth: float = 1e-3
    depth_png_scale: float = 256.0
    cache_dir: str = ".egcnn_cache"
    default_preset: str = "canny-k3"

    # Checkpoints the API may load, and the name served when a request gives none
    checkpoint_dir: str = "checkpoints"
    default_checkpoint: Optional[str] = None


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    # Construct with no args so pydantic-settings reads .env / env automatically
    return Settings()


settings = get_settings()
