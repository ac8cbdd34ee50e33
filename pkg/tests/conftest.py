# tests/conftest.py
from typing import Optional

import numpy as np
import pytest

from domain.entities.grid import Kernel
from domain.entities.layer_io import EgclParams, GammaKind, LayerIO
from infrastructure.raster_store import LocalRasterStore


def make_io(
    rng: np.random.Generator,
    height: int,
    width: int,
    channels: int = 1,
    edge: Optional[np.ndarray] = None,
    dtype=np.float64,
) -> LayerIO:
    data = rng.uniform(0.5, 10.0, size=(height, width, channels)).astype(dtype)
    confidence = rng.uniform(0.1, 1.0, size=(height, width, channels)).astype(dtype)
    if edge is None:
        edge = rng.uniform(0.1, 1.0, size=(height, width, 1)).astype(dtype)
    return LayerIO(data=data, confidence=confidence, edge_dist=edge)


def make_params(
    rng: np.random.Generator,
    k: int,
    c_in: int = 1,
    c_out: int = 1,
    gamma: GammaKind = GammaKind.SOFTPLUS,
    dtype=np.float64,
) -> EgclParams:
    return EgclParams(
        w=Kernel(weights=rng.normal(0.0, 1.0, size=(k, k, c_in, c_out)).astype(dtype)),
        b=rng.normal(0.0, 0.5, size=c_out).astype(dtype),
        gamma=gamma,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def store() -> LocalRasterStore:
    return LocalRasterStore()
