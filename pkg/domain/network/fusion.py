# domain/network/fusion.py
# -----------------------------------------------------------------------------
# Fusion of K upsampled branches. Each branch contributes (d_k·w_k, w_k) with
# w_k = c_k / (Σ_j c_j + ε), so the input has 2K channels. The model starts as
# the confidence-weighted average of the branches.
# -----------------------------------------------------------------------------

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from common.config import settings
from common.errors import ParameterRangeError, ShapeMismatchError
from domain.entities.grid import Kernel, ensure_finite
from domain.entities.layer_io import EgclParams, LayerIO
from domain.entities.network_spec import fusion_spec
from domain.layers import init_params
from domain.network.stack import LayerStack

Branch = Tuple[np.ndarray, np.ndarray]


class FusionModel(LayerStack):
    def __init__(self, branch_count: int, params: List[EgclParams], hidden: int = settings.fusion_hidden):
        if branch_count < 2:
            raise ParameterRangeError(f"fusion needs at least 2 branches, got {branch_count}")
        self.branch_count = branch_count
        self.hidden = hidden
        super().__init__(fusion_spec(branch_count, hidden), params)


def fusion_inputs(branches: Sequence[Branch], epsilon: float = settings.epsilon) -> np.ndarray:
    """
    Confidence-weighted branch stack, shape (H, W, 2K).

    Raises:
        ParameterRangeError: fewer than two branches.
        ShapeMismatchError: branch grids are not single-channel and aligned.
    """
    if len(branches) < 2:
        raise ParameterRangeError(f"fusion needs at least 2 branches, got {len(branches)}")
    shape = np.shape(branches[0][0])
    for depth, conf in branches:
        if np.shape(depth) != shape or np.shape(conf) != shape or shape[-1] != 1:
            raise ShapeMismatchError(
                f"branch grids must be aligned (H, W, 1): {np.shape(depth)}, {np.shape(conf)} vs {shape}"
            )
    confs = np.concatenate([np.asarray(c, dtype=np.float64) for _, c in branches], axis=2)
    depths = np.concatenate([np.asarray(d, dtype=np.float64) for d, _ in branches], axis=2)
    weights = confs / (confs.sum(axis=2, keepdims=True) + epsilon)
    stacked = np.empty(shape[:2] + (2 * len(branches),), dtype=np.float64)
    stacked[:, :, 0::2] = depths * weights
    stacked[:, :, 1::2] = weights
    return ensure_finite(stacked.astype(np.float32), "fusion input")


def build_fusion(
    branch_count: int,
    hidden: int = settings.fusion_hidden,
    seed: int = settings.seed,
) -> FusionModel:
    """
    Seeded fusion model whose initial output is Σ_k d_k·w_k: hidden channel 0
    sums the weighted depths at the window center and the head reads only it.
    """
    if branch_count < 2:
        raise ParameterRangeError(f"fusion needs at least 2 branches, got {branch_count}")
    spec = fusion_spec(branch_count, hidden)
    rng = np.random.default_rng(seed)
    first, head = (init_params(s, rng) for s in spec.layers)

    w1 = first.w.weights.copy()
    w1[:, :, :, 0] = 0.0
    w1[1, 1, 0::2, 0] = 1.0
    w2 = np.zeros_like(head.w.weights)
    w2[0, 0, 0, 0] = 1.0
    params = [
        EgclParams(w=Kernel(weights=w1), b=first.b, epsilon=first.epsilon),
        EgclParams(w=Kernel(weights=w2), b=head.b, epsilon=head.epsilon),
    ]
    return FusionModel(branch_count, params, hidden)


def fuse(model: FusionModel, branches: Sequence[Branch]) -> np.ndarray:
    """Single dense depth (H, W, 1) from K branch (depth, confidence) pairs."""
    if len(branches) != model.branch_count:
        raise ShapeMismatchError(
            f"model fuses {model.branch_count} branches, got {len(branches)}"
        )
    io = LayerIO.from_data(fusion_inputs(branches))
    return model.forward(io).data
