# domain/layers/sconv.py
# -----------------------------------------------------------------------------
# Sparsity invariant convolution with a binary validity mask M:
#   Z' = Σ Z·M·W / (Σ M + ε) + b,   M' = max of M over the window.
# W is used as is (no Γ). The mask is not differentiable.
# -----------------------------------------------------------------------------

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from common.errors import MissingForwardStateError, ParameterRangeError, ShapeMismatchError
from domain.contracts.i_guided_layer import IGuidedLayer, LayerGrads
from domain.entities.grid import ensure_finite, storage_dtype
from domain.entities.layer_io import EgclParams, LayerIO, LayerKind
from domain.layers.egcl import check_layer_inputs
from domain.numerics.correlate import (
    correlate_input_grad,
    correlate_kernel_grad,
    correlate_raw,
    window_max,
)


@dataclass
class SparseState:
    params: EgclParams
    masked: np.ndarray
    mask: np.ndarray
    denominator: np.ndarray


def sparse_forward(io: LayerIO, params: EgclParams) -> Tuple[LayerIO, SparseState]:
    check_layer_inputs(io, params)
    m = io.confidence
    if not np.all((m == 0) | (m == 1)):
        raise ParameterRangeError("sparse convolution needs a binary {0, 1} confidence mask")
    out_dtype = storage_dtype(io.data, params.w.weights)
    k_h, k_w = params.w.k_h, params.w.k_w

    mask = m.astype(np.float64)
    masked = io.data.astype(np.float64) * mask
    numerator = correlate_raw(masked, params.w.weights)
    counter = np.ones((k_h, k_w, params.in_channels, 1), dtype=np.float64)
    denominator = correlate_raw(mask, counter) + params.epsilon
    data = numerator / denominator + params.b.astype(np.float64)

    pooled = window_max(mask, k_h, k_w)
    mask_out = np.repeat(pooled, params.out_channels, axis=2)

    out = LayerIO(
        data=ensure_finite(data.astype(out_dtype), "sparse layer output"),
        confidence=mask_out.astype(out_dtype),
        edge_dist=io.edge_dist,
    )
    return out, SparseState(params=params, masked=masked, mask=mask, denominator=denominator)


def sparse_backward(
    state: Optional[SparseState],
    upstream: np.ndarray,
    upstream_conf: Optional[np.ndarray] = None,
) -> LayerGrads:
    if state is None:
        raise MissingForwardStateError("backward called without saved forward state")
    params = state.params
    g_up = np.asarray(upstream, dtype=np.float64)
    expected = state.masked.shape[:2] + (params.out_channels,)
    if g_up.shape != expected:
        raise ShapeMismatchError(f"upstream gradient {g_up.shape} != output shape {expected}")
    g_num = g_up / state.denominator
    grad_w = correlate_kernel_grad(state.masked, g_num, params.w.k_h, params.w.k_w)
    grad_data = correlate_input_grad(g_num, params.w.weights) * state.mask
    return LayerGrads(
        grad_w=grad_w,
        grad_b=g_up.sum(axis=(0, 1)),
        grad_data=grad_data,
        grad_conf=None,
    )


def sconv_forward(io: LayerIO, params: EgclParams) -> LayerIO:
    """
    Sparse convolution forward pass.

    Raises:
        ParameterRangeError: confidence is not binary.
        ShapeMismatchError: channel mismatch with the kernel.
    """
    return sparse_forward(io, params)[0]


class SparseConv(IGuidedLayer):
    kind = LayerKind.SCONV

    def __init__(self, params: EgclParams):
        self.params = params

    def forward(self, io: LayerIO) -> Tuple[LayerIO, SparseState]:
        return sparse_forward(io, self.params)

    def backward(
        self,
        state: SparseState,
        grad_data: np.ndarray,
        grad_conf: Optional[np.ndarray] = None,
    ) -> LayerGrads:
        return sparse_backward(state, grad_data, grad_conf)

    def parameters(self) -> List[np.ndarray]:
        return [self.params.w.weights, self.params.b]
