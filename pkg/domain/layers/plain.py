# domain/layers/plain.py
# Ordinary zero-padded convolution with optional ReLU, used by the fusion network.

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from common.errors import MissingForwardStateError, ShapeMismatchError
from domain.contracts.i_guided_layer import IGuidedLayer, LayerGrads
from domain.entities.grid import ensure_finite, storage_dtype
from domain.entities.layer_io import Activation, EgclParams, LayerIO, LayerKind
from domain.layers.egcl import check_layer_inputs
from domain.numerics.correlate import correlate_input_grad, correlate_kernel_grad, correlate_raw


@dataclass
class PlainState:
    x: np.ndarray
    pre_activation: np.ndarray


class PlainConv(IGuidedLayer):
    kind = LayerKind.PLAIN

    def __init__(self, params: EgclParams, activation: Activation = Activation.NONE):
        self.params = params
        self.activation = Activation(activation)

    def forward(self, io: LayerIO) -> Tuple[LayerIO, PlainState]:
        check_layer_inputs(io, self.params)
        out_dtype = storage_dtype(io.data, self.params.w.weights)
        x = io.data.astype(np.float64)
        y = correlate_raw(x, self.params.w.weights) + self.params.b.astype(np.float64)
        out = np.maximum(y, 0.0) if self.activation is Activation.RELU else y
        result = LayerIO(
            data=ensure_finite(out.astype(out_dtype), "convolution output"),
            confidence=np.ones(out.shape, dtype=out_dtype),
            edge_dist=io.edge_dist,
        )
        return result, PlainState(x=x, pre_activation=y)

    def backward(
        self,
        state: Optional[PlainState],
        grad_data: np.ndarray,
        grad_conf: Optional[np.ndarray] = None,
    ) -> LayerGrads:
        if state is None:
            raise MissingForwardStateError("backward called without saved forward state")
        g = np.asarray(grad_data, dtype=np.float64)
        if g.shape != state.pre_activation.shape:
            raise ShapeMismatchError(
                f"upstream gradient {g.shape} != output shape {state.pre_activation.shape}"
            )
        if self.activation is Activation.RELU:
            g = g * (state.pre_activation > 0)
        w = self.params.w
        return LayerGrads(
            grad_w=correlate_kernel_grad(state.x, g, w.k_h, w.k_w),
            grad_b=g.sum(axis=(0, 1)),
            grad_data=correlate_input_grad(g, w.weights),
            grad_conf=None,
        )

    def parameters(self) -> List[np.ndarray]:
        return [self.params.w.weights, self.params.b]
