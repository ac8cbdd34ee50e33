# domain/layers/nconv.py
# Normalized convolution: the edge guided layer with the E factor removed.

from typing import List, Optional, Tuple

import numpy as np

from domain.contracts.i_guided_layer import IGuidedLayer, LayerGrads
from domain.entities.layer_io import EgclParams, LayerIO, LayerKind
from domain.layers.egcl import NormalizedState, normalized_backward, normalized_forward


def nconv_forward(io: LayerIO, params: EgclParams) -> LayerIO:
    """Data and confidence updates without E; the edge-dist stream is passed through untouched."""
    return normalized_forward(io, params, use_edge=False)[0]


def nconv_backward(
    state: Optional[NormalizedState],
    upstream: np.ndarray,
    upstream_conf: Optional[np.ndarray] = None,
) -> LayerGrads:
    return normalized_backward(state, upstream, upstream_conf)


class NormalizedConv(IGuidedLayer):
    kind = LayerKind.NCONV

    def __init__(self, params: EgclParams):
        self.params = params

    def forward(self, io: LayerIO) -> Tuple[LayerIO, NormalizedState]:
        return normalized_forward(io, self.params, use_edge=False)

    def backward(
        self,
        state: NormalizedState,
        grad_data: np.ndarray,
        grad_conf: Optional[np.ndarray] = None,
    ) -> LayerGrads:
        return normalized_backward(state, grad_data, grad_conf)

    def parameters(self) -> List[np.ndarray]:
        return [self.params.w.weights, self.params.b]
