# domain/network/stack.py

from __future__ import annotations

from typing import List, Optional

import numpy as np

from common.errors import ShapeMismatchError
from domain.contracts.i_guided_layer import IGuidedLayer
from domain.entities.layer_io import EgclParams, GammaKind, LayerIO, LayerKind
from domain.entities.network_spec import NetworkSpec
from domain.layers import build_layer
from domain.numerics.tape import GradTape

# Weight given to a relu_shift filter that lost all its mass
RELU_SHIFT_FLOOR = 1e-3
_MASS_KINDS = (LayerKind.EGCL, LayerKind.NCONV)


class LayerStack:
    """
    A chain of IGuidedLayer calls described by a NetworkSpec.

    Parameters live in the EgclParams records; `parameters()` exposes the
    underlying arrays in layer order (weights, bias, weights, bias, ...).
    """

    def __init__(self, spec: NetworkSpec, params: List[EgclParams]):
        if len(params) != len(spec.layers):
            raise ShapeMismatchError(
                f"{len(params)} parameter records for {len(spec.layers)} layers"
            )
        self.spec = spec
        self.params = list(params)
        self.layers: List[IGuidedLayer] = [build_layer(s, p) for s, p in zip(spec.layers, self.params)]

    def forward(self, io: LayerIO, tape: Optional[GradTape] = None) -> LayerIO:
        if io.channels != self.spec.in_channels:
            raise ShapeMismatchError(
                f"network expects {self.spec.in_channels} input channel(s), got {io.channels}"
            )
        for layer in self.layers:
            io, state = layer.forward(io)
            if tape is not None:
                tape.record(layer, state)
        return io

    def parameters(self) -> List[np.ndarray]:
        arrays: List[np.ndarray] = []
        for layer in self.layers:
            arrays.extend(layer.parameters())
        return arrays

    @property
    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.parameters()))

    def keep_positive_mass(self, floor: float = RELU_SHIFT_FLOOR) -> int:
        """
        Give every relu_shift filter of a guided layer at least one positive
        weight, so ΣΓ(W) stays above zero after an optimizer step. The largest
        weight of a filter with none positive is raised to `floor`.

        Returns the number of filters lifted.
        """
        lifted = 0
        for spec, params in zip(self.spec.layers, self.params):
            if spec.kind not in _MASS_KINDS or params.gamma is not GammaKind.RELU_SHIFT:
                continue
            w = params.w.weights
            for o in range(w.shape[3]):
                filt = w[..., o]
                if filt.max() <= 0:
                    filt[np.unravel_index(np.argmax(filt), filt.shape)] = floor
                    lifted += 1
        return lifted

    def snapshot(self) -> List[np.ndarray]:
        return [p.copy() for p in self.parameters()]

    def restore(self, arrays: List[np.ndarray]) -> None:
        for target, source in zip(self.parameters(), arrays):
            target[...] = source
