# domain/contracts/i_guided_layer.py
# -----------------------------------------------------------------------------
# Every layer kind (edge guided, normalized, sparse, plain) exposes the same
# two calls so that networks, the GradTape and the trainer never branch on the
# layer kind. Gradients come back as one LayerGrads record per call.
# -----------------------------------------------------------------------------

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, List, Optional, Tuple

import numpy as np

from domain.entities.layer_io import LayerIO, LayerKind


@dataclass
class LayerGrads:
    """Adjoints of one layer call; grad_conf is None where confidence is not differentiable."""

    grad_w: np.ndarray
    grad_b: np.ndarray
    grad_data: np.ndarray
    grad_conf: Optional[np.ndarray] = None


class IGuidedLayer(ABC):
    """
    Contract for a stride-1, same-padding layer acting on LayerIO streams.

    Design notes
    ------------
    - `forward` returns the output streams plus an opaque saved state; the
      state is the only thing `backward` needs.
    - `parameters` returns the live (weights, bias) arrays; optimizers update
      them in place.
    """

    kind: LayerKind

    @abstractmethod
    def forward(self, io: LayerIO) -> Tuple[LayerIO, Any]:
        """Run the layer and return (outputs, saved state)."""

    @abstractmethod
    def backward(
        self,
        state: Any,
        grad_data: np.ndarray,
        grad_conf: Optional[np.ndarray] = None,
    ) -> LayerGrads:
        """Propagate upstream gradients of the data and confidence outputs."""

    @abstractmethod
    def parameters(self) -> List[np.ndarray]:
        """[weights, bias], the arrays updated in place by training."""
