# domain/numerics/tape.py

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, List, Optional

import numpy as np

from common.errors import TapeError
from domain.contracts.i_guided_layer import IGuidedLayer, LayerGrads


@dataclass
class TapeEntry:
    layer: IGuidedLayer
    state: Any


class GradTape:
    """
    Ordered record of layer calls for one forward pass.

    Adjoints are analytic per layer; the tape only fixes the replay order and
    hands each layer's input gradients to its predecessor.
    """

    def __init__(self) -> None:
        self._entries: List[TapeEntry] = []
        self._replayed = False

    def __len__(self) -> int:
        return len(self._entries)

    def record(self, layer: IGuidedLayer, state: Any) -> None:
        if self._replayed:
            raise TapeError("cannot record on a tape that has already been replayed")
        self._entries.append(TapeEntry(layer=layer, state=state))

    def backward(
        self,
        grad_data: np.ndarray,
        grad_conf: Optional[np.ndarray] = None,
    ) -> List[LayerGrads]:
        """
        Replay adjoints last to first.

        Returns:
            One LayerGrads per recorded call, in recording order. The first
            entry's grad_data / grad_conf are the gradients w.r.t. the network
            inputs.

        Raises:
            TapeError: the tape is empty or was already replayed.
        """
        if not self._entries:
            raise TapeError("nothing recorded on this tape")
        if self._replayed:
            raise TapeError("a tape can be replayed only once")
        self._replayed = True

        grads: List[Optional[LayerGrads]] = [None] * len(self._entries)
        for index in range(len(self._entries) - 1, -1, -1):
            entry = self._entries[index]
            layer_grads = entry.layer.backward(entry.state, grad_data, grad_conf)
            grads[index] = layer_grads
            grad_data, grad_conf = layer_grads.grad_data, layer_grads.grad_conf
        return [g for g in grads if g is not None]
