# domain/network/adam.py

from __future__ import annotations

from typing import List

import numpy as np

from common.config import settings
from common.errors import NonFiniteError, ShapeMismatchError


class Adam:
    """
    Adam over a fixed list of parameter arrays, updated in place.

    Moments and the update are computed in float64; results are written back
    in each parameter's own dtype.
    """

    def __init__(
        self,
        params: List[np.ndarray],
        learning_rate: float = settings.learning_rate,
        beta1: float = settings.adam_beta1,
        beta2: float = settings.adam_beta2,
        eps: float = settings.adam_eps,
    ):
        self.params = params
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self._m = [np.zeros(p.shape, dtype=np.float64) for p in params]
        self._v = [np.zeros(p.shape, dtype=np.float64) for p in params]

    def step(self, grads: List[np.ndarray]) -> None:
        if len(grads) != len(self.params):
            raise ShapeMismatchError(f"{len(grads)} gradients for {len(self.params)} parameters")
        self.step_count += 1
        t = self.step_count
        correction1 = 1.0 - self.beta1 ** t
        correction2 = 1.0 - self.beta2 ** t
        for p, g, m, v in zip(self.params, grads, self._m, self._v):
            g = np.asarray(g, dtype=np.float64)
            if g.shape != p.shape:
                raise ShapeMismatchError(f"gradient {g.shape} != parameter {p.shape}")
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            update = self.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + self.eps)
            new = p.astype(np.float64) - update
            if not np.all(np.isfinite(new)):
                raise NonFiniteError(f"Adam step {t} produced non-finite parameters")
            p[...] = new.astype(p.dtype)
