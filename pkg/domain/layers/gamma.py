# domain/layers/gamma.py
# Γ: elementwise nonnegativity transform applied to filter weights.

from typing import Union

import numpy as np
from scipy.special import expit

from domain.entities.layer_io import GammaKind

ArrayOrScalar = Union[float, np.ndarray]


def gamma(w: ArrayOrScalar, kind: GammaKind = GammaKind.SOFTPLUS) -> ArrayOrScalar:
    """softplus(w) = ln(1 + e^w) (overflow-safe), or relu_shift(w) = max(w, 0)."""
    kind = GammaKind(kind)
    if kind is GammaKind.SOFTPLUS:
        return np.logaddexp(0.0, w)
    return np.maximum(w, 0.0)


def gamma_grad(w: ArrayOrScalar, kind: GammaKind = GammaKind.SOFTPLUS) -> ArrayOrScalar:
    """dΓ/dw: the logistic sigmoid for softplus, the step 1[w > 0] for relu_shift."""
    kind = GammaKind(kind)
    if kind is GammaKind.SOFTPLUS:
        return expit(w)
    return (np.asarray(w) > 0).astype(np.float64)
