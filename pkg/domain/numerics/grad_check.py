# domain/numerics/grad_check.py

from typing import Callable, Tuple

import numpy as np

from common.errors import NonFiniteError, ParameterRangeError

LossAndGrad = Callable[[np.ndarray], Tuple[float, np.ndarray]]


def _finite_value(f: LossAndGrad, params: np.ndarray) -> float:
    value = float(f(params)[0])
    if not np.isfinite(value):
        raise NonFiniteError(f"objective evaluated to {value}")
    return value


def grad_check(f: LossAndGrad, params: np.ndarray, h: float = 1e-3) -> float:
    """
    Compare an analytic gradient against central differences.

    Args:
        f: maps a parameter vector to (loss, analytic gradient of the loss).
        params: point at which to check; not modified.
        h: finite-difference step.

    Returns:
        max over parameters of |analytic − numeric| / max(1, |analytic|, |numeric|).

    Raises:
        ParameterRangeError: h <= 0.
        NonFiniteError: any evaluation of f is NaN or Inf.
    """
    if h <= 0:
        raise ParameterRangeError(f"step h must be positive, got {h}")
    point = np.array(params, dtype=np.float64, copy=True)
    value, analytic = f(point.copy())
    if not np.isfinite(value):
        raise NonFiniteError(f"objective evaluated to {value}")
    analytic = np.asarray(analytic, dtype=np.float64).reshape(point.shape)

    worst = 0.0
    flat = point.reshape(-1)
    analytic_flat = analytic.reshape(-1)
    for i in range(flat.size):
        plus = flat.copy()
        minus = flat.copy()
        plus[i] += h
        minus[i] -= h
        numeric = (
            _finite_value(f, plus.reshape(point.shape)) - _finite_value(f, minus.reshape(point.shape))
        ) / (2.0 * h)
        a = analytic_flat[i]
        err = abs(a - numeric) / max(1.0, abs(a), abs(numeric))
        worst = max(worst, err)
    return worst
