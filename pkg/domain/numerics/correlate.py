# domain/numerics/correlate.py
# -----------------------------------------------------------------------------
# Stride-1, zero-padded "same" correlation over (H, W, C) grids and its two
# adjoints. Sums run tap by tap in a fixed order with float64 accumulators, so
# results are reproducible bit for bit.
# -----------------------------------------------------------------------------

from __future__ import annotations

from enum import Enum
from typing import Union

import numpy as np
from scipy.ndimage import maximum_filter

from common.errors import ParameterRangeError, ShapeMismatchError
from domain.entities.grid import Grid, Kernel, ensure_finite, require_same_shape, storage_dtype

KernelLike = Union[Kernel, np.ndarray]

ZERO_PADDING = "zero"


class ElementwiseOp(str, Enum):
    ADD = "add"
    MUL = "mul"
    DIV_EPS = "div_eps"


def _weights(kernel: KernelLike) -> np.ndarray:
    w = kernel.weights if isinstance(kernel, Kernel) else np.asarray(kernel)
    if w.ndim != 4:
        raise ShapeMismatchError(f"kernel must be 4-D (k_h, k_w, c_in, c_out), got {w.shape}")
    if w.shape[0] % 2 == 0 or w.shape[1] % 2 == 0:
        raise ParameterRangeError(f"kernel extents must be odd, got {w.shape[:2]}")
    return w


def _check_grid(x: np.ndarray, what: str) -> np.ndarray:
    if x.ndim != 3:
        raise ShapeMismatchError(f"{what} must be (H, W, C), got {x.shape}")
    return x


def _pad(x: np.ndarray, ph: int, pw: int) -> np.ndarray:
    return np.pad(x, ((ph, ph), (pw, pw), (0, 0)), mode="constant", constant_values=0.0)


def correlate_raw(x: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """float64 correlation without dtype narrowing or finiteness scan."""
    k_h, k_w, c_in, c_out = weights.shape
    if x.shape[2] != c_in:
        raise ShapeMismatchError(
            f"input has {x.shape[2]} channel(s) but kernel expects {c_in}"
        )
    h, w = x.shape[:2]
    xp = _pad(np.asarray(x, dtype=np.float64), k_h // 2, k_w // 2)
    w64 = np.asarray(weights, dtype=np.float64)
    out = np.zeros((h, w, c_out), dtype=np.float64)
    for m in range(k_h):
        for n in range(k_w):
            out += xp[m:m + h, n:n + w, :] @ w64[m, n]
    return out


def correlate(input: Grid, kernel: KernelLike, padding: str = ZERO_PADDING) -> Grid:
    """
    output[i, j, o] = Σ_{m,n,c} input[i+m−⌊k_h/2⌋, j+n−⌊k_w/2⌋, c] · kernel[m, n, c, o]

    Raises:
        ShapeMismatchError: channel mismatch between input and kernel.
        ParameterRangeError: unsupported padding or even kernel extents.
    """
    if padding != ZERO_PADDING:
        raise ParameterRangeError(f"only zero padding is supported, got {padding!r}")
    x = _check_grid(np.asarray(input), "input")
    w = _weights(kernel)
    out = correlate_raw(x, w).astype(storage_dtype(x, w))
    return ensure_finite(out, "correlation output")


def correlate_input_grad(grad_out: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Adjoint of correlate w.r.t. its input (a full convolution, cropped)."""
    k_h, k_w, c_in, c_out = weights.shape
    if grad_out.shape[2] != c_out:
        raise ShapeMismatchError(
            f"upstream has {grad_out.shape[2]} channel(s) but kernel produces {c_out}"
        )
    h, w = grad_out.shape[:2]
    ph, pw = k_h // 2, k_w // 2
    g = np.asarray(grad_out, dtype=np.float64)
    w64 = np.asarray(weights, dtype=np.float64)
    acc = np.zeros((h + 2 * ph, w + 2 * pw, c_in), dtype=np.float64)
    for m in range(k_h):
        for n in range(k_w):
            acc[m:m + h, n:n + w, :] += g @ w64[m, n].T
    return acc[ph:ph + h, pw:pw + w, :]


def correlate_kernel_grad(x: np.ndarray, grad_out: np.ndarray, k_h: int, k_w: int) -> np.ndarray:
    """Adjoint of correlate w.r.t. its kernel, shape (k_h, k_w, c_in, c_out)."""
    h, w, c_in = x.shape
    c_out = grad_out.shape[2]
    if grad_out.shape[:2] != (h, w):
        raise ShapeMismatchError(f"upstream {grad_out.shape[:2]} not aligned with input {(h, w)}")
    xp = _pad(np.asarray(x, dtype=np.float64), k_h // 2, k_w // 2)
    g = np.asarray(grad_out, dtype=np.float64).reshape(-1, c_out)
    grad = np.zeros((k_h, k_w, c_in, c_out), dtype=np.float64)
    for m in range(k_h):
        for n in range(k_w):
            grad[m, n] = xp[m:m + h, n:n + w, :].reshape(-1, c_in).T @ g
    return grad


def elementwise(a: Grid, b: Grid, op: Union[ElementwiseOp, str], eps: float = 0.0) -> Grid:
    """
    Per-element add, mul (Hadamard) or a / (b + ε).

    Raises:
        ShapeMismatchError: shapes differ.
        ParameterRangeError: div_eps with ε <= 0.
    """
    a_arr, b_arr = np.asarray(a), np.asarray(b)
    require_same_shape(a_arr, b_arr, "elementwise operands")
    op = ElementwiseOp(op)
    a64, b64 = a_arr.astype(np.float64), b_arr.astype(np.float64)
    if op is ElementwiseOp.ADD:
        out = a64 + b64
    elif op is ElementwiseOp.MUL:
        out = a64 * b64
    else:
        if eps <= 0:
            raise ParameterRangeError(f"div_eps needs eps > 0, got {eps}")
        out = a64 / (b64 + eps)
    return ensure_finite(out.astype(storage_dtype(a_arr, b_arr)), f"elementwise {op.value} output")


def window_max(x: np.ndarray, k_h: int, k_w: int) -> np.ndarray:
    """Zero-padded max over a k_h × k_w window and all channels, shape (H, W, 1)."""
    collapsed = np.asarray(x).max(axis=2)
    pooled = maximum_filter(collapsed, size=(k_h, k_w), mode="constant", cval=0.0)
    return pooled[:, :, np.newaxis]
