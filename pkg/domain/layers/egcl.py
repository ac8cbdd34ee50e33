# domain/layers/egcl.py
# -----------------------------------------------------------------------------
# Edge guided convolution and its E ≡ 1 special case, normalized convolution.
#
#   Z' = Σ Z·C·E·Γ(W) / (Σ C·E·Γ(W) + ε) + b
#   C' = (Σ C·Γ(W) + ε) / ΣΓ(W)                 (one mass per output filter)
#   E' = (Σ E·W′ + ε) / ΣW′ = E + ε             (W′ center-only, no Γ)
#
# E is single-channel and broadcast over input channels. No gradient reaches E.
# -----------------------------------------------------------------------------

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from common.errors import (
    MissingForwardStateError,
    NonFiniteError,
    ParameterRangeError,
    ShapeMismatchError,
)
from domain.contracts.i_guided_layer import IGuidedLayer, LayerGrads
from domain.entities.grid import ensure_finite, storage_dtype
from domain.entities.layer_io import EgclParams, LayerIO, LayerKind
from domain.layers.gamma import gamma, gamma_grad
from domain.numerics.correlate import correlate_input_grad, correlate_kernel_grad, correlate_raw


@dataclass
class NormalizedState:
    params: EgclParams
    z: np.ndarray
    c: np.ndarray
    e: Optional[np.ndarray]
    a: np.ndarray
    g: np.ndarray
    numerator: np.ndarray
    denominator: np.ndarray
    conf_numerator: np.ndarray
    mass: np.ndarray


def check_layer_inputs(io: LayerIO, params: EgclParams) -> None:
    if io.channels != params.in_channels:
        raise ShapeMismatchError(
            f"layer expects {params.in_channels} input channel(s), got {io.channels}"
        )
    if not (np.all(np.isfinite(params.w.weights)) and np.all(np.isfinite(params.b))):
        raise NonFiniteError("layer parameters contain non-finite values")


def normalized_forward(
    io: LayerIO, params: EgclParams, use_edge: bool
) -> Tuple[LayerIO, NormalizedState]:
    check_layer_inputs(io, params)
    out_dtype = storage_dtype(io.data, params.w.weights)

    z = io.data.astype(np.float64)
    c = io.confidence.astype(np.float64)
    e = io.edge_dist.astype(np.float64) if use_edge else None
    a = c * e if e is not None else c

    g = gamma(params.w.weights.astype(np.float64), params.gamma)
    mass = g.sum(axis=(0, 1, 2))
    if np.any(mass <= 0):
        raise ParameterRangeError(
            "a filter has zero applicability mass ΣΓ(W); confidence is undefined"
        )

    numerator = correlate_raw(z * a, g)
    denominator = correlate_raw(a, g) + params.epsilon
    data = numerator / denominator + params.b.astype(np.float64)

    conf_numerator = correlate_raw(c, g) + params.epsilon
    confidence = conf_numerator / mass

    if use_edge:
        wp = params.w_prime.weights
        edge = (correlate_raw(e, wp) + params.epsilon) / float(wp.sum(dtype=np.float64))
        edge_out = edge.astype(out_dtype)
    else:
        edge_out = io.edge_dist

    out = LayerIO(
        data=ensure_finite(data.astype(out_dtype), "layer data output"),
        confidence=ensure_finite(confidence.astype(out_dtype), "layer confidence output"),
        edge_dist=ensure_finite(edge_out, "layer edge-dist output"),
    )
    state = NormalizedState(
        params=params,
        z=z,
        c=c,
        e=e,
        a=a,
        g=g,
        numerator=numerator,
        denominator=denominator,
        conf_numerator=conf_numerator,
        mass=mass,
    )
    return out, state


def normalized_backward(
    state: Optional[NormalizedState],
    upstream: np.ndarray,
    upstream_conf: Optional[np.ndarray] = None,
) -> LayerGrads:
    if state is None:
        raise MissingForwardStateError("backward called without saved forward state")
    params = state.params
    expected = state.numerator.shape
    g_up = np.asarray(upstream, dtype=np.float64)
    if g_up.shape != expected:
        raise ShapeMismatchError(f"upstream gradient {g_up.shape} != output shape {expected}")
    k_h, k_w = params.w.k_h, params.w.k_w

    # data: Z' = N / D + b
    g_num = g_up / state.denominator
    g_den = -g_up * state.numerator / (state.denominator * state.denominator)
    x = state.z * state.a
    grad_g = correlate_kernel_grad(x, g_num, k_h, k_w) + correlate_kernel_grad(state.a, g_den, k_h, k_w)
    d_x = correlate_input_grad(g_num, state.g)
    d_a = correlate_input_grad(g_den, state.g) + d_x * state.z
    grad_data = d_x * state.a
    grad_conf = d_a * state.e if state.e is not None else d_a
    grad_b = g_up.sum(axis=(0, 1))

    # confidence: C' = P / S
    if upstream_conf is not None:
        g_c = np.asarray(upstream_conf, dtype=np.float64)
        if g_c.shape != expected:
            raise ShapeMismatchError(f"confidence gradient {g_c.shape} != output shape {expected}")
        g_p = g_c / state.mass
        grad_conf = grad_conf + correlate_input_grad(g_p, state.g)
        grad_g += correlate_kernel_grad(state.c, g_p, k_h, k_w)
        g_mass = -(g_c * state.conf_numerator).sum(axis=(0, 1)) / (state.mass * state.mass)
        grad_g += g_mass[np.newaxis, np.newaxis, np.newaxis, :]

    grad_w = grad_g * gamma_grad(params.w.weights.astype(np.float64), params.gamma)
    return LayerGrads(grad_w=grad_w, grad_b=grad_b, grad_data=grad_data, grad_conf=grad_conf)


def egcl_forward(io: LayerIO, params: EgclParams) -> LayerIO:
    """Edge guided forward pass; see egcl_forward_with_state for the saved activations."""
    return normalized_forward(io, params, use_edge=True)[0]


def egcl_forward_with_state(io: LayerIO, params: EgclParams) -> Tuple[LayerIO, NormalizedState]:
    return normalized_forward(io, params, use_edge=True)


def egcl_backward(
    state: Optional[NormalizedState],
    upstream: np.ndarray,
    upstream_conf: Optional[np.ndarray] = None,
) -> LayerGrads:
    """
    Analytic adjoints of the data and confidence outputs.

    Args:
        state: saved activations from egcl_forward_with_state (carries io and params).
        upstream: dL/dZ', shape (H, W, C_out).
        upstream_conf: dL/dC', same shape, or None when C' does not feed the loss.

    Returns:
        LayerGrads with grad_w (through Γ), grad_b, grad_data and grad_conf.

    Raises:
        MissingForwardStateError: state is None.
        ShapeMismatchError: upstream shapes differ from the forward output.
    """
    return normalized_backward(state, upstream, upstream_conf)


class EdgeGuidedConv(IGuidedLayer):
    kind = LayerKind.EGCL

    def __init__(self, params: EgclParams):
        self.params = params

    def forward(self, io: LayerIO) -> Tuple[LayerIO, NormalizedState]:
        return normalized_forward(io, self.params, use_edge=True)

    def backward(
        self,
        state: NormalizedState,
        grad_data: np.ndarray,
        grad_conf: Optional[np.ndarray] = None,
    ) -> LayerGrads:
        return normalized_backward(state, grad_data, grad_conf)

    def parameters(self) -> List[np.ndarray]:
        return [self.params.w.weights, self.params.b]
