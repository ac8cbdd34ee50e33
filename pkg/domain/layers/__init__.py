# domain/layers/__init__.py

from typing import Optional

import numpy as np

from common.config import settings
from common.errors import ShapeMismatchError
from domain.contracts.i_guided_layer import IGuidedLayer
from domain.entities.grid import Kernel
from domain.entities.layer_io import EgclParams, GammaKind, LayerKind
from domain.entities.network_spec import LayerSpec
from domain.layers.egcl import EdgeGuidedConv, egcl_backward, egcl_forward, egcl_forward_with_state
from domain.layers.gamma import gamma, gamma_grad
from domain.layers.nconv import NormalizedConv, nconv_backward, nconv_forward
from domain.layers.plain import PlainConv
from domain.layers.sconv import SparseConv, sconv_forward


def init_params(
    spec: LayerSpec,
    rng: np.random.Generator,
    gamma_kind: GammaKind = GammaKind(settings.gamma),
    epsilon: float = settings.epsilon,
) -> EgclParams:
    """
    Uniform weights in ±1/√fan_in, zero bias, float32 storage. Under
    relu_shift the draw is shifted up by 1/√fan_in so every filter starts
    with positive mass.
    """
    fan_in = spec.kernel_size * spec.kernel_size * spec.in_channels
    bound = 1.0 / np.sqrt(fan_in)
    shape = (spec.kernel_size, spec.kernel_size, spec.in_channels, spec.out_channels)
    weights = rng.uniform(-bound, bound, size=shape)
    if GammaKind(gamma_kind) is GammaKind.RELU_SHIFT:
        weights = weights + bound
    weights = weights.astype(np.float32)
    return EgclParams(
        w=Kernel(weights=weights),
        b=np.zeros(spec.out_channels, dtype=np.float32),
        epsilon=epsilon,
        gamma=gamma_kind,
    )


def build_layer(spec: LayerSpec, params: EgclParams) -> IGuidedLayer:
    if params.w.weights.shape != (spec.kernel_size, spec.kernel_size, spec.in_channels, spec.out_channels):
        raise ShapeMismatchError(f"params {params.w.weights.shape} do not match layer spec {spec}")
    if spec.kind is LayerKind.EGCL:
        return EdgeGuidedConv(params)
    if spec.kind is LayerKind.NCONV:
        return NormalizedConv(params)
    if spec.kind is LayerKind.SCONV:
        return SparseConv(params)
    return PlainConv(params, spec.activation)


__all__ = [
    'EdgeGuidedConv',
    'NormalizedConv',
    'PlainConv',
    'SparseConv',
    'build_layer',
    'egcl_backward',
    'egcl_forward',
    'egcl_forward_with_state',
    'gamma',
    'gamma_grad',
    'init_params',
    'nconv_backward',
    'nconv_forward',
    'sconv_forward',
]
