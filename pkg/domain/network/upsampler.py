# domain/network/upsampler.py
# -----------------------------------------------------------------------------
# The depth upsampling subnetwork: seven guided layers (kernels 5,5,5,3,3,3
# then the 1×1 head), width 2, no activations between layers. The three
# variants differ only in the layer kind; their parameter shapes are equal.
# -----------------------------------------------------------------------------

from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import numpy as np

from common.config import settings
from common.errors import ConfigError, ShapeMismatchError
from domain.entities.depth_sample import SparseDepthSample
from domain.entities.edge_field import EdgeDistField
from domain.entities.layer_io import EgclParams, GammaKind, LayerIO
from domain.entities.network_spec import UpsamplerKind, upsampler_spec
from domain.layers import init_params
from domain.network.stack import LayerStack

logger = logging.getLogger(__name__)


class UpsamplerModel(LayerStack):
    def __init__(self, kind: UpsamplerKind, params: List[EgclParams]):
        self.kind = UpsamplerKind(kind)
        super().__init__(upsampler_spec(self.kind), params)

    @property
    def needs_edge_field(self) -> bool:
        return self.kind is UpsamplerKind.EDGE

    def prepare_inputs(self, sample: SparseDepthSample, field: Optional[EdgeDistField]) -> LayerIO:
        """
        Stack the sample with its edge-dist field.

        Raises:
            ConfigError: an edge model is given no field.
            ShapeMismatchError: the field is not aligned with the sample.
        """
        if field is None:
            if self.needs_edge_field:
                raise ConfigError("edge-guided model requires an edge-dist field")
            return sample.to_layer_io()
        if field.values.shape[:2] != sample.sparse_depth.shape[:2]:
            raise ShapeMismatchError(
                f"edge-dist field {field.values.shape[:2]} not aligned with depth {sample.sparse_depth.shape[:2]}"
            )
        edge_dist = field.values if self.needs_edge_field else None
        return sample.to_layer_io(edge_dist)


def build_upsampler(
    kind: UpsamplerKind,
    seed: int = settings.seed,
    gamma_kind: GammaKind = GammaKind(settings.gamma),
    epsilon: float = settings.epsilon,
) -> UpsamplerModel:
    """Fresh seeded preset; equal seeds give equal parameters for every kind."""
    kind = UpsamplerKind(kind)
    rng = np.random.default_rng(seed)
    params = [init_params(s, rng, gamma_kind, epsilon) for s in upsampler_spec(kind).layers]
    model = UpsamplerModel(kind, params)
    logger.debug("built %s upsampler, %d parameters", kind.value, model.parameter_count)
    return model


def upsample(
    model: UpsamplerModel,
    sample: SparseDepthSample,
    field: Optional[EdgeDistField] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Dense depth and final-layer confidence, both (H, W, 1)."""
    out = model.forward(model.prepare_inputs(sample, field))
    return out.data, out.confidence
