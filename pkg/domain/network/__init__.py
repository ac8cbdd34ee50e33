# domain/network/__init__.py

from domain.network.adam import Adam
from domain.network.fusion import Branch, FusionModel, build_fusion, fuse, fusion_inputs
from domain.network.stack import LayerStack
from domain.network.upsampler import UpsamplerModel, build_upsampler, upsample

__all__ = [
    "Adam",
    "Branch",
    "FusionModel",
    "LayerStack",
    "UpsamplerModel",
    "build_fusion",
    "build_upsampler",
    "fuse",
    "fusion_inputs",
    "upsample",
]
