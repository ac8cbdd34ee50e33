# infrastructure/checkpoint_store.py
# -----------------------------------------------------------------------------
# "EGC1" checkpoint codec.
#
#   magic "EGC1" | u32 layer_count
#   per layer:  u8 kind | u8 activation | u8 gamma | pad | u32 k_h | u32 k_w
#               | u32 c_in | u32 c_out | f64 epsilon
#   per layer:  weights (k_h*k_w*c_in*c_out, row-major) | biases (c_out)
#
# All fields little-endian, tensors as float32.
# -----------------------------------------------------------------------------

from __future__ import annotations

import logging
import struct
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from common.errors import CheckpointFormatError
from domain.contracts.i_raster_store import PathLike
from domain.entities.grid import Kernel
from domain.entities.layer_io import Activation, EgclParams, GammaKind, LayerKind
from domain.entities.network_spec import LayerSpec, UpsamplerKind, upsampler_spec
from domain.network.fusion import FusionModel
from domain.network.stack import LayerStack
from domain.network.upsampler import UpsamplerModel

logger = logging.getLogger(__name__)

MAGIC = b"EGC1"
_COUNT = struct.Struct("<I")
_LAYER = struct.Struct("<BBBxIIIId")

_KIND_CODES = {LayerKind.EGCL: 0, LayerKind.NCONV: 1, LayerKind.SCONV: 2, LayerKind.PLAIN: 3}
_ACTIVATION_CODES = {Activation.NONE: 0, Activation.RELU: 1}
_GAMMA_CODES = {GammaKind.SOFTPLUS: 0, GammaKind.RELU_SHIFT: 1}

Model = Union[UpsamplerModel, FusionModel]


def _decode(table: dict, code: int, what: str):
    for member, value in table.items():
        if value == code:
            return member
    raise CheckpointFormatError(f"unknown {what} code {code}")


def encode_checkpoint(model: LayerStack) -> bytes:
    parts = [MAGIC, _COUNT.pack(len(model.layers))]
    for spec, params in zip(model.spec.layers, model.params):
        parts.append(
            _LAYER.pack(
                _KIND_CODES[spec.kind],
                _ACTIVATION_CODES[spec.activation],
                _GAMMA_CODES[params.gamma],
                spec.kernel_size,
                spec.kernel_size,
                spec.in_channels,
                spec.out_channels,
                params.epsilon,
            )
        )
    for params in model.params:
        parts.append(np.ascontiguousarray(params.w.weights).astype("<f4").tobytes())
        parts.append(np.ascontiguousarray(params.b).astype("<f4").tobytes())
    return b"".join(parts)


def decode_checkpoint(payload: bytes) -> Model:
    """
    Rebuild a model from EGC1 bytes.

    Raises:
        CheckpointFormatError: bad magic, truncation, trailing bytes, or layer
            records that match neither the upsampler preset nor a fusion net.
    """
    if payload[:4] != MAGIC:
        raise CheckpointFormatError(f"bad magic {payload[:4]!r}, expected {MAGIC!r}")
    offset = 4
    try:
        (count,) = _COUNT.unpack_from(payload, offset)
        offset += _COUNT.size
        headers: List[Tuple] = []
        for _ in range(count):
            headers.append(_LAYER.unpack_from(payload, offset))
            offset += _LAYER.size
    except struct.error as e:
        raise CheckpointFormatError("checkpoint truncated inside the layer table") from e
    if count == 0:
        raise CheckpointFormatError("checkpoint holds no layers")

    specs: List[LayerSpec] = []
    params: List[EgclParams] = []
    for kind_code, act_code, gamma_code, k_h, k_w, c_in, c_out, epsilon in headers:
        if k_h != k_w:
            raise CheckpointFormatError(f"non-square kernel {k_h}x{k_w}")
        n_w = k_h * k_w * c_in * c_out
        needed = (n_w + c_out) * 4
        if offset + needed > len(payload):
            raise CheckpointFormatError(
                f"checkpoint truncated: need {needed} bytes at offset {offset}, have {len(payload) - offset}"
            )
        weights = np.frombuffer(payload, dtype="<f4", count=n_w, offset=offset)
        bias = np.frombuffer(payload, dtype="<f4", count=c_out, offset=offset + n_w * 4)
        offset += needed
        try:
            spec = LayerSpec(
                kind=_decode(_KIND_CODES, kind_code, "layer kind"),
                kernel_size=k_h,
                in_channels=c_in,
                out_channels=c_out,
                activation=_decode(_ACTIVATION_CODES, act_code, "activation"),
            )
            params.append(
                EgclParams(
                    w=Kernel(weights=weights.reshape(k_h, k_w, c_in, c_out).astype(np.float32)),
                    b=bias.astype(np.float32),
                    epsilon=epsilon,
                    gamma=_decode(_GAMMA_CODES, gamma_code, "gamma"),
                )
            )
        except ValueError as e:
            raise CheckpointFormatError(f"invalid layer record: {e}") from e
        specs.append(spec)
    if offset != len(payload):
        raise CheckpointFormatError(f"{len(payload) - offset} trailing bytes after the last layer")
    return _assemble(specs, params)


def _assemble(specs: List[LayerSpec], params: List[EgclParams]) -> Model:
    if all(s.kind is LayerKind.PLAIN for s in specs):
        first = specs[0]
        if len(specs) != 2 or first.in_channels % 2:
            raise CheckpointFormatError("plain layers do not describe a fusion network")
        model = FusionModel(first.in_channels // 2, params, hidden=first.out_channels)
        if model.spec.layers != specs:
            raise CheckpointFormatError("fusion layer records do not match the fusion layout")
        return model
    try:
        kind = UpsamplerKind.from_layer_kind(specs[0].kind)
    except ValueError as e:
        raise CheckpointFormatError(str(e)) from e
    if upsampler_spec(kind).layers != specs:
        raise CheckpointFormatError(f"layer records do not match the {kind.value} upsampler preset")
    return UpsamplerModel(kind, params)


def save_checkpoint(model: LayerStack, path: PathLike) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    payload = encode_checkpoint(model)
    target.write_bytes(payload)
    logger.debug("saved checkpoint %s (%d layers, %d bytes)", target, len(model.layers), len(payload))


def load_checkpoint(path: PathLike) -> Model:
    try:
        payload = Path(path).read_bytes()
    except OSError as e:
        raise CheckpointFormatError(f"cannot read checkpoint {path}: {e}") from e
    return decode_checkpoint(payload)
