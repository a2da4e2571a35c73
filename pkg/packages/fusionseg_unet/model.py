"""
3-D UNet built on fusionseg_nngraph.

Layer list (stage channels c_s = min(base * 2**s, 256)):

    encoder.s  conv0 (k3, stride 1 at s = 0 else 2, pad 1) -> norm0 -> leaky ReLU
               conv1 (k3, pad 1) -> norm1 -> leaky ReLU
    decoder.s  up (transposed conv k2 stride 2, c_{s+1} -> c_s)
               concat [encoder.s output, up]
               conv0 (2 c_s -> c_s) -> norm0 -> leaky ReLU
               conv1 (c_s -> c_s) -> norm1 -> leaky ReLU
    heads.l    1x1x1 conv (c_0 -> 2) -> channel softmax, channel 1 kept

The deepest encoder stage is the bottleneck.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from pydantic import ValidationError

from fusionseg_core.exceptions import InvalidConfig, ShapeMismatch
from fusionseg_nngraph import (
    Tensor5,
    concat_channels,
    conv3d,
    conv3d_transpose,
    instance_norm,
    leaky_relu,
    slice_channels,
    softmax_channels,
)
from fusionseg_unet.config import UNetConfig

logger = logging.getLogger(__name__)

Shape = tuple[int, ...]


def _block_shapes(prefix: str, cin: int, cout: int, k: int) -> list[tuple[str, Shape]]:
    return [
        (f"{prefix}.conv0.weight", (cout, cin, k, k, k)),
        (f"{prefix}.conv0.bias", (cout,)),
        (f"{prefix}.norm0.gamma", (cout,)),
        (f"{prefix}.norm0.beta", (cout,)),
        (f"{prefix}.conv1.weight", (cout, cout, k, k, k)),
        (f"{prefix}.conv1.bias", (cout,)),
        (f"{prefix}.norm1.gamma", (cout,)),
        (f"{prefix}.norm1.beta", (cout,)),
    ]


def parameter_shapes(cfg: UNetConfig) -> list[tuple[str, Shape]]:
    """Parameter names and shapes in checkpoint order."""
    channels = cfg.stage_channels()
    k = cfg.kernel
    shapes: list[tuple[str, Shape]] = []
    cin = cfg.in_channels
    for s, c in enumerate(channels):
        shapes += _block_shapes(f"encoder.{s}", cin, c, k)
        cin = c
    for s in reversed(range(cfg.stages - 1)):
        c = channels[s]
        shapes.append((f"decoder.{s}.up.weight", (channels[s + 1], c, 2, 2, 2)))
        shapes.append((f"decoder.{s}.up.bias", (c,)))
        shapes += _block_shapes(f"decoder.{s}", 2 * c, c, k)
    for label in cfg.head_labels:
        shapes.append((f"heads.{label}.weight", (2, channels[0], 1, 1, 1)))
        shapes.append((f"heads.{label}.bias", (2,)))
    return shapes


@dataclass
class UNetModel:
    """Configuration plus named parameters (insertion order = checkpoint order)."""

    config: UNetConfig
    params: dict[str, Tensor5]

    def parameters(self) -> list[Tensor5]:
        return list(self.params.values())

    def __getitem__(self, name: str) -> Tensor5:
        return self.params[name]


def count_parameters(model: UNetModel | UNetConfig) -> int:
    cfg = model.config if isinstance(model, UNetModel) else model
    return sum(int(np.prod(shape)) for _, shape in parameter_shapes(cfg))


def _init_value(name: str, shape: Shape, slope: float, rng: np.random.Generator) -> np.ndarray:
    if name.endswith(".gamma"):
        return np.ones(shape, dtype=np.float32)
    if name.endswith((".beta", ".bias")):
        return np.zeros(shape, dtype=np.float32)
    if name.endswith("up.weight"):
        fan_in = shape[0]
    else:
        fan_in = int(np.prod(shape[1:]))
    if name.startswith("heads."):
        std = 1.0 / np.sqrt(fan_in)
    else:
        std = np.sqrt(2.0 / ((1.0 + slope**2) * fan_in))
    return (rng.standard_normal(shape) * std).astype(np.float32)


def build_unet(cfg: UNetConfig, seed: int = 0) -> UNetModel:
    """
    Build a UNet with He initialization scaled for leaky ReLU.

    Raises:
        InvalidConfig: configuration does not validate
    """
    try:
        cfg = UNetConfig.model_validate(cfg.model_dump())
    except ValidationError as e:
        raise InvalidConfig(f"Invalid UNet configuration: {e}") from e
    rng = np.random.default_rng(seed)
    params = {
        name: Tensor5(_init_value(name, shape, cfg.leaky_slope, rng), requires_grad=True)
        for name, shape in parameter_shapes(cfg)
    }
    model = UNetModel(cfg, params)
    logger.debug(f"Built UNet {cfg.stage_channels()} with {count_parameters(model)} parameters")
    return model


def _block(model: UNetModel, h: Tensor5, prefix: str, stride: int) -> Tensor5:
    p = model.params
    slope = model.config.leaky_slope
    h = conv3d(h, p[f"{prefix}.conv0.weight"], p[f"{prefix}.conv0.bias"], stride=stride, pad=1)
    h = leaky_relu(instance_norm(h, p[f"{prefix}.norm0.gamma"], p[f"{prefix}.norm0.beta"]), slope)
    h = conv3d(h, p[f"{prefix}.conv1.weight"], p[f"{prefix}.conv1.bias"], stride=1, pad=1)
    h = instance_norm(h, p[f"{prefix}.norm1.gamma"], p[f"{prefix}.norm1.beta"])
    return leaky_relu(h, slope)


def check_input(cfg: UNetConfig, x: Tensor5) -> None:
    if x.data.ndim != 5:
        raise ShapeMismatch(f"UNet input must be (N, C, D, H, W), got {x.shape}")
    if x.shape[1] != cfg.in_channels:
        raise ShapeMismatch(f"UNet expects {cfg.in_channels} channels, got {x.shape[1]}")
    m = cfg.size_multiple
    if any(d % m for d in x.shape[2:]):
        raise ShapeMismatch(f"Spatial dims {x.shape[2:]} must be divisible by {m}")


def forward(model: UNetModel, x: Tensor5) -> list[Tensor5]:
    """
    Run the network.

    Returns:
        One (N, 1, D, H, W) foreground probability tensor per head label

    Raises:
        ShapeMismatch: wrong channel count or indivisible spatial dims
    """
    cfg = model.config
    check_input(cfg, x)
    p = model.params

    skips: list[Tensor5] = []
    h = x
    for s in range(cfg.stages):
        h = _block(model, h, f"encoder.{s}", stride=1 if s == 0 else 2)
        skips.append(h)
    for s in reversed(range(cfg.stages - 1)):
        up = conv3d_transpose(h, p[f"decoder.{s}.up.weight"], p[f"decoder.{s}.up.bias"], stride=2)
        h = _block(model, concat_channels(skips[s], up), f"decoder.{s}", stride=1)

    heads = []
    for label in cfg.head_labels:
        logits = conv3d(h, p[f"heads.{label}.weight"], p[f"heads.{label}.bias"])
        heads.append(slice_channels(softmax_channels(logits), 1, 2))
    return heads
