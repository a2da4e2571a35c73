"""
UNet package.

Configurable 3-D UNet (shared encoder over concatenated modality channels,
decoder with skip connections, one binary head per label) and its
checkpoint format.
"""

from fusionseg_unet.checkpoint import FORMAT_VERSION, load_checkpoint, save_checkpoint
from fusionseg_unet.config import UNetConfig
from fusionseg_unet.model import (
    UNetModel,
    build_unet,
    check_input,
    count_parameters,
    forward,
    parameter_shapes,
)

__all__ = [
    "FORMAT_VERSION",
    "load_checkpoint",
    "save_checkpoint",
    "UNetConfig",
    "UNetModel",
    "build_unet",
    "check_input",
    "count_parameters",
    "forward",
    "parameter_shapes",
]
