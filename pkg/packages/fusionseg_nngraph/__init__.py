"""
nngraph package.

Minimal reverse-mode automatic differentiation over 5-D tensors: the
convolution, normalization and activation operations a 3-D UNet needs,
segmentation losses, Adam, and a finite-difference gradient checker.
"""

from fusionseg_nngraph.gradcheck import GradcheckFailure, GradcheckReport, gradcheck
from fusionseg_nngraph.losses import (
    bce_loss,
    combine_terms,
    combined_loss,
    loss_terms,
    soft_dice_loss,
    term_values,
)
from fusionseg_nngraph.ops import (
    add,
    concat_channels,
    conv3d,
    conv3d_transpose,
    instance_norm,
    leaky_relu,
    mean_of,
    scale,
    slice_channels,
    softmax_channels,
)
from fusionseg_nngraph.optim import AdamState, adam_step
from fusionseg_nngraph.tensor import Tape, Tensor5, active_tape, zero_grad

__all__ = [
    "GradcheckFailure",
    "GradcheckReport",
    "gradcheck",
    "bce_loss",
    "combine_terms",
    "combined_loss",
    "loss_terms",
    "soft_dice_loss",
    "term_values",
    "add",
    "concat_channels",
    "conv3d",
    "conv3d_transpose",
    "instance_norm",
    "leaky_relu",
    "mean_of",
    "scale",
    "slice_channels",
    "softmax_channels",
    "AdamState",
    "adam_step",
    "Tape",
    "Tensor5",
    "active_tape",
    "zero_grad",
]
