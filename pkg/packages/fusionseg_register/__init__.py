"""
Register package.

Intensity-based multi-resolution affine registration (MRI -> TRUS) and
resampling of images, label maps and probability maps through Affine3.
"""

from fusionseg_register.config import Metric, RegistrationConfig
from fusionseg_register.metrics import mse, ncc
from fusionseg_register.optimizer import (
    RegistrationResult,
    overlap_fraction,
    register,
    register_affine,
)
from fusionseg_register.params import affine_to_params, params_to_affine, rotation_matrix
from fusionseg_register.transform import apply_transform, corner_error_mm

__all__ = [
    "Metric",
    "RegistrationConfig",
    "mse",
    "ncc",
    "RegistrationResult",
    "overlap_fraction",
    "register",
    "register_affine",
    "affine_to_params",
    "params_to_affine",
    "rotation_matrix",
    "apply_transform",
    "corner_error_mm",
]
