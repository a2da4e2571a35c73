"""
Preprocess package.

Resampling (Nearest / Trilinear / cubic B-spline), x-y center crop/pad and
gland-referenced z-score normalization.
"""

from fusionseg_preprocess.config import InterpKind, PreprocessConfig
from fusionseg_preprocess.interpolation import bspline_prefilter, sample_at, sample_points
from fusionseg_preprocess.crop import center_crop_pad
from fusionseg_preprocess.normalize import gland_statistics, zscore_normalize
from fusionseg_preprocess.resample import output_dims, resample_volume, sample_on_grid
from fusionseg_preprocess.study import mri_gland_mask, preprocess_study

__all__ = [
    "InterpKind",
    "PreprocessConfig",
    "bspline_prefilter",
    "sample_at",
    "sample_points",
    "center_crop_pad",
    "gland_statistics",
    "zscore_normalize",
    "output_dims",
    "resample_volume",
    "sample_on_grid",
    "mri_gland_mask",
    "preprocess_study",
]
