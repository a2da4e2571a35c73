"""
Preprocessing configuration with Pydantic validation.

Defaults follow the reference preprocessing: MRI to 0.5 x 0.5 x 3.0 mm,
TRUS to 0.5 mm isotropic, x-y plane center-cropped to 128 x 128 mm.
"""

from enum import Enum
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field

from fusionseg_core.constants import CROP_EXTENT_MM, MRI_SPACING_MM, TRUS_SPACING_MM

PositiveMm = Annotated[float, Field(gt=0)]


class InterpKind(str, Enum):
    """Interpolation kernel"""
    NEAREST = "nearest"
    TRILINEAR = "trilinear"
    CUBIC_BSPLINE = "cubic_bspline"


class PreprocessConfig(BaseModel):
    """
    Resampling, cropping and padding targets.

    Example:
        >>> cfg = PreprocessConfig(crop_extent_mm=(48.0, 48.0))
        >>> cfg.mri_spacing
        (0.5, 0.5, 3.0)
    """

    model_config = ConfigDict(extra="forbid")

    mri_spacing: tuple[PositiveMm, PositiveMm, PositiveMm] = Field(
        default=MRI_SPACING_MM, description="MRI target spacing (mm/voxel)"
    )
    trus_spacing: tuple[PositiveMm, PositiveMm, PositiveMm] = Field(
        default=TRUS_SPACING_MM, description="TRUS target spacing (mm/voxel)"
    )
    crop_extent_mm: tuple[PositiveMm, PositiveMm] = Field(
        default=CROP_EXTENT_MM, description="x-y crop window (mm)"
    )
    pad_value: float = Field(default=0.0, description="Fill value for padded voxels")
    mri_interp: InterpKind = Field(default=InterpKind.CUBIC_BSPLINE)
    trus_interp: InterpKind = Field(default=InterpKind.CUBIC_BSPLINE)
