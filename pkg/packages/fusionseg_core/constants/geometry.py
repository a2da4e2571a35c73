"""Resampling and cropping targets for the MRI and TRUS grids."""

from typing import Final

# (sx, sy, sz) in mm/voxel
MRI_SPACING_MM: Final[tuple[float, float, float]] = (0.5, 0.5, 3.0)
TRUS_SPACING_MM: Final[tuple[float, float, float]] = (0.5, 0.5, 0.5)

# x-y crop window in mm; 256 x 256 voxels at 0.5 mm
CROP_EXTENT_MM: Final[tuple[float, float]] = (128.0, 128.0)
