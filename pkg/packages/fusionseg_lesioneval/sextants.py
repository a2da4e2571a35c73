"""
Sextant partition of the gland.

The gland's z-extent (voxel slices zmin..zmax) is split into three bands of
equal thickness: base (low z), mid, apex (high z). Each band is split at
the whole-gland centroid x: voxels with x below the centroid go to the
"left" half, the rest to "right".
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from fusionseg_core.exceptions import EmptyGland
from fusionseg_volume import Volume

SEXTANT_NAMES = (
    "base_left",
    "base_right",
    "mid_left",
    "mid_right",
    "apex_left",
    "apex_right",
)


def sextant_partition(gland_mask: Volume) -> list[NDArray[np.bool_]]:
    """
    Six disjoint boolean masks (nz, ny, nx) whose union is the gland.

    Raises:
        EmptyGland
    """
    gland = gland_mask.data > 0.5
    zyx = np.argwhere(gland)
    if len(zyx) == 0:
        raise EmptyGland("Sextant partition needs a non-empty gland mask")
    zmin, zmax = int(zyx[:, 0].min()), int(zyx[:, 0].max())
    thickness = (zmax - zmin + 1) / 3.0
    cx = float(zyx[:, 2].mean())

    nz, _, nx = gland.shape
    band = np.minimum(((np.arange(nz) - zmin) // thickness).astype(int), 2)
    right = np.arange(nx) >= cx
    band_of = band[:, None, None]
    right_of = right[None, None, :]

    regions = []
    for b in range(3):
        for is_right in (False, True):
            regions.append(gland & (band_of == b) & (right_of == is_right))
    return regions
