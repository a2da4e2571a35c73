"""Center crop / pad of the x-y plane."""

from __future__ import annotations

import math

import numpy as np

from fusionseg_volume import Volume


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _axis_window(n_in: int, n_out: int) -> tuple[int, int, int]:
    """(source start, pad before, pad after) for one axis."""
    diff = n_out - n_in
    if diff <= 0:
        return (-diff) // 2, 0, 0
    before = diff // 2
    return 0, before, diff - before


def center_crop_pad(
    vol: Volume,
    extent_mm: tuple[float, float],
    pad_value: float = 0.0,
) -> Volume:
    """
    Crop or pad the x-y plane to `extent_mm`, centered on the grid center.

    The z axis is untouched. Odd size differences put the extra voxel on the
    high-index side. The origin moves so retained voxels keep their physical
    positions.
    """
    sx, sy, _ = vol.spacing
    nx_in, ny_in, nz = vol.dims
    nx_out = max(1, _round_half_up(extent_mm[0] / sx))
    ny_out = max(1, _round_half_up(extent_mm[1] / sy))

    x_start, x_before, x_after = _axis_window(nx_in, nx_out)
    y_start, y_before, y_after = _axis_window(ny_in, ny_out)

    data = vol.data[:, y_start:y_start + min(ny_in, ny_out), x_start:x_start + min(nx_in, nx_out)]
    if x_before or x_after or y_before or y_after:
        data = np.pad(
            data,
            ((0, 0), (y_before, y_after), (x_before, x_after)),
            mode="constant",
            constant_values=pad_value,
        )

    ox, oy, oz = vol.origin
    origin = (ox + (x_start - x_before) * sx, oy + (y_start - y_before) * sy, oz)
    return Volume(data, vol.spacing, origin, vol.space_tag)
