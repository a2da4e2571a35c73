"""Resampling onto a new voxel spacing."""

from __future__ import annotations

import logging
import math

import numpy as np

from fusionseg_core.exceptions import DegenerateAxis
from fusionseg_preprocess.config import InterpKind
from fusionseg_preprocess.interpolation import bspline_prefilter, sample_points
from fusionseg_volume import Volume, world_to_voxel

logger = logging.getLogger(__name__)

# Absorbs float error in extent / spacing before taking the ceiling.
CEIL_EPS = 1e-6


def output_dims(vol: Volume, target_spacing: tuple[float, float, float]) -> tuple[int, int, int]:
    """ceil(input extent / target spacing) per axis."""
    return tuple(  # type: ignore[return-value]
        max(1, math.ceil(extent / s - CEIL_EPS))
        for extent, s in zip(vol.extent_mm, target_spacing)
    )


def sample_on_grid(source: Volume, grid: Volume, kind: InterpKind) -> Volume:
    """
    Sample `source` at the voxel centers of `grid` (same physical space).

    For CubicBSpline, `source` holds raw samples; the prefilter runs here.
    """
    coeffs = bspline_prefilter(source) if kind is InterpKind.CUBIC_BSPLINE else source
    idx = world_to_voxel(source, grid.voxel_centers_world())
    values = sample_points(coeffs, idx, kind)
    return grid.with_data(values.astype(np.float32), space_tag=source.space_tag)


def resample_volume(
    vol: Volume,
    target_spacing: tuple[float, float, float],
    kind: InterpKind,
) -> Volume:
    """
    Resample a volume to `target_spacing`, keeping its origin.

    Args:
        vol: input volume
        target_spacing: (sx, sy, sz) mm/voxel, each > 0
        kind: interpolation kernel (masks and label maps must use Nearest)

    Raises:
        DegenerateAxis: CubicBSpline on an axis shorter than 2 voxels
    """
    spacing = tuple(float(s) for s in target_spacing)
    if not all(s > 0 and math.isfinite(s) for s in spacing):
        raise DegenerateAxis(f"Target spacing must be positive, got {spacing}")
    dims = output_dims(vol, spacing)  # type: ignore[arg-type]
    grid = Volume.zeros(dims, spacing, vol.origin, vol.space_tag)  # type: ignore[arg-type]
    logger.debug(f"Resample {vol.dims}@{vol.spacing} -> {dims}@{spacing} ({kind.value})")
    return sample_on_grid(vol, grid, kind)
