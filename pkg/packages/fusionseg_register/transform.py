"""Resampling through physical-space transforms."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from fusionseg_preprocess import InterpKind, bspline_prefilter, sample_points
from fusionseg_volume import Affine3, Volume, invert, world_to_voxel


def mapped_indices(moving: Volume, t: Affine3, ref_grid: Volume) -> NDArray[np.float64]:
    """Continuous moving-grid indices of every ref_grid voxel center pulled through invert(t)."""
    points = invert(t).apply(ref_grid.voxel_centers_world())
    return world_to_voxel(moving, points)


def apply_transform(moving: Volume, t: Affine3, ref_grid: Volume, kind: InterpKind) -> Volume:
    """
    Warp `moving` into the grid of `ref_grid`.

    Args:
        moving: volume in the source space
        t: source -> reference physical transform
        ref_grid: output grid (its data is ignored)
        kind: Nearest for labels, Trilinear for probabilities, CubicBSpline for intensities

    Raises:
        SingularTransform: t is not invertible
    """
    idx = mapped_indices(moving, t, ref_grid)
    source = bspline_prefilter(moving) if kind is InterpKind.CUBIC_BSPLINE else moving
    values = sample_points(source, idx, kind)
    return ref_grid.with_data(values.astype(np.float32), space_tag=ref_grid.space_tag)


def corner_error_mm(estimated: Affine3, truth: Affine3, grid: Volume) -> float:
    """Mean distance (mm) between the grid's 8 corners mapped by both transforms."""
    corners = grid.corners_mm()
    diff = estimated.apply(corners) - truth.apply(corners)
    return float(np.mean(np.linalg.norm(diff, axis=1)))
