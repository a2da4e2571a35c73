"""
Voxel sampling kernels.

All kernels extend the grid by clamping: continuous indices are clamped to
[0, n - 1] per axis before interpolation, and spline support outside the grid
reuses the edge coefficient.

Cubic B-spline sampling needs coefficients rather than samples. The
coefficients c solve, per axis,

    f[i] = c[clamp(i - 1)] / 6 + 2 c[i] / 3 + c[clamp(i + 1)] / 6

so that the spline passes through every sample.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import solve_banded
from scipy.ndimage import map_coordinates

from fusionseg_core.exceptions import DegenerateAxis
from fusionseg_preprocess.config import InterpKind
from fusionseg_volume import Volume


def _interpolation_bands(n: int) -> NDArray[np.float64]:
    """Tridiagonal system for clamp-extended cubic B-spline interpolation."""
    ab = np.zeros((3, n), dtype=np.float64)
    ab[0, 1:] = 1.0 / 6.0
    ab[1, :] = 2.0 / 3.0
    ab[2, :-1] = 1.0 / 6.0
    # c[-1] -> c[0] and c[n] -> c[n-1]
    ab[1, 0] += 1.0 / 6.0
    ab[1, -1] += 1.0 / 6.0
    return ab


def bspline_prefilter(vol: Volume) -> Volume:
    """
    Compute cubic B-spline coefficients for a volume.

    Raises:
        DegenerateAxis: any axis shorter than 2 voxels
    """
    if min(vol.dims) < 2:
        raise DegenerateAxis(f"B-spline prefilter needs >= 2 voxels per axis, dims={vol.dims}")
    coeffs = vol.data.astype(np.float64)
    for axis in range(3):
        n = coeffs.shape[axis]
        moved = np.moveaxis(coeffs, axis, 0)
        solved = solve_banded((1, 1), _interpolation_bands(n), moved.reshape(n, -1))
        coeffs = np.moveaxis(solved.reshape(moved.shape), 0, axis)
    return vol.with_data(coeffs)


def _array_coords(vol: Volume, idx: NDArray[np.float64]) -> NDArray[np.float64]:
    """(..., 3) voxel indices (i, j, k) -> clamped (3, N) array coordinates (k, j, i)."""
    flat = idx.reshape(-1, 3)
    upper = np.asarray(vol.dims, dtype=np.float64) - 1.0
    clamped = np.clip(flat, 0.0, upper)
    return clamped[:, ::-1].T


def round_half_away(x: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def sample_points(vol: Volume, idx: ArrayLike, kind: InterpKind) -> NDArray[np.float64]:
    """
    Sample a volume at many continuous voxel indices.

    Args:
        vol: samples (Nearest/Trilinear) or prefiltered coefficients (CubicBSpline)
        idx: array (..., 3) of (i, j, k) indices
        kind: interpolation kernel

    Returns:
        float64 array with the leading shape of `idx`
    """
    points = np.asarray(idx, dtype=np.float64)
    lead = points.shape[:-1]
    coords = _array_coords(vol, points)

    if kind is InterpKind.NEAREST:
        nz, ny, nx = vol.data.shape
        k = np.clip(round_half_away(coords[0]), 0, nz - 1).astype(np.intp)
        j = np.clip(round_half_away(coords[1]), 0, ny - 1).astype(np.intp)
        i = np.clip(round_half_away(coords[2]), 0, nx - 1).astype(np.intp)
        values = vol.data[k, j, i].astype(np.float64)
    else:
        order = 1 if kind is InterpKind.TRILINEAR else 3
        values = map_coordinates(
            vol.data.astype(np.float64),
            coords,
            order=order,
            mode="nearest",
            prefilter=False,
        )
    return values.reshape(lead)


def sample_at(vol: Volume, idx: ArrayLike, kind: InterpKind) -> float:
    """Sample a single continuous voxel index (i, j, k)."""
    return float(sample_points(vol, np.asarray(idx, dtype=np.float64).reshape(1, 3), kind)[0])
