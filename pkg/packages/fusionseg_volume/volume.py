"""
Physical-space volume type.

A Volume is the universal carrier for images, masks, label maps and
probability maps. Geometry is axis-aligned: a voxel index (i, j, k) along
(x, y, z) sits at origin + index * spacing in mm. Arrays are stored C-ordered
with shape (nz, ny, nx), so x is the fastest-varying axis in memory.

Axis convention: x = left-right, y = anterior-posterior, z = base-apex.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from fusionseg_core.exceptions import GridMismatch, SchemaError

# Tolerance used when comparing grids read from disk (float32 headers).
GRID_TOL_MM = 1e-4


class SpaceTag(str, Enum):
    """Physical space a volume lives in"""
    MRI = "mri"
    TRUS = "trus"
    OTHER = "other"


@dataclass(frozen=True, slots=True, eq=False)
class Volume:
    """
    Immutable 3D scalar field on an axis-aligned grid.

    Attributes:
        data: float32 array of shape (nz, ny, nx), read-only
        spacing: (sx, sy, sz) mm/voxel, strictly positive
        origin: (ox, oy, oz) mm, physical position of voxel (0, 0, 0)
        space_tag: which physical space the grid belongs to

    Example:
        >>> vol = Volume.zeros((4, 4, 2), spacing=(0.5, 0.5, 3.0))
        >>> vol.dims
        (4, 4, 2)
    """

    data: NDArray[np.float32]
    spacing: tuple[float, float, float]
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)
    space_tag: SpaceTag = SpaceTag.OTHER

    def __post_init__(self) -> None:
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        if data.ndim != 3:
            raise SchemaError(f"Volume data must be 3-D, got shape {data.shape}")
        if data.size == 0:
            raise SchemaError(f"Volume has an empty axis: shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise SchemaError("Volume data contains NaN or Inf")
        spacing = tuple(float(s) for s in self.spacing)
        origin = tuple(float(o) for o in self.origin)
        if len(spacing) != 3 or len(origin) != 3:
            raise SchemaError("spacing and origin must have three components")
        if not all(np.isfinite(s) and s > 0 for s in spacing):
            raise SchemaError(f"Spacing must be positive and finite, got {spacing}")
        if not all(np.isfinite(o) for o in origin):
            raise SchemaError(f"Origin must be finite, got {origin}")
        if data is self.data and data.flags.writeable:
            data = data.copy()
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "space_tag", SpaceTag(self.space_tag))

    # --- construction -----------------------------------------------------

    @classmethod
    def zeros(
        cls,
        dims: tuple[int, int, int],
        spacing: tuple[float, float, float],
        origin: tuple[float, float, float] = (0.0, 0.0, 0.0),
        space_tag: SpaceTag = SpaceTag.OTHER,
    ) -> Volume:
        """Create a zero volume with dims given as (nx, ny, nz)."""
        nx, ny, nz = dims
        return cls(np.zeros((nz, ny, nx), dtype=np.float32), spacing, origin, space_tag)

    def with_data(self, data: ArrayLike, space_tag: SpaceTag | None = None) -> Volume:
        """New volume on this grid carrying `data` (shape (nz, ny, nx))."""
        arr = np.asarray(data, dtype=np.float32)
        if arr.shape != self.data.shape:
            raise GridMismatch(
                f"Data shape {arr.shape} does not match grid shape {self.data.shape}"
            )
        return Volume(arr, self.spacing, self.origin, space_tag or self.space_tag)

    # --- geometry ---------------------------------------------------------

    @property
    def dims(self) -> tuple[int, int, int]:
        """Voxel counts (nx, ny, nz)"""
        nz, ny, nx = self.data.shape
        return (nx, ny, nz)

    @property
    def voxel_volume_mm3(self) -> float:
        sx, sy, sz = self.spacing
        return sx * sy * sz

    @property
    def extent_mm(self) -> tuple[float, float, float]:
        """Physical size covered by the voxels (dims * spacing)"""
        return tuple(n * s for n, s in zip(self.dims, self.spacing))  # type: ignore[return-value]

    @property
    def center_mm(self) -> NDArray[np.float64]:
        """Physical position of the grid center (midpoint of first and last voxel centers)"""
        last = np.asarray(self.dims, dtype=np.float64) - 1.0
        return voxel_to_world(self, last / 2.0)

    def corners_mm(self) -> NDArray[np.float64]:
        """Physical positions of the 8 corner voxel centers, shape (8, 3)"""
        nx, ny, nz = self.dims
        idx = np.array(
            [[i, j, k] for k in (0, nz - 1) for j in (0, ny - 1) for i in (0, nx - 1)],
            dtype=np.float64,
        )
        return voxel_to_world(self, idx)

    def voxel_centers_world(self) -> NDArray[np.float64]:
        """Physical centers of all voxels, shape (nz, ny, nx, 3) as (x, y, z) mm"""
        nx, ny, nz = self.dims
        k, j, i = np.meshgrid(np.arange(nz), np.arange(ny), np.arange(nx), indexing="ij")
        idx = np.stack([i, j, k], axis=-1).astype(np.float64)
        return voxel_to_world(self, idx)

    def grid_dict(self) -> dict[str, Any]:
        return {"dims": list(self.dims), "spacing": list(self.spacing), "origin": list(self.origin)}


def world_to_voxel(vol: Volume, p: ArrayLike) -> NDArray[np.float64]:
    """
    Map physical points (mm) to continuous voxel indices.

    Accepts a single point (3,) or any array whose last axis has length 3.
    Out-of-bounds results are legal.
    """
    pts = np.asarray(p, dtype=np.float64)
    return (pts - np.asarray(vol.origin)) / np.asarray(vol.spacing)


def voxel_to_world(vol: Volume, idx: ArrayLike) -> NDArray[np.float64]:
    """Map continuous voxel indices (i, j, k) to physical points in mm."""
    ijk = np.asarray(idx, dtype=np.float64)
    return np.asarray(vol.origin) + ijk * np.asarray(vol.spacing)


def same_grid(a: Volume, b: Volume, tol: float = GRID_TOL_MM) -> bool:
    """True when two volumes share dims, spacing and origin."""
    return (
        a.dims == b.dims
        and np.allclose(a.spacing, b.spacing, atol=tol, rtol=0.0)
        and np.allclose(a.origin, b.origin, atol=tol, rtol=0.0)
    )


def require_same_grid(a: Volume, b: Volume, what: str = "volumes") -> None:
    """Raise GridMismatch unless `a` and `b` share a grid."""
    if not same_grid(a, b):
        raise GridMismatch(
            f"{what} do not share a grid: {a.grid_dict()} vs {b.grid_dict()}"
        )
