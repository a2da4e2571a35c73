"""Similarity metrics over optional masks."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from fusionseg_core.exceptions import DegenerateVariance
from fusionseg_volume import Volume, require_same_grid

MIN_VARIANCE = 1e-12


def _masked_pair(
    a: Volume, b: Volume, mask: Volume | None
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    require_same_grid(a, b, "metric inputs")
    x = a.data.astype(np.float64)
    y = b.data.astype(np.float64)
    if mask is None:
        return x.ravel(), y.ravel()
    require_same_grid(a, mask, "metric input and mask")
    keep = mask.data > 0.5
    return x[keep], y[keep]


def ncc_values(x: NDArray[np.float64], y: NDArray[np.float64]) -> float:
    """Pearson correlation of two equally sized samples."""
    if x.size < 2:
        raise DegenerateVariance(f"NCC needs at least 2 voxels, got {x.size}")
    dx = x - x.mean()
    dy = y - y.mean()
    vx = float(np.dot(dx, dx))
    vy = float(np.dot(dy, dy))
    if vx <= MIN_VARIANCE * x.size or vy <= MIN_VARIANCE * y.size:
        raise DegenerateVariance("NCC input has zero variance inside the mask")
    return float(np.clip(np.dot(dx, dy) / np.sqrt(vx * vy), -1.0, 1.0))


def ncc(a: Volume, b: Volume, mask: Volume | None = None) -> float:
    """
    Normalized cross-correlation in [-1, 1].

    Raises:
        GridMismatch, DegenerateVariance
    """
    return ncc_values(*_masked_pair(a, b, mask))


def mse(a: Volume, b: Volume, mask: Volume | None = None) -> float:
    """Mean squared intensity difference (lower is better)."""
    x, y = _masked_pair(a, b, mask)
    if x.size == 0:
        raise DegenerateVariance("MSE mask selects no voxels")
    return float(np.mean((x - y) ** 2))
