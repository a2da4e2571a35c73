"""Gland-referenced z-score normalization."""

from __future__ import annotations

import numpy as np

from fusionseg_core.exceptions import DegenerateStd, EmptyGland
from fusionseg_volume import Volume, require_same_grid

MIN_STD = 1e-6


def gland_statistics(vol: Volume, gland_mask: Volume) -> tuple[float, float]:
    """Population mean and standard deviation of `vol` inside the gland (float64)."""
    require_same_grid(vol, gland_mask, "volume and gland mask")
    values = vol.data[gland_mask.data > 0.5].astype(np.float64)
    if values.size < 2:
        raise EmptyGland(f"Gland mask holds {values.size} voxels, need at least 2")
    return float(values.mean()), float(values.std())


def zscore_normalize(vol: Volume, gland_mask: Volume) -> Volume:
    """
    (vol - mu) / sigma over ALL voxels, with mu/sigma from gland voxels.

    Raises:
        GridMismatch, EmptyGland, DegenerateStd
    """
    mu, sigma = gland_statistics(vol, gland_mask)
    if sigma <= MIN_STD:
        raise DegenerateStd(f"Gland intensities are near-constant (std={sigma:.3e})")
    normalized = (vol.data.astype(np.float64) - mu) / sigma
    return vol.with_data(normalized.astype(np.float32))
