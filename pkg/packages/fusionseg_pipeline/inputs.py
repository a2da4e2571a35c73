"""
Model inputs and targets assembled from a study.

Channel order per setup: [TRUS] | [T2w, ADC, DWI] | [TRUS, T2w, ADC, DWI].
TRUS-only and multimodal inputs live on the TRUS grid (MRI sequences are
projected through the study's MRI -> TRUS transform); MRI-only inputs live
on the MRI grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from fusionseg_core.constants import ANY_CANCER_MIN_GG, CSPCA_MIN_GG, SETUP_CHANNELS, Setup
from fusionseg_core.exceptions import GridMismatch
from fusionseg_preprocess import InterpKind
from fusionseg_register import apply_transform
from fusionseg_volume import Affine3, MultimodalStudy, Volume, invert, same_grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChannelStack:
    """
    Co-registered input channels.

    Attributes:
        channels: channel names in stacking order
        data: float32 array (C, nz, ny, nx)
        grid: geometry shared by every channel
    """

    channels: tuple[str, ...]
    data: NDArray[np.float32]
    grid: Volume


def _require_transform(study: MultimodalStudy) -> Affine3:
    if study.mri_to_trus is None:
        raise GridMismatch(f"{study.study_id}: MRI and TRUS grids differ and no transform is set")
    return study.mri_to_trus


def mri_on_trus_grid(study: MultimodalStudy, name: str) -> Volume:
    """One MRI sequence resampled onto the TRUS grid (cubic B-spline)."""
    vol = study.mri(name)
    if same_grid(vol, study.trus):
        return vol
    return apply_transform(vol, _require_transform(study), study.trus, InterpKind.CUBIC_BSPLINE)


def assemble_input(study: MultimodalStudy, setup: Setup) -> ChannelStack:
    """
    Stack the setup's channels on one grid.

    Raises:
        GridMismatch: channels disagree on grid (MRI-only), or MRI must be
            projected but the study has no transform
    """
    names = SETUP_CHANNELS[setup]
    if setup is Setup.MRI_ONLY:
        vols = [study.mri(name) for name in names]
        grid = vols[0]
        for name, vol in zip(names, vols):
            if not same_grid(vol, grid):
                raise GridMismatch(f"{study.study_id}: {name} is not on the {names[0]} grid")
    else:
        grid = study.trus
        vols = [study.trus] + [mri_on_trus_grid(study, n) for n in names[1:]]
    data = np.stack([v.data for v in vols]).astype(np.float32)
    return ChannelStack(names, data, grid.with_data(np.zeros_like(grid.data)))


def label_maps(study: MultimodalStudy) -> tuple[Volume, Volume, Volume]:
    """Binary gland, any-cancer (GG >= 1) and CsPCa (GG >= 2) maps on the TRUS grid."""
    labels = study.lesion_labels.data.astype(np.int64)
    any_ids = [i for i, gg in study.lesion_gg.items() if gg >= ANY_CANCER_MIN_GG]
    cs_ids = [i for i, gg in study.lesion_gg.items() if gg >= CSPCA_MIN_GG]
    gland = (study.gland_mask.data > 0.5).astype(np.float32)
    any_cancer = np.isin(labels, any_ids).astype(np.float32)
    cspca = np.isin(labels, cs_ids).astype(np.float32)
    trus = study.trus
    return trus.with_data(gland), trus.with_data(any_cancer), trus.with_data(cspca)


def project_labels(labels: Volume, t: Affine3, trus_grid: Volume) -> Volume:
    """Nearest-neighbour projection of an MRI-space label map into TRUS space."""
    return apply_transform(labels, t, trus_grid, InterpKind.NEAREST)


def label_targets(study: MultimodalStudy, grid: Volume) -> tuple[Volume, Volume, Volume]:
    """
    The three binary targets on `grid`.

    Targets are defined on the TRUS grid; other grids receive them through
    the inverse MRI -> TRUS transform with Nearest.
    """
    maps = label_maps(study)
    if same_grid(grid, study.trus):
        return maps
    back = invert(_require_transform(study))
    projected = [apply_transform(m, back, grid, InterpKind.NEAREST) for m in maps]
    return projected[0], projected[1], projected[2]


def project_prediction(prob: Volume, t: Affine3, trus_grid: Volume) -> Volume:
    """Trilinear projection of an MRI-space probability map, clamped to [0, 1]."""
    warped = apply_transform(prob, t, trus_grid, InterpKind.TRILINEAR)
    return warped.with_data(np.clip(warped.data, 0.0, 1.0))
