"""Whole-study preprocessing."""

from __future__ import annotations

import logging

import numpy as np

from fusionseg_preprocess.config import InterpKind, PreprocessConfig
from fusionseg_preprocess.crop import center_crop_pad
from fusionseg_preprocess.interpolation import sample_points
from fusionseg_preprocess.normalize import zscore_normalize
from fusionseg_preprocess.resample import resample_volume
from fusionseg_volume import Affine3, MultimodalStudy, Volume, validate_study, world_to_voxel
from fusionseg_volume.study import MRI_SEQUENCES

logger = logging.getLogger(__name__)


def _to_geometry(
    vol: Volume,
    spacing: tuple[float, float, float],
    kind: InterpKind,
    cfg: PreprocessConfig,
    pad_value: float,
) -> Volume:
    return center_crop_pad(resample_volume(vol, spacing, kind), cfg.crop_extent_mm, pad_value)


def mri_gland_mask(gland_trus: Volume, mri_to_trus: Affine3, mri_grid: Volume) -> Volume:
    """Project a TRUS-space gland mask onto an MRI grid (Nearest)."""
    points = mri_to_trus.apply(mri_grid.voxel_centers_world())
    values = sample_points(gland_trus, world_to_voxel(gland_trus, points), InterpKind.NEAREST)
    return mri_grid.with_data(values.astype(np.float32), space_tag=mri_grid.space_tag)


def preprocess_study(study: MultimodalStudy, cfg: PreprocessConfig) -> MultimodalStudy:
    """
    Resample, crop/pad and z-score every volume of a study.

    MRI sequences go to cfg.mri_spacing, TRUS to cfg.trus_spacing; the gland
    mask and lesion labels follow the TRUS geometry with Nearest. MRI
    intensities are normalized against the TRUS gland projected into MRI
    space. The MRI -> TRUS transform is physical, so it is carried unchanged.

    Raises:
        DegenerateAxis, EmptyGland, DegenerateStd, SingularTransform
    """
    trus = _to_geometry(study.trus, cfg.trus_spacing, cfg.trus_interp, cfg, cfg.pad_value)
    gland = _to_geometry(study.gland_mask, cfg.trus_spacing, InterpKind.NEAREST, cfg, 0.0)
    labels = _to_geometry(study.lesion_labels, cfg.trus_spacing, InterpKind.NEAREST, cfg, 0.0)

    mri = {
        name: _to_geometry(study.mri(name), cfg.mri_spacing, cfg.mri_interp, cfg, cfg.pad_value)
        for name in MRI_SEQUENCES
    }
    transform = study.mri_to_trus
    if transform is None:
        logger.warning(f"{study.study_id}: no MRI -> TRUS transform, assuming identity")
        transform = Affine3.identity()
    gland_mri = mri_gland_mask(gland, transform, mri["t2w"])

    processed = study.with_updates(
        trus=zscore_normalize(trus, gland),
        gland_mask=gland,
        lesion_labels=labels,
        **{name: zscore_normalize(vol, gland_mri) for name, vol in mri.items()},
    )
    validate_study(processed)
    logger.debug(
        f"Preprocessed {study.study_id}: TRUS {trus.dims} MRI {mri['t2w'].dims}"
    )
    return processed
