"""
Multimodal study container and its disk representation.

MRI sequences (T2w, ADC, DWI) are assumed to share one grid per study; the
gland mask and lesion label map live on the TRUS grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from fusionseg_core.constants import MAX_GG
from fusionseg_core.exceptions import GridMismatch, SchemaError
from fusionseg_volume.affine import Affine3
from fusionseg_volume.manifest import Split, StudyManifest
from fusionseg_volume.nifti import nifti_read, nifti_write
from fusionseg_volume.volume import SpaceTag, Volume, require_same_grid, same_grid

logger = logging.getLogger(__name__)

MRI_SEQUENCES = ("t2w", "adc", "dwi")


@dataclass(frozen=True)
class MultimodalStudy:
    """
    One case: MRI sequences, TRUS volume, gland mask, lesion labels.

    Attributes:
        lesion_gg: lesion id -> grade group (1-5); covers every id in lesion_labels
        mri_to_trus: physical transform mapping MRI points to TRUS points
        synthesis_transform: exact MRI -> TRUS transform for phantom studies
    """

    study_id: str
    t2w: Volume
    adc: Volume
    dwi: Volume
    trus: Volume
    gland_mask: Volume
    lesion_labels: Volume
    lesion_gg: dict[int, int] = field(default_factory=dict)
    mri_to_trus: Affine3 | None = None
    split: Split = "train"
    cohort: str = "default"
    synthesis_transform: Affine3 | None = None

    def mri(self, name: str) -> Volume:
        if name not in MRI_SEQUENCES:
            raise KeyError(name)
        return getattr(self, name)  # type: ignore[no-any-return]

    def lesion_ids(self) -> list[int]:
        ids = np.unique(self.lesion_labels.data.astype(np.int64))
        return [int(i) for i in ids if i > 0]

    def with_updates(self, **changes: object) -> MultimodalStudy:
        return replace(self, **changes)  # type: ignore[arg-type]


def validate_study(study: MultimodalStudy) -> None:
    """
    Check MultimodalStudy invariants.

    Raises:
        GridMismatch: mask/labels off the TRUS grid, or MRI sequences on different grids
        SchemaError: non-binary gland mask, negative or fractional lesion ids,
            lesion ids without a grade group, grade groups outside 1-5
    """
    require_same_grid(study.gland_mask, study.trus, "gland mask and TRUS")
    require_same_grid(study.lesion_labels, study.trus, "lesion labels and TRUS")
    for name in ("adc", "dwi"):
        if not same_grid(study.mri(name), study.t2w):
            raise GridMismatch(f"{study.study_id}: {name} is not on the T2w grid")

    gland = study.gland_mask.data
    if not np.all((gland == 0) | (gland == 1)):
        raise SchemaError(f"{study.study_id}: gland mask must contain only 0 and 1")

    labels = study.lesion_labels.data
    if np.any(labels < 0) or np.any(labels != np.round(labels)):
        raise SchemaError(f"{study.study_id}: lesion labels must be non-negative integers")

    for lesion_id in study.lesion_ids():
        if lesion_id not in study.lesion_gg:
            raise SchemaError(f"{study.study_id}: lesion {lesion_id} has no grade group")
    for lesion_id, gg in study.lesion_gg.items():
        if not 1 <= gg <= MAX_GG:
            raise SchemaError(f"{study.study_id}: lesion {lesion_id} grade group {gg}")

    outside = np.count_nonzero((labels > 0) & (gland == 0))
    if outside:
        logger.warning(f"{study.study_id}: {outside} lesion voxels lie outside the gland mask")


def load_study(manifest: StudyManifest) -> MultimodalStudy:
    """
    Load every volume referenced by a manifest entry.

    Raises:
        MissingFile, SchemaError, GridMismatch (plus NIfTI reader errors)
    """
    mri = {name: nifti_read(getattr(manifest, name), SpaceTag.MRI) for name in MRI_SEQUENCES}
    study = MultimodalStudy(
        study_id=manifest.study_id,
        t2w=mri["t2w"],
        adc=mri["adc"],
        dwi=mri["dwi"],
        trus=nifti_read(manifest.trus, SpaceTag.TRUS),
        gland_mask=nifti_read(manifest.gland, SpaceTag.TRUS),
        lesion_labels=nifti_read(manifest.lesions, SpaceTag.TRUS),
        lesion_gg=dict(manifest.lesion_gg),
        mri_to_trus=Affine3.load(manifest.mri_to_trus) if manifest.mri_to_trus else None,
        split=manifest.split,
        cohort=manifest.cohort,
        synthesis_transform=(
            Affine3.load(manifest.phantom_truth) if manifest.phantom_truth else None
        ),
    )
    validate_study(study)
    logger.debug(f"Loaded study {study.study_id} (split={study.split})")
    return study


def save_study(study: MultimodalStudy, directory: Path | str) -> StudyManifest:
    """
    Write a study as NIfTI files (plus transform JSONs) into `directory`.

    Returns:
        Manifest entry with absolute paths
    """
    out = Path(directory).resolve()
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "t2w": study.t2w,
        "adc": study.adc,
        "dwi": study.dwi,
        "trus": study.trus,
        "gland": study.gland_mask,
        "lesions": study.lesion_labels,
    }
    paths: dict[str, Path] = {}
    for name, vol in files.items():
        paths[name] = out / f"{name}.nii"
        nifti_write(vol, paths[name])

    transform_path = None
    if study.mri_to_trus is not None:
        transform_path = out / "mri_to_trus.json"
        study.mri_to_trus.save(transform_path)
    truth_path = None
    if study.synthesis_transform is not None:
        truth_path = out / "phantom_truth.json"
        study.synthesis_transform.save(truth_path)

    return StudyManifest(
        study_id=study.study_id,
        lesion_gg=dict(study.lesion_gg),
        mri_to_trus=transform_path,
        phantom_truth=truth_path,
        split=study.split,
        cohort=study.cohort,
        **paths,
    )
