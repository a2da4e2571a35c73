"""
Phantom study generation.

TRUS intensities are a smooth tissue map modulated by multiplicative
speckle; MRI sequences are tissue means plus additive Gaussian noise,
sampled at MRI voxel centers carried into TRUS space by the hidden
transform. Each study draws from its own stream default_rng([seed, index]).
"""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from pydantic import ValidationError
from scipy.ndimage import gaussian_filter
from scipy.spatial.transform import Rotation

from fusionseg_core.exceptions import InvalidConfig, IoError, NotAPhantom
from fusionseg_phantom.anatomy import Anatomy, place_lesions, sample_gland
from fusionseg_phantom.config import PhantomConfig
from fusionseg_volume import (
    MRI_SEQUENCES,
    Affine3,
    MultimodalStudy,
    SpaceTag,
    Volume,
    save_study,
    write_manifest,
)
from fusionseg_volume.manifest import Split

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
LESIONS_NAME = "phantom_lesions.json"


@dataclass(frozen=True)
class PhantomStudy:
    study: MultimodalStudy
    anatomy: Anatomy


def _validated(cfg: PhantomConfig) -> PhantomConfig:
    try:
        return PhantomConfig.model_validate(cfg.model_dump())
    except ValidationError as e:
        raise InvalidConfig(f"Invalid phantom configuration: {e}") from e


def split_for(cfg: PhantomConfig, index: int) -> Split:
    n_train, n_val, _ = cfg.split_counts
    if index < n_train:
        return "train"
    if index < n_train + n_val:
        return "val"
    return "test"


def trus_grid(cfg: PhantomConfig) -> Volume:
    return Volume.zeros(cfg.trus_dims, cfg.trus_spacing, space_tag=SpaceTag.TRUS)


def mri_grid(cfg: PhantomConfig) -> Volume:
    """MRI grid covering the TRUS box, centered on the same point."""
    trus = trus_grid(cfg)
    dims = tuple(
        max(1, round(extent / s)) for extent, s in zip(trus.extent_mm, cfg.mri_spacing)
    )
    center = trus.center_mm
    origin = center - (np.asarray(dims, dtype=np.float64) - 1.0) / 2.0 * cfg.mri_spacing
    return Volume.zeros(
        dims,  # type: ignore[arg-type]
        cfg.mri_spacing,
        tuple(float(o) for o in origin),  # type: ignore[arg-type]
        SpaceTag.MRI,
    )


def hidden_transform(
    cfg: PhantomConfig, center: NDArray[np.float64], rng: np.random.Generator
) -> Affine3:
    """Rigid MRI -> TRUS transform rotating about `center`."""
    if cfg.identity_transform:
        return Affine3.identity()
    angles = rng.uniform(-cfg.max_rotation_deg, cfg.max_rotation_deg, size=3)
    shift = rng.uniform(-cfg.max_translation_mm, cfg.max_translation_mm, size=3)
    rot = Rotation.from_euler("xyz", angles, degrees=True).as_matrix()
    return Affine3.from_linear(rot, center + shift - rot @ center)


def _speckle(
    shape: tuple[int, ...], sigma: float, rng: np.random.Generator
) -> NDArray[np.float64]:
    field = gaussian_filter(rng.standard_normal(shape), sigma=sigma, mode="nearest")
    sd = field.std()
    return field / sd if sd > 0 else field


def generate_study(cfg: PhantomConfig, index: int) -> PhantomStudy:
    """Generate study `index` of the cohort described by `cfg`."""
    rng = np.random.default_rng([cfg.seed, index])
    trus = trus_grid(cfg)
    mri = mri_grid(cfg)
    center = trus.center_mm

    gland = sample_gland(cfg, center, rng)
    anatomy = Anatomy(gland, place_lesions(cfg, gland, rng))
    transform = hidden_transform(cfg, center, rng)

    points = trus.voxel_centers_world()
    gland_mask = anatomy.gland_mask(points)
    labels = np.where(gland_mask, anatomy.lesion_labels(points), 0)
    tissue = np.where(gland_mask, 1.0, cfg.trus_background)
    trus_visible = anatomy.visible_lesions(points, in_mri=False)
    tissue = np.where(trus_visible, tissue * (1.0 - cfg.trus_lesion_drop), tissue)
    speckle = _speckle(tissue.shape, cfg.speckle_sigma_vox, rng)
    trus_data = tissue * (1.0 + cfg.noise_sd * speckle)

    mri_points = transform.apply(mri.voxel_centers_world())
    mri_gland = anatomy.gland_mask(mri_points)
    mri_lesion = anatomy.visible_lesions(mri_points, in_mri=True)
    sequences: dict[str, Volume] = {}
    for name, level, contrast in zip(MRI_SEQUENCES, cfg.mri_gland, cfg.mri_lesion_contrast):
        base = np.where(mri_gland, level, cfg.mri_background) + np.where(mri_lesion, contrast, 0.0)
        noise = rng.standard_normal(base.shape) * cfg.noise_sd
        sequences[name] = mri.with_data(base + noise)

    study = MultimodalStudy(
        study_id=f"phantom_{index:03d}",
        t2w=sequences["t2w"],
        adc=sequences["adc"],
        dwi=sequences["dwi"],
        trus=trus.with_data(trus_data),
        gland_mask=trus.with_data(gland_mask),
        lesion_labels=trus.with_data(labels),
        lesion_gg={lesion.id: lesion.gg for lesion in anatomy.lesions},
        mri_to_trus=transform,
        split=split_for(cfg, index),
        cohort=cfg.cohort,
        synthesis_transform=transform,
    )
    logger.debug(
        f"{study.study_id}: {len(anatomy.lesions)} lesions "
        f"({', '.join(les.visibility.value for les in anatomy.lesions) or 'none'})"
    )
    return PhantomStudy(study, anatomy)


def generate_cohort(cfg: PhantomConfig, jobs: int = 1) -> list[PhantomStudy]:
    """
    Generate every study of the cohort in index order.

    Output does not depend on `jobs`.

    Raises:
        InvalidConfig
    """
    cfg = _validated(cfg)
    indices = range(cfg.study_count)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            studies = list(pool.map(lambda i: generate_study(cfg, i), indices))
    else:
        studies = [generate_study(cfg, i) for i in indices]
    n_lesions = sum(len(s.anatomy.lesions) for s in studies)
    logger.info(f"Generated {len(studies)} phantom studies with {n_lesions} lesions")
    return studies


def ground_truth_transform(study: MultimodalStudy) -> Affine3:
    """
    Exact MRI -> TRUS transform used to synthesize `study`.

    Raises:
        NotAPhantom: study carries no synthesis transform
    """
    if study.synthesis_transform is None:
        raise NotAPhantom(f"{study.study_id} is not a phantom study (no synthesis transform)")
    return study.synthesis_transform


def _lesion_table(anatomy: Anatomy) -> list[dict[str, object]]:
    return [
        {
            "id": lesion.id,
            "center_mm": [float(c) for c in lesion.center],
            "radii_mm": [float(r) for r in lesion.radii],
            "visibility": lesion.visibility.value,
            "gg": lesion.gg,
        }
        for lesion in anatomy.lesions
    ]


def write_cohort(cohort: Sequence[PhantomStudy], directory: Path | str) -> Path:
    """
    Write every study (NIfTI volumes, transforms, lesion table) plus the manifest.

    Returns:
        Path of the manifest JSON
    """
    out = Path(directory)
    entries = []
    for item in cohort:
        study_dir = out / item.study.study_id
        entries.append(save_study(item.study, study_dir))
        try:
            (study_dir / LESIONS_NAME).write_text(
                json.dumps(_lesion_table(item.anatomy), indent=2), encoding="utf-8"
            )
        except OSError as e:
            raise IoError(f"Cannot write lesion table for {item.study.study_id}: {e}") from e
    manifest = out / MANIFEST_NAME
    write_manifest(entries, manifest)
    logger.info(f"Wrote {len(entries)} studies to {out}")
    return manifest
