"""
Volume package.

Physical-space volumes, affine transforms, NIfTI-1 I/O and study manifests.

Design principle: runtime values (Volume, Affine3, MultimodalStudy) are
immutable dataclasses; file-facing schemas (StudyManifest) use Pydantic.
"""

from fusionseg_volume.affine import Affine3, compose, invert
from fusionseg_volume.manifest import StudyManifest, load_manifest, write_manifest
from fusionseg_volume.nifti import nifti_read, nifti_write
from fusionseg_volume.study import (
    MRI_SEQUENCES,
    MultimodalStudy,
    load_study,
    save_study,
    validate_study,
)
from fusionseg_volume.volume import (
    SpaceTag,
    Volume,
    require_same_grid,
    same_grid,
    voxel_to_world,
    world_to_voxel,
)

__all__ = [
    "Affine3",
    "compose",
    "invert",
    "StudyManifest",
    "load_manifest",
    "write_manifest",
    "nifti_read",
    "nifti_write",
    "MRI_SEQUENCES",
    "MultimodalStudy",
    "load_study",
    "save_study",
    "validate_study",
    "SpaceTag",
    "Volume",
    "require_same_grid",
    "same_grid",
    "voxel_to_world",
    "world_to_voxel",
]
