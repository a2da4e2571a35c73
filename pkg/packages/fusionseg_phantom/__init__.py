"""
Phantom package.

Deterministic synthetic MRI + TRUS studies in which each lesion is visible
in the MRI channels, the TRUS channel, or both, with a known MRI -> TRUS
transform for registration checks.
"""

from fusionseg_phantom.anatomy import (
    Anatomy,
    GlandShape,
    LesionSpec,
    Visibility,
    grade_from_radius,
    place_lesions,
    sample_gland,
)
from fusionseg_phantom.config import PhantomConfig
from fusionseg_phantom.generator import (
    MANIFEST_NAME,
    PhantomStudy,
    generate_cohort,
    generate_study,
    ground_truth_transform,
    hidden_transform,
    mri_grid,
    trus_grid,
    write_cohort,
)

__all__ = [
    "Anatomy",
    "GlandShape",
    "LesionSpec",
    "Visibility",
    "grade_from_radius",
    "place_lesions",
    "sample_gland",
    "PhantomConfig",
    "MANIFEST_NAME",
    "PhantomStudy",
    "generate_cohort",
    "generate_study",
    "ground_truth_transform",
    "hidden_transform",
    "mri_grid",
    "trus_grid",
    "write_cohort",
]
