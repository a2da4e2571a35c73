"""Constants shared across fusionseg packages."""

from fusionseg_core.constants.labels import (
    ANY_CANCER_MIN_GG,
    CSPCA_MIN_GG,
    HEAD_LABELS,
    MAX_GG,
    SETUP_CHANNELS,
    Setup,
)
from fusionseg_core.constants.geometry import (
    CROP_EXTENT_MM,
    MRI_SPACING_MM,
    TRUS_SPACING_MM,
)

__all__ = [
    "ANY_CANCER_MIN_GG",
    "CSPCA_MIN_GG",
    "HEAD_LABELS",
    "MAX_GG",
    "SETUP_CHANNELS",
    "Setup",
    "CROP_EXTENT_MM",
    "MRI_SPACING_MM",
    "TRUS_SPACING_MM",
]
