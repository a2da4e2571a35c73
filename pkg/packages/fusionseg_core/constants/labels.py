"""Label and input-channel constants.

The three segmentation heads are nested: every CsPCa voxel is also an
any-cancer voxel, and every cancer voxel lies inside the gland.
"""

from enum import Enum
from typing import Final

# Head order is part of the checkpoint format and the loss history CSV.
HEAD_LABELS: Final[tuple[str, ...]] = ("gland", "any_cancer", "cspca")

ANY_CANCER_MIN_GG: Final[int] = 1
CSPCA_MIN_GG: Final[int] = 2
MAX_GG: Final[int] = 5


class Setup(str, Enum):
    """Model input setup"""
    TRUS_ONLY = "trus"
    MRI_ONLY = "mri"
    MULTIMODAL = "multimodal"


# Channel order per setup. Fixed; models trained with one order cannot be
# fed another.
SETUP_CHANNELS: Final[dict[Setup, tuple[str, ...]]] = {
    Setup.TRUS_ONLY: ("trus",),
    Setup.MRI_ONLY: ("t2w", "adc", "dwi"),
    Setup.MULTIMODAL: ("trus", "t2w", "adc", "dwi"),
}
