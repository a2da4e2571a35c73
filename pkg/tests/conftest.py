"""Root conftest.py - Python path setup and shared study builders"""

import sys
from pathlib import Path

# Add packages to Python path
root_dir = Path(__file__).parent.parent
packages_dir = root_dir / "packages"

sys.path.insert(0, str(packages_dir))
sys.path.insert(0, str(packages_dir / "fusionseg_cli" / "src"))

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from fusionseg_volume import Affine3, MultimodalStudy, SpaceTag, Volume  # noqa: E402

TRUS_DIMS = (16, 16, 8)
MRI_DIMS = (16, 16, 4)


def gland_ellipsoid(shape: tuple[int, int, int]) -> np.ndarray:
    """Ellipsoid filling most of an (nz, ny, nx) box."""
    nz, ny, nx = shape
    z, y, x = np.meshgrid(np.arange(nz), np.arange(ny), np.arange(nx), indexing="ij")
    r = (
        ((x - (nx - 1) / 2) / (nx / 2 - 1)) ** 2
        + ((y - (ny - 1) / 2) / (ny / 2 - 1)) ** 2
        + ((z - (nz - 1) / 2) / (nz / 2)) ** 2
    )
    return (r <= 1.0).astype(np.float32)


def build_study(
    study_id: str = "case",
    lesion_gg: dict[int, int] | None = None,
    seed: int = 0,
    split: str = "train",
    cohort: str = "default",
) -> MultimodalStudy:
    """
    Small consistent study: 16x16x8 TRUS grid at 1 mm, MRI grid at 1x1x2 mm over
    the same box, identity MRI -> TRUS transform, one cube lesion (id 1).
    """
    rng = np.random.default_rng(seed)
    trus_grid = Volume.zeros(TRUS_DIMS, (1.0, 1.0, 1.0), space_tag=SpaceTag.TRUS)
    mri_grid = Volume.zeros(MRI_DIMS, (1.0, 1.0, 2.0), (0.0, 0.0, 0.5), SpaceTag.MRI)

    gland = gland_ellipsoid(trus_grid.data.shape)
    labels = np.zeros_like(gland)
    labels[3:6, 6:10, 4:7] = 1.0
    gg = {1: 3} if lesion_gg is None else lesion_gg
    if not gg:
        labels[:] = 0.0

    trus = gland * 1.0 + 0.3 - 0.4 * (labels > 0) + rng.normal(0.0, 0.05, gland.shape)
    mri_gland = gland_ellipsoid(mri_grid.data.shape)
    sequences = {
        name: mri_grid.with_data(mri_gland * level + rng.normal(0.0, 0.05, mri_gland.shape))
        for name, level in (("t2w", 1.0), ("adc", 0.8), ("dwi", 0.6))
    }
    return MultimodalStudy(
        study_id=study_id,
        t2w=sequences["t2w"],
        adc=sequences["adc"],
        dwi=sequences["dwi"],
        trus=trus_grid.with_data(trus),
        gland_mask=trus_grid.with_data(gland),
        lesion_labels=trus_grid.with_data(labels),
        lesion_gg=gg,
        mri_to_trus=Affine3.identity(),
        split=split,  # type: ignore[arg-type]
        cohort=cohort,
    )


@pytest.fixture
def make_study():
    """Factory for small consistent studies (see build_study)."""
    return build_study


@pytest.fixture
def study() -> MultimodalStudy:
    return build_study()
