"""Tests for multi-resolution affine registration."""

import numpy as np
import pytest

from fusionseg_core.exceptions import DegenerateVariance, NoOverlap
from fusionseg_phantom import PhantomConfig, generate_study, ground_truth_transform
from fusionseg_register import (
    RegistrationConfig,
    affine_to_params,
    corner_error_mm,
    overlap_fraction,
    params_to_affine,
    register,
)
from fusionseg_volume import Affine3, Volume

BLOBS = (
    ((8.0, 9.0, 6.0), 3.0, 1.0),
    ((15.0, 12.0, 8.0), 2.5, 0.7),
    ((11.0, 16.0, 10.0), 2.0, 1.3),
)


def blob_field(points: np.ndarray) -> np.ndarray:
    """Sum of isotropic Gaussians evaluated at (..., 3) points in mm."""
    out = np.zeros(points.shape[:-1])
    for center, sigma, amplitude in BLOBS:
        d2 = np.sum((points - np.asarray(center)) ** 2, axis=-1)
        out += amplitude * np.exp(-d2 / (2.0 * sigma**2))
    return out


@pytest.fixture
def fixed() -> Volume:
    grid = Volume.zeros((24, 24, 16), (1.0, 1.0, 1.0))
    return grid.with_data(blob_field(grid.voxel_centers_world()))


def warped_moving(fixed: Volume, truth: Affine3) -> Volume:
    """Moving image whose content maps onto `fixed` through `truth`."""
    return fixed.with_data(blob_field(truth.apply(fixed.voxel_centers_world())))


@pytest.fixture
def cfg() -> RegistrationConfig:
    return RegistrationConfig(max_iters=100)


class TestRegister:
    def test_self_registration_is_identity(self, fixed, cfg):
        result = register(fixed, fixed, cfg)
        params = affine_to_params(result.transform, fixed.center_mm)
        assert np.all(np.abs(params[:3]) < 0.1)
        assert np.all(np.abs(np.degrees(params[3:6])) < 0.2)

    def test_recovers_translation(self, fixed, cfg):
        truth = Affine3.translation((3.0, -2.0, 1.0))
        result = register(warped_moving(fixed, truth), fixed, cfg)
        params = affine_to_params(result.transform, fixed.center_mm)
        np.testing.assert_allclose(params[:3], [3.0, -2.0, 1.0], atol=0.5)

    def test_recovers_rotation_about_z(self, fixed, cfg):
        center = fixed.center_mm
        params = np.zeros(12)
        params[5] = np.radians(5.0)
        truth = params_to_affine(params, center)
        result = register(warped_moving(fixed, truth), fixed, cfg)
        recovered = affine_to_params(result.transform, center)
        assert np.degrees(recovered[5]) == pytest.approx(5.0, abs=0.5)

    def test_metric_never_decreases(self, fixed, cfg):
        truth = Affine3.translation((1.5, 1.0, -1.0))
        result = register(warped_moving(fixed, truth), fixed, cfg)
        for level in result.history:
            assert all(b > a for a, b in zip(level, level[1:]))
        assert result.iterations > 0

    def test_no_overlap(self, fixed, cfg):
        far = Affine3.translation((500.0, 0.0, 0.0))
        assert overlap_fraction(fixed, fixed, far) == 0.0
        with pytest.raises(NoOverlap):
            register(fixed, fixed, cfg, initial=far)

    def test_constant_image(self, fixed, cfg):
        with pytest.raises(DegenerateVariance):
            register(fixed.with_data(np.ones(fixed.data.shape)), fixed, cfg)


@pytest.mark.slow
class TestPhantomRecovery:
    """Registration recovers hidden phantom transforms"""

    def test_twenty_studies(self):
        cfg = PhantomConfig(
            trus_dims=(48, 48, 32),
            trus_spacing=(1.0, 1.0, 1.0),
            mri_spacing=(1.0, 1.0, 2.0),
            max_rotation_deg=10.0,
            max_translation_mm=5.0,
        )
        reg = RegistrationConfig()
        successes = 0
        for index in range(20):
            study = generate_study(cfg, index).study
            result = register(study.t2w, study.trus, reg)
            truth = ground_truth_transform(study)
            if corner_error_mm(result.transform, truth, study.t2w) < 1.0:
                successes += 1
        assert successes >= 18
