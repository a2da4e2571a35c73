"""Tests for gland-referenced z-score normalization and whole-study preprocessing."""

import os
import subprocess
import sys

import numpy as np
import pytest

from fusionseg_core.exceptions import DegenerateStd, EmptyGland, GridMismatch
from fusionseg_preprocess import (
    InterpKind,
    PreprocessConfig,
    gland_statistics,
    mri_gland_mask,
    preprocess_study,
    zscore_normalize,
)
from fusionseg_register import apply_transform
from fusionseg_volume import Affine3, Volume, invert


def _pair(values: np.ndarray, mask: np.ndarray) -> tuple[Volume, Volume]:
    return Volume(values, (1.0, 1.0, 1.0)), Volume(mask, (1.0, 1.0, 1.0))


class TestZScore:
    def test_gland_statistics(self):
        values = np.arange(8, dtype=np.float32).reshape(2, 2, 2)
        mask = np.zeros((2, 2, 2), dtype=np.float32)
        mask[0] = 1.0
        vol, gland = _pair(values, mask)
        mu, sigma = gland_statistics(vol, gland)
        assert mu == pytest.approx(1.5)
        assert sigma == pytest.approx(np.std([0, 1, 2, 3]))

    def test_normalizes_all_voxels_with_gland_stats(self):
        rng = np.random.default_rng(1)
        values = rng.normal(5.0, 2.0, size=(4, 6, 6))
        mask = np.zeros((4, 6, 6), dtype=np.float32)
        mask[1:3, 1:5, 1:5] = 1.0
        vol, gland = _pair(values, mask)
        out = zscore_normalize(vol, gland).data
        inside = out[mask > 0].astype(np.float64)
        assert inside.mean() == pytest.approx(0.0, abs=1e-4)
        assert inside.std() == pytest.approx(1.0, abs=1e-4)
        assert np.any(out[mask == 0] != values[mask == 0])

    def test_empty_gland(self):
        vol, gland = _pair(np.ones((2, 2, 2)), np.zeros((2, 2, 2)))
        with pytest.raises(EmptyGland):
            zscore_normalize(vol, gland)

    def test_constant_gland(self):
        vol, gland = _pair(np.full((2, 2, 2), 3.0), np.ones((2, 2, 2)))
        with pytest.raises(DegenerateStd):
            zscore_normalize(vol, gland)

    def test_grid_mismatch(self):
        vol = Volume(np.ones((2, 2, 2)), (1.0, 1.0, 1.0))
        gland = Volume(np.ones((2, 2, 2)), (2.0, 1.0, 1.0))
        with pytest.raises(GridMismatch):
            zscore_normalize(vol, gland)


class TestPreprocessStudy:
    @pytest.fixture
    def cfg(self):
        return PreprocessConfig(
            mri_spacing=(1.0, 1.0, 2.0),
            trus_spacing=(1.0, 1.0, 1.0),
            crop_extent_mm=(12.0, 12.0),
        )

    def test_geometry(self, study, cfg):
        out = preprocess_study(study, cfg)
        assert out.trus.dims == (12, 12, 8)
        assert out.gland_mask.dims == (12, 12, 8)
        assert out.lesion_labels.dims == (12, 12, 8)
        assert out.t2w.dims == (12, 12, 4)
        assert out.adc.dims == out.dwi.dims == out.t2w.dims

    def test_trus_normalized_inside_gland(self, study, cfg):
        out = preprocess_study(study, cfg)
        inside = out.trus.data[out.gland_mask.data > 0.5].astype(np.float64)
        assert inside.mean() == pytest.approx(0.0, abs=1e-4)
        assert inside.std() == pytest.approx(1.0, abs=1e-4)

    def test_masks_stay_binary(self, study, cfg):
        out = preprocess_study(study, cfg)
        assert set(np.unique(out.gland_mask.data)) <= {0.0, 1.0}
        assert set(np.unique(out.lesion_labels.data)) <= {0.0, 1.0}
        assert out.lesion_gg == study.lesion_gg

    def test_transform_carried(self, study, cfg):
        out = preprocess_study(study, cfg)
        np.testing.assert_array_equal(out.mri_to_trus.matrix, study.mri_to_trus.matrix)

    def test_gland_mask_matches_register_warp(self, study):
        to_trus = Affine3.translation((2.0, -1.0, 1.0))
        projected = mri_gland_mask(study.gland_mask, to_trus, study.t2w)
        warped = apply_transform(
            study.gland_mask, invert(to_trus), study.t2w, InterpKind.NEAREST
        )
        assert projected.dims == study.t2w.dims
        assert projected.space_tag is study.t2w.space_tag
        np.testing.assert_array_equal(projected.data, warped.data)
        assert set(np.unique(projected.data)) == {0.0, 1.0}

    def test_import_does_not_pull_register(self):
        code = "import sys, fusionseg_preprocess; print('fusionseg_register' in sys.modules)"
        result = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True,
            text=True,
            env={**os.environ, "PYTHONPATH": os.pathsep.join(sys.path)},
            check=True,
        )
        assert result.stdout.strip() == "False"

    def test_default_config(self):
        cfg = PreprocessConfig()
        assert cfg.trus_spacing == (0.5, 0.5, 0.5)
        assert cfg.crop_extent_mm == (128.0, 128.0)
