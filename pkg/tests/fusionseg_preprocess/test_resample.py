"""Tests for interpolation kernels, resampling and crop/pad."""

import numpy as np
import pytest

from fusionseg_core.exceptions import DegenerateAxis
from fusionseg_preprocess import (
    InterpKind,
    bspline_prefilter,
    center_crop_pad,
    output_dims,
    resample_volume,
    sample_at,
    sample_points,
)
from fusionseg_volume import Volume


@pytest.fixture
def ramp():
    """x-ramp 0..7 on an 8x4x3 grid"""
    data = np.broadcast_to(np.arange(8, dtype=np.float32), (3, 4, 8))
    return Volume(data, (1.0, 1.0, 1.0))


class TestKernels:
    """Nearest, Trilinear and cubic B-spline sampling"""

    def test_trilinear_midpoint(self, ramp):
        assert sample_at(ramp, (2.5, 1.0, 1.0), InterpKind.TRILINEAR) == pytest.approx(2.5)

    def test_nearest_rounds_half_away_from_zero(self, ramp):
        assert sample_at(ramp, (2.5, 1.0, 1.0), InterpKind.NEAREST) == 3.0
        assert sample_at(ramp, (2.49, 1.0, 1.0), InterpKind.NEAREST) == 2.0

    def test_out_of_bounds_clamps(self, ramp):
        assert sample_at(ramp, (-4.0, 1.0, 1.0), InterpKind.TRILINEAR) == 0.0
        assert sample_at(ramp, (20.0, 9.0, -3.0), InterpKind.NEAREST) == 7.0

    def test_bspline_interpolates_samples(self):
        rng = np.random.default_rng(3)
        vol = Volume(rng.normal(size=(5, 6, 7)), (1.0, 1.0, 1.0))
        coeffs = bspline_prefilter(vol)
        k, j, i = np.meshgrid(np.arange(1, 4), np.arange(1, 5), np.arange(1, 6), indexing="ij")
        idx = np.stack([i, j, k], axis=-1).astype(np.float64)
        values = sample_points(coeffs, idx, InterpKind.CUBIC_BSPLINE)
        np.testing.assert_allclose(values, vol.data[1:4, 1:5, 1:6], atol=1e-5)

    def test_bspline_constant_volume(self):
        vol = Volume(np.full((4, 4, 4), 2.5), (1.0, 1.0, 1.0))
        coeffs = bspline_prefilter(vol)
        assert sample_at(coeffs, (1.3, 2.7, 0.4), InterpKind.CUBIC_BSPLINE) == pytest.approx(2.5)

    def test_bspline_needs_two_voxels(self):
        vol = Volume(np.ones((1, 4, 4)), (1.0, 1.0, 1.0))
        with pytest.raises(DegenerateAxis):
            bspline_prefilter(vol)

    def test_point_array_shape_kept(self, ramp):
        idx = np.zeros((2, 5, 3))
        assert sample_points(ramp, idx, InterpKind.TRILINEAR).shape == (2, 5)


class TestResample:
    def test_output_dims_ceil(self):
        vol = Volume.zeros((300, 300, 20), (0.4, 0.4, 3.6))
        assert output_dims(vol, (0.5, 0.5, 3.0)) == (240, 240, 24)

    def test_output_dims_partial_voxel(self):
        vol = Volume.zeros((10, 10, 10), (1.0, 1.0, 1.0))
        assert output_dims(vol, (3.0, 3.0, 3.0)) == (4, 4, 4)

    def test_same_spacing_is_identity(self, ramp):
        out = resample_volume(ramp, (1.0, 1.0, 1.0), InterpKind.NEAREST)
        np.testing.assert_array_equal(out.data, ramp.data)
        assert out.origin == ramp.origin

    def test_upsample_trilinear(self, ramp):
        out = resample_volume(ramp, (0.5, 1.0, 1.0), InterpKind.TRILINEAR)
        assert out.dims == (16, 4, 3)
        np.testing.assert_allclose(out.data[0, 0, :3], [0.0, 0.5, 1.0], atol=1e-6)

    def test_labels_stay_discrete(self):
        data = np.zeros((4, 6, 6), dtype=np.float32)
        data[1:3, 2:4, 2:4] = 2.0
        out = resample_volume(Volume(data, (1.0, 1.0, 1.0)), (0.7, 0.7, 0.7), InterpKind.NEAREST)
        assert set(np.unique(out.data)) <= {0.0, 2.0}

    def test_non_positive_spacing(self, ramp):
        with pytest.raises(DegenerateAxis):
            resample_volume(ramp, (0.0, 1.0, 1.0), InterpKind.NEAREST)


class TestCenterCropPad:
    """x-y crop/pad keeps voxel physical positions"""

    def test_default_window_at_half_mm(self):
        vol = Volume.zeros((300, 200, 3), (0.5, 0.5, 0.5))
        out = center_crop_pad(vol, (128.0, 128.0))
        assert out.dims == (256, 256, 3)

    def test_crop_even(self):
        data = np.broadcast_to(np.arange(10, dtype=np.float32), (2, 10, 10))
        out = center_crop_pad(Volume(data, (1.0, 1.0, 1.0)), (6.0, 6.0))
        assert out.dims == (6, 6, 2)
        np.testing.assert_array_equal(out.data[0, 0], np.arange(2, 8))
        assert out.origin == (2.0, 2.0, 0.0)

    def test_crop_odd_drops_extra_on_high_side(self):
        data = np.broadcast_to(np.arange(10, dtype=np.float32), (1, 10, 10))
        out = center_crop_pad(Volume(data, (1.0, 1.0, 1.0)), (7.0, 10.0))
        np.testing.assert_array_equal(out.data[0, 0], np.arange(1, 8))

    def test_pad_odd_puts_extra_on_high_side(self):
        vol = Volume(np.ones((1, 4, 4)), (1.0, 1.0, 1.0))
        out = center_crop_pad(vol, (7.0, 4.0), pad_value=-1.0)
        np.testing.assert_array_equal(out.data[0, 0], [-1, 1, 1, 1, 1, -1, -1])
        assert out.origin == (-1.0, 0.0, 0.0)

    def test_physical_positions_preserved(self):
        rng = np.random.default_rng(0)
        vol = Volume(rng.normal(size=(2, 9, 9)), (0.5, 0.5, 2.0), (3.0, -1.0, 0.0))
        out = center_crop_pad(vol, (2.0, 2.0))
        # out voxel (0, 0) sits at the same mm position as its source voxel
        src_i = int(round((out.origin[0] - vol.origin[0]) / 0.5))
        src_j = int(round((out.origin[1] - vol.origin[1]) / 0.5))
        assert out.data[0, 0, 0] == vol.data[0, src_j, src_i]
        assert out.dims[2] == vol.dims[2]
