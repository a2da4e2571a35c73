"""Tests for similarity metrics, the parameter convention and transform application."""

import numpy as np
import pytest

from fusionseg_core.exceptions import DegenerateVariance, GridMismatch, SingularTransform
from fusionseg_preprocess import InterpKind
from fusionseg_register import (
    affine_to_params,
    apply_transform,
    corner_error_mm,
    mse,
    ncc,
    params_to_affine,
    rotation_matrix,
)
from fusionseg_volume import Affine3, Volume


def _line(values) -> Volume:
    return Volume(np.asarray(values, dtype=np.float32).reshape(1, 1, -1), (1.0, 1.0, 1.0))


class TestMetrics:
    def test_ncc_hand_example(self):
        assert ncc(_line([1, 2, 3, 4]), _line([1, 2, 4, 3])) == pytest.approx(0.8)

    def test_ncc_affine_invariant(self):
        a = _line([0.5, 2.0, 1.0, 3.0, 7.0])
        b = _line(2.0 * a.data.ravel() + 5.0)
        assert ncc(a, b) == pytest.approx(1.0)
        assert ncc(a, _line(-a.data.ravel())) == pytest.approx(-1.0)

    def test_ncc_mask(self):
        a = _line([1, 2, 3, 100])
        b = _line([1, 2, 3, -100])
        mask = _line([1, 1, 1, 0])
        assert ncc(a, b, mask) == pytest.approx(1.0)

    def test_ncc_constant_input(self):
        with pytest.raises(DegenerateVariance):
            ncc(_line([2, 2, 2]), _line([1, 2, 3]))

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatch):
            ncc(_line([1, 2, 3]), _line([1, 2, 3, 4]))

    def test_mse(self):
        assert mse(_line([1, 2, 3]), _line([1, 2, 5])) == pytest.approx(4.0 / 3.0)


class TestParams:
    """Twelve-parameter affine convention"""

    def test_zero_params_is_identity(self):
        t = params_to_affine(np.zeros(12), (10.0, -3.0, 4.0))
        assert t.allclose(Affine3.identity())

    def test_decomposition_inverts_composition(self):
        rng = np.random.default_rng(5)
        center = np.array([12.0, 8.0, 5.0])
        for _ in range(20):
            params = np.concatenate([
                rng.uniform(-5, 5, 3),
                rng.uniform(-0.3, 0.3, 3),
                rng.uniform(-0.1, 0.1, 3),
                rng.uniform(-0.1, 0.1, 3),
            ])
            recovered = affine_to_params(params_to_affine(params, center), center)
            np.testing.assert_allclose(recovered, params, atol=1e-9)

    def test_rotation_matrix_z(self):
        r = rotation_matrix(0.0, 0.0, np.pi / 2)
        np.testing.assert_allclose(r @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-12)

    def test_rotation_matrix_x_and_y(self):
        np.testing.assert_allclose(
            rotation_matrix(np.pi / 2, 0.0, 0.0) @ [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], atol=1e-12
        )
        np.testing.assert_allclose(
            rotation_matrix(0.0, np.pi / 2, 0.0) @ [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], atol=1e-12
        )

    def test_rotation_matrix_composes_z_y_x(self):
        rx, ry, rz = 0.3, -0.2, 0.5
        composed = (
            rotation_matrix(0.0, 0.0, rz)
            @ rotation_matrix(0.0, ry, 0.0)
            @ rotation_matrix(rx, 0.0, 0.0)
        )
        np.testing.assert_allclose(rotation_matrix(rx, ry, rz), composed, atol=1e-12)

    def test_center_is_fixed_point_without_translation(self):
        center = np.array([4.0, 5.0, 6.0])
        params = np.zeros(12)
        params[3:6] = [0.1, -0.2, 0.3]
        t = params_to_affine(params, center)
        np.testing.assert_allclose(t.apply(center), center, atol=1e-12)

    def test_reflection_rejected(self):
        with pytest.raises(SingularTransform):
            affine_to_params(Affine3.from_linear(np.diag([-1.0, 1.0, 1.0])), np.zeros(3))


class TestApplyTransform:
    def test_integer_translation_nearest(self):
        rng = np.random.default_rng(2)
        moving = Volume(rng.integers(0, 3, size=(3, 4, 8)), (1.0, 1.0, 1.0))
        shift = Affine3.translation((2.0, 0.0, 0.0))
        out = apply_transform(moving, shift, moving, InterpKind.NEAREST)
        np.testing.assert_array_equal(out.data[:, :, 2:], moving.data[:, :, :-2])

    def test_identity_keeps_cubic_samples(self):
        rng = np.random.default_rng(4)
        moving = Volume(rng.normal(size=(4, 5, 6)), (1.0, 1.0, 2.0))
        out = apply_transform(moving, Affine3.identity(), moving, InterpKind.CUBIC_BSPLINE)
        inner = (slice(1, -1),) * 3
        np.testing.assert_allclose(out.data[inner], moving.data[inner], atol=1e-4)

    def test_output_takes_reference_grid(self):
        moving = Volume(np.ones((2, 3, 4)), (1.0, 1.0, 1.0))
        ref = Volume.zeros((5, 5, 5), (0.5, 0.5, 0.5), (1.0, 1.0, 1.0))
        out = apply_transform(moving, Affine3.identity(), ref, InterpKind.TRILINEAR)
        assert out.dims == ref.dims
        assert out.origin == ref.origin
        np.testing.assert_allclose(out.data, 1.0)

    def test_singular_transform(self):
        moving = Volume(np.ones((2, 2, 2)), (1.0, 1.0, 1.0))
        flat = Affine3.from_linear(np.diag([1.0, 1.0, 0.0]))
        with pytest.raises(SingularTransform):
            apply_transform(moving, flat, moving, InterpKind.NEAREST)


class TestCornerError:
    def test_pure_translation(self):
        grid = Volume.zeros((4, 4, 4), (1.0, 1.0, 1.0))
        error = corner_error_mm(Affine3.translation((3.0, 4.0, 0.0)), Affine3.identity(), grid)
        assert error == pytest.approx(5.0)

    def test_same_transform(self):
        grid = Volume.zeros((4, 4, 4), (1.0, 1.0, 1.0))
        t = params_to_affine([1, 2, 3, 0.1, 0.0, 0.2, 0, 0, 0, 0, 0, 0], (2.0, 2.0, 2.0))
        assert corner_error_mm(t, t, grid) == pytest.approx(0.0)
