"""Tests for Affine3 transforms."""

import numpy as np
import pytest

from fusionseg_core.exceptions import MissingFile, SchemaError, SingularTransform
from fusionseg_volume import Affine3, compose, invert


def _random_affine(seed: int) -> Affine3:
    rng = np.random.default_rng(seed)
    linear = np.eye(3) + 0.1 * rng.normal(size=(3, 3))
    return Affine3.from_linear(linear, rng.normal(size=3) * 5.0)


class TestAffineAlgebra:
    def test_identity_apply(self):
        pts = np.array([[1.0, 2.0, 3.0], [-4.0, 0.5, 9.0]])
        np.testing.assert_array_equal(Affine3.identity().apply(pts), pts)

    def test_compose_applies_right_first(self):
        """compose(a, b) applies b, then a."""
        a = Affine3.translation((1.0, 0.0, 0.0))
        b = Affine3.from_linear(np.diag([2.0, 2.0, 2.0]))
        np.testing.assert_allclose(compose(a, b).apply([1.0, 1.0, 1.0]), [3.0, 2.0, 2.0])
        np.testing.assert_allclose(compose(b, a).apply([1.0, 1.0, 1.0]), [4.0, 2.0, 2.0])

    def test_invert_roundtrip(self):
        t = _random_affine(1)
        assert compose(t, invert(t)).allclose(Affine3.identity(), atol=1e-12)
        assert compose(invert(t), t).allclose(Affine3.identity(), atol=1e-12)

    def test_invert_singular(self):
        with pytest.raises(SingularTransform):
            invert(Affine3.from_linear(np.diag([1.0, 0.0, 1.0])))

    def test_det(self):
        assert Affine3.from_linear(np.diag([2.0, 3.0, 0.5])).det == pytest.approx(3.0)

    def test_matrix_is_read_only(self):
        t = Affine3.identity()
        with pytest.raises(ValueError):
            t.matrix[0, 0] = 2.0


class TestAffineSerialization:
    def test_json_roundtrip_is_bitwise(self):
        t = _random_affine(2)
        back = Affine3.from_json(t.to_json())
        assert np.array_equal(back.matrix, t.matrix)

    def test_wrong_length(self):
        with pytest.raises(SchemaError):
            Affine3.from_list([1.0] * 9)

    def test_invalid_json(self):
        with pytest.raises(SchemaError):
            Affine3.from_json("{not json")

    def test_not_an_array(self):
        with pytest.raises(SchemaError):
            Affine3.from_json('{"matrix": 1}')

    def test_save_load(self, tmp_path):
        t = _random_affine(3)
        path = tmp_path / "t.json"
        t.save(path)
        assert np.array_equal(Affine3.load(path).matrix, t.matrix)

    def test_load_missing(self, tmp_path):
        with pytest.raises(MissingFile):
            Affine3.load(tmp_path / "none.json")
