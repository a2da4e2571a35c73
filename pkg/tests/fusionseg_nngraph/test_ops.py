"""Gradient checks and value oracles for differentiable operations."""

import numpy as np
import pytest

from fusionseg_core.exceptions import ShapeMismatch
from fusionseg_nngraph import (
    Tape,
    Tensor5,
    add,
    concat_channels,
    conv3d,
    conv3d_transpose,
    gradcheck,
    instance_norm,
    leaky_relu,
    mean_of,
    scale,
    slice_channels,
    softmax_channels,
)


def away_from_zero(shape, seed=0):
    """Normal samples with |x| >= 0.1 so kinks stay outside the difference stencil."""
    x = np.random.default_rng(seed).standard_normal(shape)
    return np.where(np.abs(x) < 0.1, np.sign(x + 1e-12) * 0.1 + x, x)


class TestGradcheck:
    """Analytic gradients agree with central differences"""

    @pytest.mark.parametrize(
        ("shapes", "seed"),
        [
            ([(1, 2, 4, 4, 3), (3, 2, 3, 3, 3), (3,)], 0),
            ([(2, 1, 3, 3, 3), (2, 1, 3, 3, 3), (2,)], 1),
            ([(1, 3, 2, 3, 4), (1, 3, 3, 3, 3), (1,)], 2),
        ],
    )
    def test_conv3d_padded(self, shapes, seed):
        report = gradcheck(
            lambda x, w, b: conv3d(x, w, b, stride=1, pad=1), shapes=shapes, seed=seed
        )
        assert report.passed, report.failures[:3]

    @pytest.mark.parametrize(
        ("shapes", "seed"),
        [
            ([(2, 1, 5, 4, 4), (2, 1, 2, 2, 2)], 0),
            ([(1, 2, 4, 4, 4), (3, 2, 2, 2, 2)], 1),
            ([(1, 1, 6, 2, 4), (1, 1, 2, 2, 2)], 2),
        ],
    )
    def test_conv3d_strided(self, shapes, seed):
        report = gradcheck(
            lambda x, w: conv3d(x, w, None, stride=2, pad=0), shapes=shapes, seed=seed
        )
        assert report.passed, report.failures[:3]

    @pytest.mark.parametrize(
        ("shapes", "seed"),
        [
            ([(1, 2, 2, 3, 2), (2, 3, 2, 2, 2), (3,)], 0),
            ([(2, 1, 2, 2, 2), (1, 2, 2, 2, 2), (2,)], 1),
            ([(1, 3, 1, 2, 3), (3, 1, 2, 2, 2), (1,)], 2),
        ],
    )
    def test_conv3d_transpose(self, shapes, seed):
        report = gradcheck(
            lambda x, w, b: conv3d_transpose(x, w, b, stride=2), shapes=shapes, seed=seed
        )
        assert report.passed, report.failures[:3]

    def test_pointwise_conv_is_exact(self):
        # linear in every input, so any step gives the exact difference
        report = gradcheck(
            lambda x, w, b: conv3d(x, w, b, stride=1, pad=0),
            shapes=[(1, 2, 3, 3, 3), (3, 2, 1, 1, 1), (3,)],
            step=0.5,
        )
        assert report.max_rel_error < 1e-8

    @pytest.mark.parametrize(
        ("shapes", "seed"),
        [
            ([(2, 2, 3, 3, 2), (2,), (2,)], 0),
            ([(1, 3, 2, 2, 2), (3,), (3,)], 1),
            ([(1, 1, 4, 3, 2), (1,), (1,)], 2),
        ],
    )
    def test_instance_norm(self, shapes, seed):
        report = gradcheck(instance_norm, shapes=shapes, seed=seed)
        assert report.passed, report.failures[:3]

    @pytest.mark.parametrize(
        ("shape", "seed"), [((1, 2, 3, 3, 3), 0), ((2, 1, 2, 2, 2), 1), ((1, 3, 1, 4, 2), 2)]
    )
    def test_leaky_relu(self, shape, seed):
        report = gradcheck(leaky_relu, inputs=[away_from_zero(shape, seed)], seed=seed)
        assert report.passed, report.failures[:3]

    @pytest.mark.parametrize(
        ("shape", "seed"), [((1, 3, 2, 2, 2), 0), ((2, 2, 2, 1, 3), 1), ((1, 4, 1, 2, 2), 2)]
    )
    def test_softmax_channels(self, shape, seed):
        report = gradcheck(softmax_channels, shapes=[shape], seed=seed)
        assert report.passed, report.failures[:3]

    @pytest.mark.parametrize(("spatial", "seed"), [((2, 2, 2), 0), ((1, 3, 2), 1), ((3, 1, 1), 2)])
    def test_structural_ops(self, spatial, seed):
        report = gradcheck(
            lambda a, b: slice_channels(concat_channels(a, b), 1, 4),
            shapes=[(1, 2, *spatial), (1, 3, *spatial)],
            seed=seed,
        )
        assert report.passed, report.failures[:3]

    @pytest.mark.parametrize(
        ("shape", "seed"), [((1, 1, 2, 2, 2), 0), ((2, 1, 1, 2, 3), 1), ((1, 2, 3, 1, 1), 2)]
    )
    def test_arithmetic(self, shape, seed):
        report = gradcheck(
            lambda a, b: mean_of([add(a, b), scale(a, 3.0)]), shapes=[shape, shape], seed=seed
        )
        assert report.passed, report.failures[:3]

    def test_small_gradients_are_relative(self):
        # gradients near 1e-4 must not pass on an absolute 1e-4 error
        def shrunk(x):
            out = scale(x, 1e-4)
            if out.node is not None:
                out.node.vjp = lambda g: [2e-4 * g]
            return out

        report = gradcheck(shrunk, shapes=[(1, 1, 1, 2, 2)])
        assert not report.passed
        assert report.max_rel_error > 0.1

    def test_detects_wrong_gradient(self):
        def broken(x):
            out = leaky_relu(x)
            if out.node is not None:
                out.node.vjp = lambda g: [2.0 * g]
            return out

        report = gradcheck(broken, inputs=[np.full((1, 1, 1, 1, 2), 0.5)])
        assert not report.passed
        assert report.max_rel_error > 0.1


class TestConvValues:
    def test_all_ones_kernel(self):
        x = Tensor5(np.ones((1, 1, 3, 3, 3)))
        w = Tensor5(np.ones((1, 1, 3, 3, 3)))
        out = conv3d(x, w, None, stride=1, pad=1).data
        assert out.shape == (1, 1, 3, 3, 3)
        assert out[0, 0, 1, 1, 1] == 27.0
        assert out[0, 0, 0, 0, 0] == 8.0

    def test_strided_output_shape(self):
        x = Tensor5(np.zeros((1, 2, 8, 8, 4)))
        out = conv3d(x, Tensor5(np.zeros((4, 2, 2, 2, 2))), stride=2)
        assert out.shape == (1, 4, 4, 4, 2)

    def test_transpose_output_shape(self):
        x = Tensor5(np.ones((1, 4, 4, 4, 2)))
        w = Tensor5(np.ones((4, 2, 2, 2, 2)))
        assert conv3d_transpose(x, w, stride=2).shape == (1, 2, 8, 8, 4)

    def test_channel_mismatch(self):
        with pytest.raises(ShapeMismatch):
            conv3d(Tensor5(np.zeros((1, 2, 4, 4, 4))), Tensor5(np.zeros((1, 3, 3, 3, 3))))

    def test_empty_output(self):
        with pytest.raises(ShapeMismatch):
            conv3d(Tensor5(np.zeros((1, 1, 2, 2, 2))), Tensor5(np.zeros((1, 1, 3, 3, 3))))


class TestActivations:
    def test_softmax_sums_to_one(self):
        x = Tensor5(np.random.default_rng(1).normal(size=(2, 3, 2, 2, 2)) * 50.0)
        s = softmax_channels(x).data
        np.testing.assert_allclose(s.sum(axis=1), 1.0, rtol=1e-5)
        assert np.all(np.isfinite(s))

    def test_softmax_needs_two_channels(self):
        with pytest.raises(ShapeMismatch):
            softmax_channels(Tensor5(np.zeros((1, 1, 2, 2, 2))))

    def test_instance_norm_standardizes(self):
        x = Tensor5(np.random.default_rng(2).normal(3.0, 2.0, size=(1, 2, 4, 4, 4)))
        out = instance_norm(x, Tensor5(np.ones(2)), Tensor5(np.zeros(2))).data
        np.testing.assert_allclose(out.mean(axis=(2, 3, 4)), 0.0, atol=1e-5)
        np.testing.assert_allclose(out.std(axis=(2, 3, 4)), 1.0, atol=1e-3)

    def test_leaky_relu_slope(self):
        out = leaky_relu(Tensor5(np.array([-2.0, 0.0, 3.0]))).data
        np.testing.assert_allclose(out, [-0.02, 0.0, 3.0])


class TestTape:
    def test_no_tape_records_nothing(self):
        w = Tensor5(np.ones((1, 1, 1, 1, 1)), requires_grad=True)
        out = scale(w, 2.0)
        assert out.is_leaf

    def test_shared_input_accumulates(self):
        a = Tensor5(np.ones((1, 1, 1, 1, 2)), requires_grad=True)
        with Tape() as tape:
            out = mean_of([add(a, a)])
            tape.backward(out)
        np.testing.assert_allclose(a.grad, 2.0)

    def test_gradients_accumulate_across_passes(self):
        a = Tensor5(np.ones((1, 1, 1, 1, 1)), requires_grad=True)
        for _ in range(2):
            with Tape() as tape:
                tape.backward(scale(a, 3.0))
        np.testing.assert_allclose(a.grad, 6.0)

    def test_seed_shape_checked(self):
        a = Tensor5(np.ones((1, 1, 1, 1, 2)), requires_grad=True)
        with Tape() as tape:
            out = scale(a, 1.0)
            with pytest.raises(ShapeMismatch):
                tape.backward(out, seed=np.ones(3))
