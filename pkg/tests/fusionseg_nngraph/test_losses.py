"""Tests for segmentation losses and Adam."""

import numpy as np
import pytest

from fusionseg_core.exceptions import ShapeMismatch
from fusionseg_nngraph import (
    AdamState,
    Tape,
    Tensor5,
    adam_step,
    bce_loss,
    combined_loss,
    gradcheck,
    loss_terms,
    soft_dice_loss,
    term_values,
)

SHAPE = (1, 1, 2, 3, 3)


@pytest.fixture
def probs():
    return np.random.default_rng(0).uniform(0.1, 0.9, size=SHAPE)


@pytest.fixture
def target():
    return (np.random.default_rng(1).uniform(size=SHAPE) > 0.5).astype(np.float64)


class TestLossValues:
    def test_bce_half(self):
        p = Tensor5(np.full(SHAPE, 0.5))
        assert bce_loss(p, np.ones(SHAPE)).item() == pytest.approx(np.log(2.0))

    def test_bce_clamps_extremes(self):
        p = Tensor5(np.zeros(SHAPE))
        value = bce_loss(p, np.ones(SHAPE)).item()
        assert np.isfinite(value)
        assert value == pytest.approx(-np.log(1e-7), rel=1e-3)

    def test_dice_perfect(self):
        ones = np.ones(SHAPE)
        assert soft_dice_loss(Tensor5(ones), ones).item() == pytest.approx(0.0)

    def test_dice_both_empty_is_zero(self):
        zeros = np.zeros(SHAPE)
        assert soft_dice_loss(Tensor5(zeros), zeros).item() == pytest.approx(0.0)

    def test_dice_disjoint(self):
        p = np.zeros(SHAPE)
        p.flat[0] = 1.0
        y = np.zeros(SHAPE)
        y.flat[1] = 1.0
        assert soft_dice_loss(Tensor5(p), y).item() == pytest.approx(1.0 - 1.0 / 3.0)

    def test_combined_is_label_mean(self, probs, target):
        heads = [Tensor5(probs), Tensor5(1.0 - probs)]
        targets = [target, 1.0 - target]
        terms = loss_terms(heads, targets)
        expected = np.mean([bce.item() + dice.item() for bce, dice in terms])
        assert combined_loss(heads, targets).item() == pytest.approx(expected, rel=1e-6)

    def test_label_weights_normalized(self, probs, target):
        heads = [Tensor5(probs), Tensor5(probs)]
        plain = combined_loss(heads, [target, target]).item()
        weighted = combined_loss(heads, [target, target], label_weights=[3.0, 3.0]).item()
        assert weighted == pytest.approx(plain, rel=1e-6)

    def test_term_values_keys(self, probs, target):
        terms = loss_terms([Tensor5(probs)], [target])
        assert set(term_values(["gland"], terms)) == {"bce_gland", "dice_gland"}

    def test_target_shape_checked(self, probs):
        with pytest.raises(ShapeMismatch):
            bce_loss(Tensor5(probs), np.ones((1, 1, 2, 2, 2)))

    def test_head_count_checked(self, probs, target):
        with pytest.raises(ShapeMismatch):
            combined_loss([Tensor5(probs)], [target, target])


class TestLossGradients:
    def test_bce(self, probs, target):
        assert gradcheck(lambda p: bce_loss(p, target), inputs=[probs]).passed

    def test_dice(self, probs, target):
        assert gradcheck(lambda p: soft_dice_loss(p, target), inputs=[probs]).passed

    def test_combined(self, probs, target):
        report = gradcheck(
            lambda a, b: combined_loss([a, b], [target, 1.0 - target], label_weights=[1.0, 2.0]),
            inputs=[probs, probs[::-1].copy()],
        )
        assert report.passed


class TestAdam:
    def test_first_step_moves_by_lr(self):
        w = Tensor5(np.array([1.0, -1.0, 2.0]))
        state = AdamState(lr=0.01)
        adam_step({"w": w}, {"w": np.array([2.0, -0.5, 1e-3])}, state)
        np.testing.assert_allclose(w.data, [0.99, -0.99, 1.99], atol=1e-4)
        assert state.t == 1

    def test_missing_gradient_is_zero(self):
        w = Tensor5(np.ones(2))
        adam_step({"w": w}, {}, AdamState())
        np.testing.assert_array_equal(w.data, np.ones(2))

    def test_gradient_shape_checked(self):
        with pytest.raises(ShapeMismatch):
            adam_step({"w": Tensor5(np.ones(2))}, {"w": np.ones(3)}, AdamState())

    def test_descends_dice_loss(self):
        w = Tensor5(np.array([3.0]), requires_grad=True)
        state = AdamState(lr=0.1)
        for _ in range(300):
            w.grad = None
            with Tape() as tape:
                loss = soft_dice_loss(w, np.ones(1))
                tape.backward(loss)
            adam_step({"w": w}, {"w": w.grad}, state)
        assert soft_dice_loss(w, np.ones(1)).item() < soft_dice_loss(
            Tensor5(np.array([3.0])), np.ones(1)
        ).item()
