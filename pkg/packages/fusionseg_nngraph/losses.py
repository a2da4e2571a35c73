"""
Segmentation losses: binary cross-entropy, soft Dice and their combination.

The combined objective is the weighted mean over labels of
bce_weight * BCE + dice_weight * soft Dice; all weights default to 1.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from fusionseg_core.exceptions import ShapeMismatch
from fusionseg_nngraph.ops import add, mean_of, scale
from fusionseg_nngraph.tensor import Tensor5, record

PROB_EPS = 1e-7
DICE_SMOOTH = 1.0


def _targets(p: Tensor5, y: Tensor5 | ArrayLike) -> NDArray[np.floating]:
    target = y.data if isinstance(y, Tensor5) else np.asarray(y)
    if target.shape != p.shape:
        raise ShapeMismatch(f"Target shape {target.shape} does not match prediction {p.shape}")
    return target.astype(p.dtype, copy=False)


def bce_loss(p: Tensor5, y: Tensor5 | ArrayLike) -> Tensor5:
    """Mean binary cross-entropy with p clamped to [1e-7, 1 - 1e-7]."""
    target = _targets(p, y)
    pc = np.clip(p.data, PROB_EPS, 1.0 - PROB_EPS)
    n = p.data.size
    loss = -np.mean(target * np.log(pc) + (1.0 - target) * np.log(1.0 - pc))
    inside = (p.data > PROB_EPS) & (p.data < 1.0 - PROB_EPS)

    def vjp(g: NDArray[np.floating]) -> list[NDArray[np.floating] | None]:
        local = (-(target / pc) + (1.0 - target) / (1.0 - pc)) / n
        return [g * local * inside]

    return record("bce_loss", (p,), Tensor5(np.asarray(loss, dtype=p.dtype)), vjp)


def soft_dice_loss(p: Tensor5, y: Tensor5 | ArrayLike, smooth: float = DICE_SMOOTH) -> Tensor5:
    """1 - (2 sum(p y) + smooth) / (sum(p) + sum(y) + smooth)."""
    target = _targets(p, y)
    inter = float(np.sum(p.data * target, dtype=np.float64))
    denom = float(np.sum(p.data, dtype=np.float64) + np.sum(target, dtype=np.float64)) + smooth
    numer = 2.0 * inter + smooth
    loss = 1.0 - numer / denom

    def vjp(g: NDArray[np.floating]) -> list[NDArray[np.floating] | None]:
        local = -(2.0 * target * denom - numer) / denom**2
        return [(g * local).astype(p.dtype, copy=False)]

    return record("soft_dice_loss", (p,), Tensor5(np.asarray(loss, dtype=p.dtype)), vjp)


def loss_terms(
    heads: Sequence[Tensor5], targets: Sequence[Tensor5 | ArrayLike]
) -> list[tuple[Tensor5, Tensor5]]:
    """(bce, dice) per label."""
    if len(heads) != len(targets) or not heads:
        raise ShapeMismatch(f"{len(heads)} heads vs {len(targets)} targets")
    return [(bce_loss(p, y), soft_dice_loss(p, y)) for p, y in zip(heads, targets)]


def combine_terms(
    terms: Sequence[tuple[Tensor5, Tensor5]],
    label_weights: Sequence[float] | None = None,
    bce_weight: float = 1.0,
    dice_weight: float = 1.0,
) -> Tensor5:
    weights = list(label_weights) if label_weights is not None else [1.0] * len(terms)
    if len(weights) != len(terms):
        raise ShapeMismatch(f"{len(weights)} label weights for {len(terms)} labels")
    total_weight = float(sum(weights))
    per_label = []
    for (bce, dice), w in zip(terms, weights):
        term = add(scale(bce, bce_weight), scale(dice, dice_weight))
        per_label.append(scale(term, w * len(terms) / total_weight))
    return mean_of(per_label)


def combined_loss(
    heads: Sequence[Tensor5],
    targets: Sequence[Tensor5 | ArrayLike],
    label_weights: Sequence[float] | None = None,
    bce_weight: float = 1.0,
    dice_weight: float = 1.0,
) -> Tensor5:
    """
    Mean over labels of (BCE + soft Dice).

    Args:
        heads: one probability tensor per label
        targets: matching binary targets
        label_weights: optional per-label weights (normalized to sum to the label count)

    Raises:
        ShapeMismatch: head/target count or shapes differ
    """
    return combine_terms(loss_terms(heads, targets), label_weights, bce_weight, dice_weight)


def term_values(
    labels: Sequence[str], terms: Sequence[tuple[Tensor5, Tensor5]]
) -> Mapping[str, float]:
    """Flat {"bce_<label>": v, "dice_<label>": v} for logging."""
    values: dict[str, float] = {}
    for label, (bce, dice) in zip(labels, terms):
        values[f"bce_{label}"] = bce.item()
        values[f"dice_{label}"] = dice.item()
    return values
