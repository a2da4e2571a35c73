"""Greedy one-to-one lesion matching by pairwise Dice."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from fusionseg_lesioneval.lesions import LesionSet
from fusionseg_volume import require_same_grid


@dataclass(frozen=True)
class MatchResult:
    """
    Attributes:
        pairs: (gt id, pred id, pairwise Dice), best pair first
        fn_ids: ground-truth lesions left unmatched
        fp_ids: predicted lesions left unmatched
    """

    pairs: list[tuple[int, int, float]] = field(default_factory=list)
    fn_ids: list[int] = field(default_factory=list)
    fp_ids: list[int] = field(default_factory=list)

    @property
    def tp(self) -> int:
        return len(self.pairs)

    @property
    def fn(self) -> int:
        return len(self.fn_ids)

    @property
    def fp(self) -> int:
        return len(self.fp_ids)

    def pred_for(self, gt_id: int) -> int | None:
        for g, p, _ in self.pairs:
            if g == gt_id:
                return p
        return None


def pairwise_overlaps(gt: LesionSet, pred: LesionSet) -> dict[tuple[int, int], int]:
    """Voxel intersection counts for every overlapping (gt id, pred id)."""
    both = (gt.labels > 0) & (pred.labels > 0)
    if not both.any():
        return {}
    g = gt.labels[both].astype(np.int64)
    p = pred.labels[both].astype(np.int64)
    width = int(p.max()) + 1
    keys, counts = np.unique(g * width + p, return_counts=True)
    return {(int(k // width), int(k % width)): int(c) for k, c in zip(keys, counts)}


def match_lesions(gt: LesionSet, pred: LesionSet, min_dice: float = 0.1) -> MatchResult:
    """
    Match lesions in descending pairwise-Dice order.

    A pair counts only when its Dice reaches `min_dice`; ties are broken by
    (gt id, pred id).

    Raises:
        GridMismatch
    """
    require_same_grid(gt.grid, pred.grid, "ground-truth and predicted lesions")
    gt_sizes = {les.id: les.voxel_count for les in gt}
    pred_sizes = {les.id: les.voxel_count for les in pred}

    candidates = []
    for (g, p), inter in pairwise_overlaps(gt, pred).items():
        dice = 2.0 * inter / (gt_sizes[g] + pred_sizes[p])
        if dice >= min_dice:
            candidates.append((-dice, g, p))
    candidates.sort()

    used_gt: set[int] = set()
    used_pred: set[int] = set()
    pairs = []
    for neg_dice, g, p in candidates:
        if g in used_gt or p in used_pred:
            continue
        used_gt.add(g)
        used_pred.add(p)
        pairs.append((g, p, -neg_dice))

    return MatchResult(
        pairs=pairs,
        fn_ids=[les.id for les in gt if les.id not in used_gt],
        fp_ids=[les.id for les in pred if les.id not in used_pred],
    )
