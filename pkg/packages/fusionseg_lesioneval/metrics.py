"""
Detection and overlap metrics.

Scored units are (score, is_positive) pairs. Positives are ground-truth
lesions (score of the matched prediction, 0 when missed); negatives are
sextants without ground-truth cancer (score = max probability inside).
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from fusionseg_core.exceptions import DegenerateClasses

ScoredUnit = tuple[float, bool]


def dice(a: NDArray[np.bool_], b: NDArray[np.bool_]) -> float:
    """Dice of two boolean masks; two empty masks score 1."""
    total = int(a.sum()) + int(b.sum())
    if total == 0:
        return 1.0
    return 2.0 * int(np.logical_and(a, b).sum()) / total


def _split(units: Sequence[ScoredUnit]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    scores = np.array([s for s, _ in units], dtype=np.float64)
    labels = np.array([p for _, p in units], dtype=bool)
    return scores[labels], scores[~labels]


def roc_auc(units: Sequence[ScoredUnit]) -> float:
    """
    Mann-Whitney AUC: P(pos > neg) + P(pos == neg) / 2.

    Raises:
        DegenerateClasses: no positives or no negatives
    """
    pos, neg = _split(units)
    if len(pos) == 0 or len(neg) == 0:
        raise DegenerateClasses(f"ROC needs both classes ({len(pos)} pos, {len(neg)} neg)")
    greater = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return float((greater + 0.5 * ties) / (len(pos) * len(neg)))


def roc_curve(units: Sequence[ScoredUnit]) -> list[tuple[float, float]]:
    """(fpr, tpr) points from (0, 0) to (1, 1), one per distinct score threshold."""
    pos, neg = _split(units)
    if len(pos) == 0 or len(neg) == 0:
        raise DegenerateClasses(f"ROC needs both classes ({len(pos)} pos, {len(neg)} neg)")
    points = [(0.0, 0.0)]
    for threshold in np.unique(np.concatenate([pos, neg]))[::-1]:
        points.append(
            (float((neg >= threshold).mean()), float((pos >= threshold).mean()))
        )
    return points


def roc_auc_trapezoid(units: Sequence[ScoredUnit]) -> float:
    """Trapezoidal area under roc_curve."""
    fpr, tpr = np.array(roc_curve(units)).T
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def _ranked(units: Sequence[ScoredUnit]) -> NDArray[np.bool_]:
    """Positive flags in descending score order, negatives first among ties."""
    order = sorted(range(len(units)), key=lambda i: (-units[i][0], units[i][1], i))
    return np.array([units[i][1] for i in order], dtype=bool)


def pr_auc(units: Sequence[ScoredUnit]) -> float:
    """
    Average precision over positives in rank order.

    Raises:
        DegenerateClasses: no positives
    """
    flags = _ranked(units)
    n_pos = int(flags.sum())
    if n_pos == 0:
        raise DegenerateClasses("Precision-recall needs at least one positive")
    hits = np.cumsum(flags)
    ranks = np.arange(1, len(flags) + 1)
    return float(np.sum((hits / ranks)[flags]) / n_pos)


def pr_curve(units: Sequence[ScoredUnit]) -> list[tuple[float, float]]:
    """(recall, precision) after each ranked unit."""
    flags = _ranked(units)
    n_pos = int(flags.sum())
    if n_pos == 0:
        raise DegenerateClasses("Precision-recall needs at least one positive")
    hits = np.cumsum(flags)
    ranks = np.arange(1, len(flags) + 1)
    return [(float(h / n_pos), float(h / r)) for h, r in zip(hits, ranks)]


def safe_rate(numerator: int, denominator: int) -> float | None:
    return numerator / denominator if denominator > 0 else None
