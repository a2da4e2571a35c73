"""Failure-analysis statistics."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from scipy import stats

from fusionseg_core.exceptions import TooFewSamples


def welch_t(a: Sequence[float], b: Sequence[float]) -> tuple[float, float, float]:
    """
    Welch's two-sample t-test.

    Returns:
        (t, Welch-Satterthwaite dof, two-sided p)

    Raises:
        TooFewSamples: fewer than two samples in either group
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if len(x) < 2 or len(y) < 2:
        raise TooFewSamples(f"Welch's test needs >= 2 samples per group, got {len(x)} and {len(y)}")
    vx = x.var(ddof=1) / len(x)
    vy = y.var(ddof=1) / len(y)
    diff = float(x.mean() - y.mean())
    se2 = vx + vy
    if se2 == 0.0:
        dof = float(len(x) + len(y) - 2)
        if diff == 0.0:
            return 0.0, dof, 1.0
        return float(np.copysign(np.inf, diff)), dof, 0.0
    t = diff / np.sqrt(se2)
    dof = se2**2 / (vx**2 / (len(x) - 1) + vy**2 / (len(y) - 1))
    p = 2.0 * stats.t.sf(abs(t), dof)
    return float(t), float(dof), float(min(p, 1.0))


def bootstrap_median_ci(
    samples: Sequence[float],
    level: float = 0.90,
    resamples: int = 2000,
    seed: int = 0,
) -> tuple[float, float, float] | None:
    """(median, lower, upper) with a percentile bootstrap; None for no samples."""
    x = np.asarray(samples, dtype=np.float64)
    if len(x) == 0:
        return None
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, len(x), size=(resamples, len(x)))
    medians = np.median(x[draws], axis=1)
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(medians, [tail, 1.0 - tail])
    return float(np.median(x)), float(lo), float(hi)
