"""
Finite-difference gradient checks.

All inputs are float64 and the difference stencil is the fourth-order
central one at step 1e-3, so truncation error sits near roundoff. The
relative error floor of 1e-12 only keeps exact zeros finite. The output is
reduced with a fixed random projection, so a single backward pass yields
the gradient the differences are compared to.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from fusionseg_nngraph.tensor import Tape, Tensor5

FD_STEP = 1e-3
REL_FLOOR = 1e-12


@dataclass(frozen=True)
class GradcheckFailure:
    input_index: int
    flat_index: int
    analytic: float
    numeric: float
    rel_error: float


@dataclass(frozen=True)
class GradcheckReport:
    """Result of gradcheck(); `failures` lists every element above tolerance."""

    max_rel_error: float
    tolerance: float
    failures: list[GradcheckFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), REL_FLOOR)


def gradcheck(
    op: Callable[..., Tensor5],
    shapes: Sequence[tuple[int, ...]] | None = None,
    tolerance: float = 1e-3,
    inputs: Sequence[NDArray[np.floating]] | None = None,
    seed: int = 0,
    step: float = FD_STEP,
) -> GradcheckReport:
    """
    Compare analytic and fourth-order central-difference gradients of `op`.

    Args:
        op: callable taking one Tensor5 per input and returning a Tensor5
        shapes: shapes of standard-normal random inputs (ignored when `inputs` is given)
        tolerance: maximum allowed relative error
        inputs: explicit input arrays (for ops with restricted domains)
        seed: generator seed for inputs and the output projection

    Returns:
        Report with the maximum relative error and the offending elements
    """
    rng = np.random.default_rng(seed)
    if inputs is None:
        if shapes is None:
            raise ValueError("gradcheck needs shapes or inputs")
        arrays = [rng.standard_normal(shape) for shape in shapes]
    else:
        arrays = [np.array(a, dtype=np.float64) for a in inputs]

    leaves = [Tensor5(a, requires_grad=True) for a in arrays]
    with Tape() as tape:
        out = op(*leaves)
        projection = rng.standard_normal(out.shape)
        tape.backward(out, seed=projection)

    def evaluate(values: list[NDArray[np.float64]]) -> float:
        result = op(*[Tensor5(v) for v in values])
        return float(np.sum(result.data * projection))

    def nudged(index: int, flat: int, delta: float) -> list[NDArray[np.float64]]:
        values = [a.copy() for a in arrays]
        values[index].flat[flat] += delta
        return values

    failures: list[GradcheckFailure] = []
    worst = 0.0
    for index, (leaf, base) in enumerate(zip(leaves, arrays)):
        analytic = np.zeros_like(base) if leaf.grad is None else leaf.grad
        for flat in range(base.size):
            numeric = (
                8.0 * (evaluate(nudged(index, flat, step)) - evaluate(nudged(index, flat, -step)))
                - evaluate(nudged(index, flat, 2.0 * step))
                + evaluate(nudged(index, flat, -2.0 * step))
            ) / (12.0 * step)
            a = float(analytic.flat[flat])
            err = relative_error(a, numeric)
            worst = max(worst, err)
            if err > tolerance:
                failures.append(GradcheckFailure(index, flat, a, numeric, err))
    return GradcheckReport(max_rel_error=worst, tolerance=tolerance, failures=failures)
