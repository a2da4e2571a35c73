"""Adam optimizer."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from fusionseg_core.exceptions import ShapeMismatch
from fusionseg_nngraph.tensor import Tensor5


@dataclass
class AdamState:
    """
    Per-parameter moments and hyperparameters.

    Moments are kept in float64 and keyed by parameter name.
    """

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict[str, NDArray[np.float64]] = field(default_factory=dict)
    v: dict[str, NDArray[np.float64]] = field(default_factory=dict)


def adam_step(
    params: Mapping[str, Tensor5],
    grads: Mapping[str, NDArray[np.floating] | None],
    state: AdamState,
) -> None:
    """
    Apply one bias-corrected Adam update; parameters get new data arrays.

    Missing or None gradients count as zero.

    Raises:
        ShapeMismatch: gradient shape differs from its parameter
    """
    state.t += 1
    bc1 = 1.0 - state.beta1**state.t
    bc2 = 1.0 - state.beta2**state.t
    for name, param in params.items():
        g = grads.get(name)
        grad = np.zeros(param.shape) if g is None else np.asarray(g, dtype=np.float64)
        if grad.shape != param.shape:
            raise ShapeMismatch(
                f"Gradient for {name} has shape {grad.shape}, expected {param.shape}"
            )
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None or v is None:
            m = np.zeros(param.shape)
            v = np.zeros(param.shape)
        m = state.beta1 * m + (1.0 - state.beta1) * grad
        v = state.beta2 * v + (1.0 - state.beta2) * grad * grad
        state.m[name] = m
        state.v[name] = v
        update = state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
        param.data = (param.data.astype(np.float64) - update).astype(param.dtype)
