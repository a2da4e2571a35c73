"""
Tensors and the recording tape.

Operations executed inside an active `Tape` context append a node holding
their inputs, output and a vector-Jacobian closure. `Tape.backward` walks
the nodes in reverse record order, which is a valid topological order
because a node's inputs always exist before the node is recorded.

Example:
    >>> w = Tensor5(np.ones((1, 1, 1, 1, 1)), requires_grad=True)
    >>> with Tape() as tape:
    ...     y = conv3d(x, w, None)
    ...     loss = bce_loss(softmax_channels(y), target)
    ...     tape.backward(loss)
    >>> w.grad.shape
    (1, 1, 1, 1, 1)
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from fusionseg_core.exceptions import ShapeMismatch

VJP = Callable[[NDArray[np.floating]], Sequence[NDArray[np.floating] | None]]


class Tensor5:
    """
    Dense float tensor with an optional gradient.

    Activations are 5-D (N, C, D, H, W); weights, biases and scalar losses
    use the same class with their own ranks. Data is float32 unless a
    float64 array is passed (gradient-check mode keeps float64 throughout).
    """

    __slots__ = ("data", "requires_grad", "grad", "node")

    def __init__(self, data: ArrayLike, requires_grad: bool = False) -> None:
        arr = np.asarray(data)
        if arr.dtype != np.float64:
            arr = arr.astype(np.float32)
        self.data: NDArray[np.floating] = arr
        self.requires_grad = requires_grad
        self.grad: NDArray[np.floating] | None = None
        self.node: _Node | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def is_leaf(self) -> bool:
        return self.node is None

    def item(self) -> float:
        return float(self.data)

    def numpy(self) -> NDArray[np.floating]:
        return self.data

    def __repr__(self) -> str:
        return (
            f"Tensor5(shape={self.shape}, dtype={self.dtype}, "
            f"requires_grad={self.requires_grad})"
        )


@dataclass(eq=False)
class _Node:
    name: str
    inputs: tuple[Tensor5, ...]
    output: Tensor5
    vjp: VJP


_ACTIVE_TAPES: list[Tape] = []


class Tape:
    """Ordered record of differentiable operations."""

    def __init__(self) -> None:
        self.nodes: list[_Node] = []

    def __enter__(self) -> Tape:
        _ACTIVE_TAPES.append(self)
        return self

    def __exit__(self, *exc: object) -> None:
        _ACTIVE_TAPES.remove(self)

    def __len__(self) -> int:
        return len(self.nodes)

    def backward(self, output: Tensor5, seed: ArrayLike | None = None) -> None:
        """
        Accumulate d(output)/d(leaf) into `.grad` of every leaf with requires_grad.

        Args:
            output: tensor produced on this tape (usually a scalar loss)
            seed: upstream gradient; defaults to ones (1 for scalars)
        """
        if seed is None:
            upstream = np.ones_like(output.data)
        else:
            upstream = np.asarray(seed, dtype=output.data.dtype)
            if upstream.shape != output.shape:
                raise ShapeMismatch(
                    f"Backward seed shape {upstream.shape} does not match output {output.shape}"
                )

        grads: dict[int, NDArray[np.floating]] = {id(output): upstream}
        for node in reversed(self.nodes):
            g = grads.pop(id(node.output), None)
            if g is None:
                continue
            for tensor, tg in zip(node.inputs, node.vjp(g)):
                if tg is None or not tensor.requires_grad:
                    continue
                key = id(tensor)
                grads[key] = grads[key] + tg if key in grads else tg

        for node in self.nodes:
            for tensor in node.inputs:
                if tensor.is_leaf and tensor.requires_grad and id(tensor) in grads:
                    g = grads.pop(id(tensor)).astype(tensor.dtype, copy=False)
                    tensor.grad = g if tensor.grad is None else tensor.grad + g


def active_tape() -> Tape | None:
    return _ACTIVE_TAPES[-1] if _ACTIVE_TAPES else None


def record(name: str, inputs: tuple[Tensor5, ...], output: Tensor5, vjp: VJP) -> Tensor5:
    """Attach `output` to the active tape when any input needs a gradient."""
    tape = active_tape()
    if tape is not None and any(t.requires_grad for t in inputs):
        output.requires_grad = True
        output.node = _Node(name, inputs, output, vjp)
        tape.nodes.append(output.node)
    return output


def as_tensor(value: Tensor5 | ArrayLike) -> Tensor5:
    return value if isinstance(value, Tensor5) else Tensor5(value)


def zero_grad(params: Iterable[Tensor5]) -> None:
    for p in params:
        p.grad = None
