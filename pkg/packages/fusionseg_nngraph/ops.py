"""
Differentiable operations over 5-D activations (N, C, D, H, W).

Convolutions loop over kernel offsets and contract channels with
`np.tensordot`, so peak memory stays at one strided window per offset.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from fusionseg_core.exceptions import ShapeMismatch
from fusionseg_nngraph.tensor import Tensor5, as_tensor, record

Triple = tuple[int, int, int]


def _triple(v: int | Sequence[int]) -> Triple:
    if isinstance(v, int):
        return (v, v, v)
    t = tuple(int(x) for x in v)
    if len(t) != 3:
        raise ShapeMismatch(f"Expected 3 values, got {t}")
    return t  # type: ignore[return-value]


def _require5(x: Tensor5, what: str) -> None:
    if x.data.ndim != 5:
        raise ShapeMismatch(f"{what} must be 5-D (N, C, D, H, W), got shape {x.shape}")


def _window(offset: int, stride: int, count: int) -> slice:
    return slice(offset, offset + stride * (count - 1) + 1, stride)


def _sum_spatial_batch(a: NDArray[np.floating]) -> NDArray[np.floating]:
    return a.sum(axis=(0, 2, 3, 4))


# --- convolution ----------------------------------------------------------

def conv3d(
    x: Tensor5,
    w: Tensor5,
    b: Tensor5 | None = None,
    stride: int | Sequence[int] = 1,
    pad: int | Sequence[int] = 0,
) -> Tensor5:
    """
    3-D cross-correlation (no kernel flip).

    Args:
        x: (N, Cin, D, H, W)
        w: (Cout, Cin, kd, kh, kw)
        b: (Cout,) or None
        stride: per-axis stride
        pad: per-axis zero padding on both sides

    Raises:
        ShapeMismatch: channel mismatch or empty output
    """
    _require5(x, "conv3d input")
    if w.data.ndim != 5 or w.shape[1] != x.shape[1]:
        raise ShapeMismatch(f"conv3d weight {w.shape} does not fit input {x.shape}")
    if b is not None and b.shape != (w.shape[0],):
        raise ShapeMismatch(f"conv3d bias {b.shape} does not match {w.shape[0]} outputs")
    s = _triple(stride)
    p = _triple(pad)
    k = w.shape[2:]
    n, _, *spatial = x.shape
    out_dims = tuple((spatial[i] + 2 * p[i] - k[i]) // s[i] + 1 for i in range(3))
    if min(out_dims) < 1:
        raise ShapeMismatch(f"conv3d output would be empty: input {x.shape}, kernel {k}")

    xp = np.pad(x.data, ((0, 0), (0, 0), (p[0], p[0]), (p[1], p[1]), (p[2], p[2])))
    cout = w.shape[0]
    out = np.zeros((n, cout, *out_dims), dtype=np.result_type(x.data, w.data))
    offsets = list(itertools.product(range(k[0]), range(k[1]), range(k[2])))
    for a, bb, c in offsets:
        win = xp[
            :, :,
            _window(a, s[0], out_dims[0]),
            _window(bb, s[1], out_dims[1]),
            _window(c, s[2], out_dims[2]),
        ]
        out += np.moveaxis(np.tensordot(w.data[:, :, a, bb, c], win, axes=([1], [1])), 0, 1)
    if b is not None:
        out += b.data[None, :, None, None, None]

    def vjp(g: NDArray[np.floating]) -> list[NDArray[np.floating] | None]:
        gxp = np.zeros_like(xp)
        gw = np.zeros_like(w.data)
        for a, bb, c in offsets:
            sl = (
                slice(None), slice(None),
                _window(a, s[0], out_dims[0]),
                _window(bb, s[1], out_dims[1]),
                _window(c, s[2], out_dims[2]),
            )
            gw[:, :, a, bb, c] = np.tensordot(g, xp[sl], axes=([0, 2, 3, 4], [0, 2, 3, 4]))
            gxp[sl] += np.moveaxis(np.tensordot(g, w.data[:, :, a, bb, c], axes=([1], [0])), -1, 1)
        d, h, ww = spatial
        gx = gxp[:, :, p[0]:p[0] + d, p[1]:p[1] + h, p[2]:p[2] + ww]
        grads: list[NDArray[np.floating] | None] = [gx, gw]
        if b is not None:
            grads.append(_sum_spatial_batch(g))
        return grads

    inputs = (x, w) if b is None else (x, w, b)
    return record("conv3d", inputs, Tensor5(out), vjp)


def conv3d_transpose(
    x: Tensor5,
    w: Tensor5,
    b: Tensor5 | None = None,
    stride: int | Sequence[int] = 2,
) -> Tensor5:
    """
    Adjoint of a strided conv3d (no padding).

    Args:
        x: (N, Cin, D, H, W)
        w: (Cin, Cout, kd, kh, kw)
        b: (Cout,) or None

    Output spatial dims are (in - 1) * stride + k per axis.
    """
    _require5(x, "conv3d_transpose input")
    if w.data.ndim != 5 or w.shape[0] != x.shape[1]:
        raise ShapeMismatch(f"conv3d_transpose weight {w.shape} does not fit input {x.shape}")
    if b is not None and b.shape != (w.shape[1],):
        raise ShapeMismatch(f"conv3d_transpose bias {b.shape} does not match {w.shape[1]}")
    s = _triple(stride)
    k = w.shape[2:]
    n, _, *spatial = x.shape
    out_dims = tuple((spatial[i] - 1) * s[i] + k[i] for i in range(3))
    cout = w.shape[1]
    out = np.zeros((n, cout, *out_dims), dtype=np.result_type(x.data, w.data))
    offsets = list(itertools.product(range(k[0]), range(k[1]), range(k[2])))

    def placement(a: int, bb: int, c: int) -> tuple[slice, ...]:
        return (
            slice(None), slice(None),
            _window(a, s[0], spatial[0]),
            _window(bb, s[1], spatial[1]),
            _window(c, s[2], spatial[2]),
        )

    for a, bb, c in offsets:
        contrib = np.tensordot(x.data, w.data[:, :, a, bb, c], axes=([1], [0]))
        out[placement(a, bb, c)] += np.moveaxis(contrib, -1, 1)
    if b is not None:
        out += b.data[None, :, None, None, None]

    def vjp(g: NDArray[np.floating]) -> list[NDArray[np.floating] | None]:
        gx = np.zeros_like(x.data)
        gw = np.zeros_like(w.data)
        for a, bb, c in offsets:
            gs = g[placement(a, bb, c)]
            gx += np.moveaxis(np.tensordot(gs, w.data[:, :, a, bb, c], axes=([1], [1])), -1, 1)
            gw[:, :, a, bb, c] = np.tensordot(x.data, gs, axes=([0, 2, 3, 4], [0, 2, 3, 4]))
        grads: list[NDArray[np.floating] | None] = [gx, gw]
        if b is not None:
            grads.append(_sum_spatial_batch(g))
        return grads

    inputs = (x, w) if b is None else (x, w, b)
    return record("conv3d_transpose", inputs, Tensor5(out), vjp)


# --- normalization and activations ----------------------------------------

def instance_norm(x: Tensor5, gamma: Tensor5, beta: Tensor5, eps: float = 1e-5) -> Tensor5:
    """Per (sample, channel) standardization over D*H*W, then affine."""
    _require5(x, "instance_norm input")
    channels = x.shape[1]
    if gamma.shape != (channels,) or beta.shape != (channels,):
        raise ShapeMismatch(f"instance_norm expects ({channels},) gamma/beta")
    axes = (2, 3, 4)
    m = x.shape[2] * x.shape[3] * x.shape[4]
    mu = x.data.mean(axis=axes, keepdims=True)
    centered = x.data - mu
    var = (centered**2).mean(axis=axes, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv_std
    g5 = gamma.data[None, :, None, None, None]
    out = xhat * g5 + beta.data[None, :, None, None, None]

    def vjp(g: NDArray[np.floating]) -> list[NDArray[np.floating] | None]:
        gxhat = g * g5
        gx = (inv_std / m) * (
            m * gxhat
            - gxhat.sum(axis=axes, keepdims=True)
            - xhat * (gxhat * xhat).sum(axis=axes, keepdims=True)
        )
        return [gx, _sum_spatial_batch(g * xhat), _sum_spatial_batch(g)]

    return record("instance_norm", (x, gamma, beta), Tensor5(out), vjp)


def leaky_relu(x: Tensor5, slope: float = 0.01) -> Tensor5:
    positive = x.data >= 0
    out = np.where(positive, x.data, slope * x.data)

    def vjp(g: NDArray[np.floating]) -> list[NDArray[np.floating] | None]:
        return [np.where(positive, g, slope * g)]

    return record("leaky_relu", (x,), Tensor5(out), vjp)


def softmax_channels(x: Tensor5) -> Tensor5:
    """Softmax over axis 1, max-subtracted."""
    _require5(x, "softmax input")
    if x.shape[1] < 2:
        raise ShapeMismatch(f"softmax needs at least 2 channels, got {x.shape[1]}")
    shifted = x.data - x.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=1, keepdims=True)

    def vjp(g: NDArray[np.floating]) -> list[NDArray[np.floating] | None]:
        return [s * (g - (g * s).sum(axis=1, keepdims=True))]

    return record("softmax_channels", (x,), Tensor5(s), vjp)


# --- structural -----------------------------------------------------------

def concat_channels(a: Tensor5, b: Tensor5) -> Tensor5:
    """Stack channels [a; b]."""
    _require5(a, "concat input")
    _require5(b, "concat input")
    if a.shape[0] != b.shape[0] or a.shape[2:] != b.shape[2:]:
        raise ShapeMismatch(f"Cannot concatenate {a.shape} and {b.shape} along channels")
    ca = a.shape[1]
    out = np.concatenate([a.data, b.data], axis=1)

    def vjp(g: NDArray[np.floating]) -> list[NDArray[np.floating] | None]:
        return [g[:, :ca], g[:, ca:]]

    return record("concat_channels", (a, b), Tensor5(out), vjp)


def slice_channels(x: Tensor5, start: int, stop: int) -> Tensor5:
    _require5(x, "slice input")
    if not 0 <= start < stop <= x.shape[1]:
        raise ShapeMismatch(f"Channel slice [{start}:{stop}] outside {x.shape[1]} channels")
    out = x.data[:, start:stop].copy()

    def vjp(g: NDArray[np.floating]) -> list[NDArray[np.floating] | None]:
        gx = np.zeros_like(x.data)
        gx[:, start:stop] = g
        return [gx]

    return record("slice_channels", (x,), Tensor5(out), vjp)


# --- elementary scalar/tensor arithmetic ----------------------------------

def add(a: Tensor5, b: Tensor5) -> Tensor5:
    if a.shape != b.shape:
        raise ShapeMismatch(f"add: {a.shape} vs {b.shape}")

    def vjp(g: NDArray[np.floating]) -> list[NDArray[np.floating] | None]:
        return [g, g]

    return record("add", (a, b), Tensor5(a.data + b.data), vjp)


def scale(x: Tensor5, factor: float) -> Tensor5:
    def vjp(g: NDArray[np.floating]) -> list[NDArray[np.floating] | None]:
        return [g * factor]

    return record("scale", (x,), Tensor5(x.data * factor), vjp)


def mean_of(values: Sequence[Tensor5]) -> Tensor5:
    """Mean of equally shaped tensors (typically scalar losses)."""
    if not values:
        raise ShapeMismatch("mean_of needs at least one tensor")
    tensors = tuple(as_tensor(v) for v in values)
    shape = tensors[0].shape
    if any(t.shape != shape for t in tensors):
        raise ShapeMismatch(f"mean_of: shapes differ {[t.shape for t in tensors]}")
    count = len(tensors)
    out = sum((t.data for t in tensors[1:]), start=tensors[0].data.copy()) / count

    def vjp(g: NDArray[np.floating]) -> list[NDArray[np.floating] | None]:
        return [g / count for _ in tensors]

    return record("mean_of", tensors, Tensor5(out), vjp)
