"""
Sliding-window inference with Gaussian blending.

Tiles sit on a regular lattice (step = patch * (1 - overlap), the last tile
flush with the volume end); each tile's probabilities are weighted by a
Gaussian importance map centred on the tile and the weighted sum is divided
by the summed weights.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.ndimage import gaussian_filter

from fusionseg_core.constants import Setup
from fusionseg_core.exceptions import SchemaError
from fusionseg_nngraph import Tensor5
from fusionseg_pipeline.config import InferenceConfig, PatchSize
from fusionseg_pipeline.inputs import ChannelStack, assemble_input, project_prediction
from fusionseg_pipeline.sampling import pad_to_patch
from fusionseg_unet import UNetModel, check_input, forward
from fusionseg_volume import MultimodalStudy, Volume

logger = logging.getLogger(__name__)

# (x, y, z) -> axis of a (N, C, D, H, W) tensor
MIRROR_AXES = {"x": 4, "y": 3, "z": 2}


def gaussian_weight_map(patch: PatchSize, sigma_scale: float = 1.0 / 8.0) -> NDArray[np.float64]:
    """Peak-normalized Gaussian importance map; zeros replaced by the smallest positive value."""
    impulse = np.zeros(patch)
    impulse[tuple(p // 2 for p in patch)] = 1.0
    weights = gaussian_filter(impulse, [p * sigma_scale for p in patch], mode="constant", cval=0.0)
    weights /= weights.max()
    positive = weights[weights > 0]
    weights[weights == 0] = positive.min()
    return weights


def tile_starts(patch: PatchSize, shape: Sequence[int], overlap: float) -> list[list[int]]:
    """Per-axis tile start indices covering `shape` (each axis >= patch)."""
    starts = []
    for p, n in zip(patch, shape):
        step = max(p * (1.0 - overlap), 1.0)
        count = int(np.ceil((n - p) / step)) + 1
        if count > 1:
            actual = (n - p) / (count - 1)
            starts.append([int(np.round(actual * i)) for i in range(count)])
        else:
            starts.append([0])
    return starts


def blend_tiles(
    tiles: Sequence[NDArray[np.floating]],
    starts: Sequence[tuple[int, int, int]],
    shape: tuple[int, int, int],
    weights: NDArray[np.float64],
) -> NDArray[np.float64]:
    """Gaussian-weighted mean of (D, H, W) tile predictions placed at `starts`."""
    acc = np.zeros(shape)
    norm = np.zeros(shape)
    patch = weights.shape
    for tile, start in zip(tiles, starts):
        window = tuple(slice(s, s + p) for s, p in zip(start, patch))
        acc[window] += tile * weights
        norm[window] += weights
    return acc / norm


def predict_patch(
    model: UNetModel, x: NDArray[np.float32], mirror_axes: Sequence[str]
) -> list[NDArray[np.float64]]:
    """Head probabilities (D, H, W) for one (C, D, H, W) patch, mirror-averaged."""
    batch = x[None]
    outputs = [[h.data[0, 0].astype(np.float64) for h in forward(model, Tensor5(batch))]]
    for axis_name in mirror_axes:
        axis = MIRROR_AXES[axis_name]
        flipped = forward(model, Tensor5(np.ascontiguousarray(np.flip(batch, axis=axis))))
        outputs.append([np.flip(h.data, axis=axis)[0, 0].astype(np.float64) for h in flipped])
    return [np.mean([o[i] for o in outputs], axis=0) for i in range(len(outputs[0]))]


def sliding_window_infer(
    model: UNetModel, stack: ChannelStack, cfg: InferenceConfig
) -> list[Volume]:
    """
    Whole-volume probability maps, one per head, on stack.grid.

    Raises:
        ShapeMismatch: channel count or patch size incompatible with the model
    """
    patch = cfg.patch_size
    check_input(model.config, Tensor5(np.zeros((1, stack.data.shape[0], *patch), np.float32)))
    shape = stack.data.shape[1:]
    padded = pad_to_patch(stack.data, patch)
    padded_shape = padded.shape[1:]
    weights = gaussian_weight_map(patch, cfg.sigma_scale)

    per_axis = tile_starts(patch, padded_shape, cfg.overlap)
    starts = [tuple(s) for s in itertools.product(*per_axis)]
    n_heads = len(model.config.head_labels)
    tiles: list[list[NDArray[np.float64]]] = [[] for _ in range(n_heads)]
    for start in starts:
        window = tuple(slice(s, s + p) for s, p in zip(start, patch))
        probs = predict_patch(model, padded[(slice(None), *window)], cfg.mirror_axes)
        for head, prob in enumerate(probs):
            tiles[head].append(prob)
        logger.debug(f"tile at {start}")
    logger.debug(f"Inference over {len(starts)} tiles of {patch}")

    crop = tuple(slice(0, n) for n in shape)
    maps = []
    for head in range(n_heads):
        blended = blend_tiles(tiles[head], starts, padded_shape, weights)
        blended = blended[crop]  # type: ignore[index]
        maps.append(stack.grid.with_data(np.clip(blended, 0.0, 1.0).astype(np.float32)))
    return maps


def predict_study(
    model: UNetModel, study: MultimodalStudy, setup: Setup, cfg: InferenceConfig
) -> dict[str, Volume]:
    """
    Head probability maps on the study's TRUS grid.

    MRI-only predictions are made on the MRI grid and projected to TRUS.

    Raises:
        SchemaError: MRI-only setup on a study without an MRI -> TRUS transform
    """
    to_trus = study.mri_to_trus
    if setup is Setup.MRI_ONLY and to_trus is None:
        raise SchemaError(f"{study.study_id}: MRI-only inference needs an MRI -> TRUS transform")
    stack = assemble_input(study, setup)
    maps = sliding_window_infer(model, stack, cfg)
    if setup is Setup.MRI_ONLY and to_trus is not None:
        maps = [project_prediction(m, to_trus, study.trus) for m in maps]
    return dict(zip(model.config.head_labels, maps))
