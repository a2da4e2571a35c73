"""Training patch sampling and flip augmentation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from fusionseg_core.constants import Setup
from fusionseg_core.exceptions import EmptyVolume, ShapeMismatch
from fusionseg_pipeline.config import PatchSize, TrainConfig
from fusionseg_pipeline.inputs import assemble_input, label_targets
from fusionseg_volume import MultimodalStudy

# (x, y, z) -> array axis of (B, C, D, H, W)
FLIP_AXES = {0: 4, 1: 3, 2: 2}


@dataclass(frozen=True)
class TrainingCase:
    """
    One study ready for patch sampling.

    Attributes:
        inputs: (C, nz, ny, nx) channels
        targets: (3, nz, ny, nx) binary gland / any-cancer / CsPCa maps
    """

    study_id: str
    inputs: NDArray[np.float32]
    targets: NDArray[np.float32]


@dataclass(frozen=True)
class Batch:
    """inputs (B, C, D, H, W); targets (B, 3, D, H, W)"""

    inputs: NDArray[np.float32]
    targets: NDArray[np.float32]

    def target(self, head: int) -> NDArray[np.float32]:
        """(B, 1, D, H, W) target of one head"""
        return self.targets[:, head:head + 1]


def prepare_case(study: MultimodalStudy, setup: Setup) -> TrainingCase:
    stack = assemble_input(study, setup)
    targets = np.stack([t.data for t in label_targets(study, stack.grid)]).astype(np.float32)
    return TrainingCase(study.study_id, stack.data, targets)


def pad_to_patch(array: NDArray[np.float32], patch: PatchSize) -> NDArray[np.float32]:
    """Zero-pad the trailing three axes up to at least `patch` (high side)."""
    spatial = array.shape[-3:]
    extra = [max(0, p - n) for p, n in zip(patch, spatial)]
    if not any(extra):
        return array
    widths = [(0, 0)] * (array.ndim - 3) + [(0, e) for e in extra]
    return np.pad(array, widths)


def foreground_voxels(targets: NDArray[np.float32]) -> NDArray[np.intp]:
    """Indices of CsPCa voxels, else any-cancer, else gland; (n, 3) as (z, y, x)."""
    for head in (2, 1, 0):
        idx = np.argwhere(targets[head] > 0.5)
        if len(idx):
            return idx
    return np.empty((0, 3), dtype=np.intp)


def sample_center(
    targets: NDArray[np.float32], fg_oversample: float, rng: np.random.Generator
) -> tuple[int, int, int]:
    """
    Draw a patch center (z, y, x).

    Raises:
        EmptyVolume: foreground draw on a case without any labelled voxel
    """
    shape = targets.shape[1:]
    if rng.random() < fg_oversample:
        fg = foreground_voxels(targets)
        if len(fg) == 0:
            raise EmptyVolume("Foreground sampling requested but the case has no labelled voxels")
        return tuple(int(v) for v in fg[rng.integers(len(fg))])  # type: ignore[return-value]
    return tuple(int(rng.integers(n)) for n in shape)  # type: ignore[return-value]


def patch_start(
    center: tuple[int, int, int], shape: tuple[int, ...], patch: PatchSize
) -> tuple[int, ...]:
    """Window start with `center` at patch // 2, clamped inside the volume."""
    return tuple(
        int(np.clip(c - p // 2, 0, n - p)) for c, n, p in zip(center, shape, patch)
    )


def sample_patches(case: TrainingCase, cfg: TrainConfig, rng: np.random.Generator) -> Batch:
    """Draw cfg.batch_size patches with foreground oversampling."""
    patch = cfg.patch_size
    inputs = pad_to_patch(case.inputs, patch)
    targets = pad_to_patch(case.targets, patch)
    shape = inputs.shape[1:]
    xs, ys = [], []
    for _ in range(cfg.batch_size):
        start = patch_start(sample_center(targets, cfg.fg_oversample, rng), shape, patch)
        window = tuple(slice(s, s + p) for s, p in zip(start, patch))
        xs.append(inputs[(slice(None), *window)])
        ys.append(targets[(slice(None), *window)])
    return Batch(np.stack(xs), np.stack(ys))


def augment_flip(
    batch: Batch,
    axes: tuple[bool, bool, bool],
    rng: np.random.Generator,
    probability: float = 0.5,
) -> Batch:
    """
    Flip inputs and targets together along enabled (x, y, z) axes.

    Each enabled axis flips with `probability`; one draw per axis per batch.
    """
    if batch.inputs.ndim != 5 or batch.targets.ndim != 5:
        raise ShapeMismatch("augment_flip expects 5-D inputs and targets")
    flip = [
        FLIP_AXES[a] for a, enabled in enumerate(axes) if enabled and rng.random() < probability
    ]
    if not flip:
        return batch
    return Batch(
        np.ascontiguousarray(np.flip(batch.inputs, axis=flip)),
        np.ascontiguousarray(np.flip(batch.targets, axis=flip)),
    )
