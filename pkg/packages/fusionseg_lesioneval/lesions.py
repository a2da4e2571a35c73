"""
Lesion extraction.

Ground-truth lesions come from the lesion label map (one lesion per id);
predicted lesions are connected components of a binarized probability map.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray
from scipy.ndimage import generate_binary_structure, label, maximum

from fusionseg_core.exceptions import NonPositiveVolume
from fusionseg_volume import Volume, require_same_grid, voxel_to_world


@dataclass(frozen=True)
class Lesion:
    """
    One lesion on a grid.

    Attributes:
        id: label in the owning LesionSet.labels array (>= 1)
        first_voxel: (z, y, x) of the first voxel in raster order
        gg: grade group (ground truth only)
        score: confidence in [0, 1] (predictions and matched ground truth)
    """

    id: int
    voxel_count: int
    volume_mm3: float
    centroid_mm: tuple[float, float, float]
    first_voxel: tuple[int, int, int]
    gg: int | None = None
    score: float | None = None

    @property
    def diameter_mm(self) -> float:
        return volume_to_diameter(self.volume_mm3)


@dataclass(frozen=True)
class LesionSet:
    """Lesions plus the int32 label array (nz, ny, nx) they index."""

    grid: Volume
    labels: NDArray[np.int32]
    lesions: list[Lesion] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.lesions)

    def __iter__(self):  # type: ignore[no-untyped-def]
        return iter(self.lesions)

    def by_id(self) -> dict[int, Lesion]:
        return {lesion.id: lesion for lesion in self.lesions}

    def mask(self) -> NDArray[np.bool_]:
        return self.labels > 0


def volume_to_diameter(v_mm3: float) -> float:
    """
    Equivalent-sphere diameter (6 v / pi) ** (1 / 3).

    Raises:
        NonPositiveVolume
    """
    if not v_mm3 > 0:
        raise NonPositiveVolume(f"Lesion volume must be positive, got {v_mm3}")
    return (6.0 * v_mm3 / math.pi) ** (1.0 / 3.0)


def binarize(prob: Volume, threshold: float = 0.5) -> Volume:
    """1 where prob >= threshold, else 0."""
    return prob.with_data((prob.data >= threshold).astype(np.float32))


def _describe(grid: Volume, labels: NDArray[np.int32], ids: Iterable[int]) -> list[Lesion]:
    flat = labels.ravel()
    nonzero = np.flatnonzero(flat)
    values = flat[nonzero]
    # stable sort keeps raster order inside each label
    order = np.argsort(values, kind="stable")
    present, starts, counts = np.unique(values[order], return_index=True, return_counts=True)
    groups = {
        int(i): nonzero[order[s:s + c]] for i, s, c in zip(present, starts, counts)
    }

    lesions = []
    for lesion_id in ids:
        members = groups.get(int(lesion_id))
        if members is None:
            continue
        zyx = np.stack(np.unravel_index(members, labels.shape), axis=1)
        centroid = voxel_to_world(grid, zyx[:, ::-1].mean(axis=0))
        lesions.append(
            Lesion(
                id=int(lesion_id),
                voxel_count=len(members),
                volume_mm3=len(members) * grid.voxel_volume_mm3,
                centroid_mm=tuple(float(c) for c in centroid),  # type: ignore[arg-type]
                first_voxel=tuple(int(v) for v in zyx[0]),  # type: ignore[arg-type]
            )
        )
    return lesions


def connected_components(mask: Volume, connectivity: int = 26) -> LesionSet:
    """
    Label connected foreground components (6- or 26-connectivity).

    Ids are 1..n in raster order (z, y, x) of each component's first voxel.
    """
    rank = 1 if connectivity == 6 else 3
    structure = generate_binary_structure(3, rank)
    labels, count = label(mask.data > 0.5, structure=structure)
    labels = labels.astype(np.int32)
    lesions = _describe(mask, labels, range(1, count + 1))
    # scipy numbers components by first appearance; sort to make the order explicit
    order = sorted(lesions, key=lambda lesion: lesion.first_voxel)
    remap = np.zeros(count + 1, dtype=np.int32)
    renumbered = []
    for new_id, lesion in enumerate(order, start=1):
        remap[lesion.id] = new_id
        renumbered.append(replace(lesion, id=new_id))
    return LesionSet(mask, remap[labels], renumbered)


def lesions_from_labels(
    lesion_labels: Volume, lesion_gg: Mapping[int, int], min_gg: int = 1
) -> LesionSet:
    """Ground-truth lesions with grade group >= min_gg, keeping their label ids."""
    labels = lesion_labels.data.astype(np.int32)
    keep = sorted(i for i, gg in lesion_gg.items() if gg >= min_gg)
    kept = np.where(np.isin(labels, keep), labels, 0).astype(np.int32)
    lesions = [
        replace(lesion, gg=lesion_gg[lesion.id]) for lesion in _describe(lesion_labels, kept, keep)
    ]
    return LesionSet(lesion_labels, kept, lesions)


def lesion_score(lesion: Lesion, lesions: LesionSet, prob: Volume) -> float:
    """Maximum probability over the lesion's voxels."""
    require_same_grid(lesions.grid, prob, "lesions and probability map")
    return float(prob.data[lesions.labels == lesion.id].max())


def with_scores(lesions: LesionSet, prob: Volume) -> LesionSet:
    """Attach lesion_score to every lesion."""
    require_same_grid(lesions.grid, prob, "lesions and probability map")
    if not lesions.lesions:
        return lesions
    ids = [les.id for les in lesions.lesions]
    maxima = maximum(prob.data, labels=lesions.labels, index=ids)
    scored = [replace(les, score=float(m)) for les, m in zip(lesions.lesions, maxima)]
    return LesionSet(lesions.grid, lesions.labels, scored)
