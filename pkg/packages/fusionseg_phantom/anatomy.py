"""
Analytic phantom anatomy in TRUS physical space.

A gland is an ellipsoid whose boundary is perturbed by a low-order angular
field; lesions are axis-aligned ellipsoids placed strictly inside it.
Everything is evaluated at arbitrary points so that any grid (TRUS or MRI
through the hidden transform) sees the same geometry.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from fusionseg_core.constants import MAX_GG
from fusionseg_phantom.config import PhantomConfig

logger = logging.getLogger(__name__)

PLACEMENT_ATTEMPTS = 200
SHRINK = 0.9

# Unit directions used to probe lesion containment: 26 neighbours of a cube.
_PROBES = np.array(
    [
        (i, j, k)
        for i in (-1, 0, 1)
        for j in (-1, 0, 1)
        for k in (-1, 0, 1)
        if (i, j, k) != (0, 0, 0)
    ],
    dtype=np.float64,
)
_PROBES /= np.linalg.norm(_PROBES, axis=1, keepdims=True)


class Visibility(str, Enum):
    """Which channels show a lesion"""
    MRI_ONLY = "mri_only"
    TRUS_ONLY = "trus_only"
    BOTH = "both"

    @property
    def in_mri(self) -> bool:
        return self is not Visibility.TRUS_ONLY

    @property
    def in_trus(self) -> bool:
        return self is not Visibility.MRI_ONLY


@dataclass(frozen=True)
class GlandShape:
    center: NDArray[np.float64]
    axes: NDArray[np.float64]
    # boundary field g(u) = b . u + u^T M u, scaled so |g| <= 1
    linear: NDArray[np.float64]
    quadratic: NDArray[np.float64]
    amplitude: float

    def radius(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """Normalized ellipsoid radius of (..., 3) points."""
        return np.sqrt((((points - self.center) / self.axes) ** 2).sum(axis=-1))

    def boundary(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        d = points - self.center
        norm = np.linalg.norm(d, axis=-1, keepdims=True)
        u = np.divide(d, norm, out=np.zeros_like(d), where=norm > 0)
        g = u @ self.linear + np.einsum("...i,ij,...j->...", u, self.quadratic, u)
        return 1.0 + self.amplitude * g

    def contains(self, points: NDArray[np.float64]) -> NDArray[np.bool_]:
        return self.radius(points) <= self.boundary(points)

    def contains_strictly(self, points: NDArray[np.float64]) -> bool:
        """True when every point is inside regardless of the boundary field."""
        return bool(np.all(self.radius(points) <= 1.0 - self.amplitude))


@dataclass(frozen=True)
class LesionSpec:
    """
    One synthetic lesion.

    Attributes:
        radii: semi-axes (x, y, z) mm
        gg: grade group from the radius quantile
    """

    id: int
    center: NDArray[np.float64]
    radii: NDArray[np.float64]
    visibility: Visibility
    gg: int

    @property
    def volume_mm3(self) -> float:
        return 4.0 / 3.0 * math.pi * float(np.prod(self.radii))

    def contains(self, points: NDArray[np.float64]) -> NDArray[np.bool_]:
        return (((points - self.center) / self.radii) ** 2).sum(axis=-1) <= 1.0


@dataclass(frozen=True)
class Anatomy:
    gland: GlandShape
    lesions: list[LesionSpec] = field(default_factory=list)

    def gland_mask(self, points: NDArray[np.float64]) -> NDArray[np.bool_]:
        return self.gland.contains(points)

    def lesion_labels(self, points: NDArray[np.float64]) -> NDArray[np.int32]:
        """Lesion id per point (0 outside every lesion); lesions are disjoint."""
        labels = np.zeros(points.shape[:-1], dtype=np.int32)
        for lesion in self.lesions:
            labels[lesion.contains(points)] = lesion.id
        return labels

    def visible_lesions(self, points: NDArray[np.float64], in_mri: bool) -> NDArray[np.bool_]:
        visible = np.zeros(points.shape[:-1], dtype=bool)
        for lesion in self.lesions:
            if (lesion.visibility.in_mri if in_mri else lesion.visibility.in_trus):
                visible |= lesion.contains(points)
        return visible


def grade_from_radius(radius: float, lo: float, hi: float) -> int:
    """GG = 1 + floor(5 q) for the radius quantile q in [lo, hi], capped at 5."""
    q = 0.0 if hi <= lo else (radius - lo) / (hi - lo)
    return min(MAX_GG, 1 + int(math.floor(q * MAX_GG)))


def sample_gland(
    cfg: PhantomConfig, center: NDArray[np.float64], rng: np.random.Generator
) -> GlandShape:
    axes = np.array([rng.uniform(lo, hi) for lo, hi in cfg.gland_axes_mm])
    linear = rng.normal(size=3)
    quadratic = rng.normal(size=(3, 3))
    quadratic = (quadratic + quadratic.T) / 2.0
    # |b . u| + |u^T M u| <= |b| + ||M||_2 for unit u
    bound = np.linalg.norm(linear) + np.abs(np.linalg.eigvalsh(quadratic)).max()
    linear /= bound
    quadratic /= bound
    return GlandShape(center, axes, linear, quadratic, cfg.boundary_perturbation)


def _fits(
    gland: GlandShape,
    center: NDArray[np.float64],
    radii: NDArray[np.float64],
    placed: list[LesionSpec],
    gap: float,
) -> bool:
    if not gland.contains_strictly(center + _PROBES * radii):
        return False
    r = float(radii.max())
    return all(
        np.linalg.norm(center - other.center) >= r + float(other.radii.max()) + gap
        for other in placed
    )


def place_lesions(
    cfg: PhantomConfig, gland: GlandShape, rng: np.random.Generator
) -> list[LesionSpec]:
    """
    Draw the lesion count, sizes and visibilities and place them in the gland.

    A lesion that cannot be placed shrinks by 10% per round of attempts and is
    dropped once it falls below the minimum radius.
    """
    lo, hi = cfg.lesions_per_study
    count = int(rng.integers(lo, hi + 1))
    r_lo, r_hi = cfg.lesion_radius_mm
    kinds = list(Visibility)
    placed: list[LesionSpec] = []
    for _ in range(count):
        radius = float(rng.uniform(r_lo, r_hi))
        z_ratio = float(rng.uniform(0.7, 1.0))
        visibility = kinds[int(rng.choice(len(kinds), p=cfg.visibility_mix))]
        center = None
        while radius >= r_lo:
            radii = np.array([radius, radius, radius * z_ratio])
            box = np.maximum(gland.axes * (1.0 - gland.amplitude) - radii, 0.0)
            for _ in range(PLACEMENT_ATTEMPTS):
                candidate = gland.center + rng.uniform(-1.0, 1.0, size=3) * box
                if _fits(gland, candidate, radii, placed, cfg.min_lesion_gap_mm):
                    center = candidate
                    break
            if center is not None:
                break
            radius *= SHRINK
        if center is None:
            logger.warning(f"Could not place lesion {len(placed) + 1}; dropping it")
            continue
        placed.append(
            LesionSpec(
                id=len(placed) + 1,
                center=center,
                radii=radii,
                visibility=visibility,
                gg=grade_from_radius(radius, r_lo, r_hi),
            )
        )
    return placed
