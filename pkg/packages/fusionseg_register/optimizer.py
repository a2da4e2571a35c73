"""
Coarse-to-fine affine registration.

Each pyramid level smooths and subsamples the fixed image (factor 2 per
level) and smooths the moving image to a matching scale. On a level the
optimizer repeats: central-difference gradient over the 12 parameters
(in units of the configured steps), then a backtracking line search along
the normalized gradient. A step is accepted only when the metric strictly
improves, so the metric never decreases across accepted steps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.ndimage import gaussian_filter

from fusionseg_core.exceptions import DegenerateVariance, NoOverlap
from fusionseg_preprocess import InterpKind, sample_points
from fusionseg_register.config import Metric, RegistrationConfig
from fusionseg_register.metrics import ncc_values
from fusionseg_register.params import N_PARAMS, affine_to_params, params_to_affine
from fusionseg_volume import Affine3, Volume, invert, world_to_voxel

logger = logging.getLogger(__name__)

# Coarsest level keeps at least this many voxels per axis.
MIN_LEVEL_DIM = 4


@dataclass(frozen=True)
class RegistrationResult:
    """
    Outcome of register().

    Attributes:
        transform: moving -> fixed physical transform
        metric: similarity at the finest level (NCC, or -MSE)
        history: accepted metric values per pyramid level, coarse to fine
        iterations: gradient evaluations over all levels
    """

    transform: Affine3
    metric: float
    history: list[list[float]] = field(default_factory=list)
    iterations: int = 0


@dataclass
class _Level:
    factor: int
    fixed_values: NDArray[np.float64]
    centers: NDArray[np.float64]
    moving: Volume


def _smooth(vol: Volume, sigma_mm: float) -> Volume:
    if sigma_mm <= 0:
        return vol
    sigma_vox = [sigma_mm / s for s in reversed(vol.spacing)]
    return vol.with_data(gaussian_filter(vol.data.astype(np.float64), sigma_vox, mode="nearest"))


def _build_level(moving: Volume, fixed: Volume, factor: int) -> _Level:
    sigma_mm = 0.5 * factor * min(fixed.spacing) if factor > 1 else 0.0
    fixed_s = _smooth(fixed, sigma_mm)
    data = fixed_s.data[::factor, ::factor, ::factor]
    coarse = Volume(data, tuple(s * factor for s in fixed.spacing), fixed.origin, fixed.space_tag)
    return _Level(
        factor=factor,
        fixed_values=coarse.data.astype(np.float64).ravel(),
        centers=coarse.voxel_centers_world().reshape(-1, 3),
        moving=_smooth(moving, sigma_mm),
    )


def _pyramid_factors(fixed: Volume, levels: int) -> list[int]:
    factors = []
    for level in reversed(range(levels)):
        factor = 2**level
        if min(fixed.dims) // factor >= MIN_LEVEL_DIM or factor == 1:
            factors.append(factor)
    return factors


def _inside(moving: Volume, idx: NDArray[np.float64]) -> NDArray[np.bool_]:
    upper = np.asarray(moving.dims, dtype=np.float64) - 1.0
    return np.all((idx >= -0.5) & (idx <= upper + 0.5), axis=-1)


def overlap_fraction(moving: Volume, fixed: Volume, transform: Affine3) -> float:
    """Fraction of fixed voxel centers that land inside the moving grid."""
    points = invert(transform).apply(fixed.voxel_centers_world().reshape(-1, 3))
    return float(np.mean(_inside(moving, world_to_voxel(moving, points))))


class _Objective:
    """Similarity as a function of the parameter vector on one level."""

    def __init__(self, level: _Level, center: NDArray[np.float64], metric: Metric) -> None:
        self.level = level
        self.center = center
        self.metric = metric

    def __call__(self, params: NDArray[np.float64]) -> float:
        inverse = invert(params_to_affine(params, self.center))
        idx = world_to_voxel(self.level.moving, inverse.apply(self.level.centers))
        inside = _inside(self.level.moving, idx)
        if inside.sum() < 2:
            return -np.inf
        warped = sample_points(self.level.moving, idx[inside], InterpKind.TRILINEAR)
        fixed = self.level.fixed_values[inside]
        if self.metric is Metric.MSE:
            return -float(np.mean((warped - fixed) ** 2))
        try:
            return ncc_values(warped, fixed)
        except DegenerateVariance:
            return -np.inf


def _gradient(
    objective: _Objective, params: NDArray[np.float64], steps: NDArray[np.float64]
) -> NDArray[np.float64]:
    """Central differences, expressed per unit step."""
    grad = np.zeros(N_PARAMS)
    for i in range(N_PARAMS):
        delta = np.zeros(N_PARAMS)
        delta[i] = steps[i]
        hi = objective(params + delta)
        lo = objective(params - delta)
        if np.isfinite(hi) and np.isfinite(lo):
            grad[i] = (hi - lo) / 2.0
    return grad


def _optimize_level(
    objective: _Objective,
    params: NDArray[np.float64],
    cfg: RegistrationConfig,
) -> tuple[NDArray[np.float64], list[float], int]:
    steps = np.asarray(cfg.parameter_steps())
    current = objective(params)
    history = [current]
    alpha = cfg.initial_alpha
    iterations = 0

    for _ in range(cfg.max_iters):
        iterations += 1
        grad = _gradient(objective, params, steps)
        norm = float(np.linalg.norm(grad))
        if norm == 0.0:
            break
        direction = grad / norm

        accepted = False
        gain = 0.0
        while alpha >= cfg.min_alpha:
            candidate = params + alpha * direction * steps
            value = objective(candidate)
            if value > current:
                gain = value - current
                params, current = candidate, value
                history.append(current)
                logger.debug(f"accept alpha={alpha:.3g} metric={current:.6f}")
                alpha *= 1.5
                accepted = True
                break
            alpha /= 2.0
        if not accepted or gain < cfg.convergence_tol:
            break

    return params, history, iterations


def register(
    moving: Volume,
    fixed: Volume,
    cfg: RegistrationConfig,
    initial: Affine3 | None = None,
) -> RegistrationResult:
    """
    Estimate the transform mapping `moving` physical points onto `fixed`.

    Raises:
        NoOverlap: initial overlap below cfg.min_overlap of the fixed grid
        DegenerateVariance: constant images under NCC
    """
    center = fixed.center_mm
    params = (
        affine_to_params(initial, center) if initial is not None else np.zeros(N_PARAMS)
    )
    start = params_to_affine(params, center)
    overlap = overlap_fraction(moving, fixed, start)
    if overlap < cfg.min_overlap:
        raise NoOverlap(
            f"Initial overlap {overlap:.1%} is below {cfg.min_overlap:.0%} of the fixed volume"
        )
    if cfg.metric is Metric.NCC:
        for name, vol in (("moving", moving), ("fixed", fixed)):
            if float(np.std(vol.data)) <= 1e-6:
                raise DegenerateVariance(f"{name} volume is constant")

    history: list[list[float]] = []
    total_iters = 0
    metric = -np.inf
    for factor in _pyramid_factors(fixed, cfg.pyramid_levels):
        level = _build_level(moving, fixed, factor)
        objective = _Objective(level, center, cfg.metric)
        params, level_history, iters = _optimize_level(objective, params, cfg)
        history.append(level_history)
        total_iters += iters
        metric = level_history[-1]
        logger.info(
            f"Registration level x{factor}: metric {level_history[0]:.4f} -> {metric:.4f} "
            f"in {iters} iterations"
        )

    return RegistrationResult(
        transform=params_to_affine(params, center),
        metric=float(metric),
        history=history,
        iterations=total_iters,
    )


def register_affine(moving: Volume, fixed: Volume, cfg: RegistrationConfig) -> Affine3:
    """Physical transform T (moving -> fixed) maximizing similarity."""
    return register(moving, fixed, cfg).transform
