"""
Training and inference configuration.

Patch sizes are (D, H, W) voxels, i.e. (z, y, x), matching the
(nz, ny, nx) array layout of Volume.
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fusionseg_core.constants import HEAD_LABELS, Setup

PatchSize = tuple[int, int, int]
Axis = Literal["x", "y", "z"]


def _check_patch(v: PatchSize) -> PatchSize:
    if any(d < 1 for d in v):
        raise ValueError(f"Patch dims must be positive, got {v}")
    return v


class TrainConfig(BaseModel):
    """
    Training loop settings.

    Example:
        >>> cfg = TrainConfig(setup="multimodal", patch_size=(8, 32, 32), epochs=2)
        >>> cfg.augment_flips
        (True, False, False)
    """

    model_config = ConfigDict(extra="forbid")

    setup: Setup = Setup.MULTIMODAL
    patch_size: PatchSize = Field(default=(16, 64, 64), description="(D, H, W) voxels")
    batch_size: int = Field(default=2, ge=1)
    fg_oversample: float = Field(default=0.33, ge=0.0, le=1.0)
    epochs: int = Field(default=10, ge=1)
    steps_per_epoch: int = Field(default=50, ge=1)
    seed: int = 0
    learning_rate: float = Field(default=1e-3, gt=0)
    augment_flips: tuple[bool, bool, bool] = Field(
        default=(True, False, False), description="Random flips per (x, y, z) axis"
    )
    flip_probability: float = Field(default=0.5, ge=0.0, le=1.0)
    label_weights: tuple[float, ...] = Field(default=(1.0, 1.0, 1.0))
    bce_weight: float = Field(default=1.0, ge=0.0)
    dice_weight: float = Field(default=1.0, ge=0.0)
    validate_each_epoch: bool = Field(
        default=False, description="Log combined loss on validation studies after each epoch"
    )

    @field_validator("patch_size")
    @classmethod
    def validate_patch(cls, v: PatchSize) -> PatchSize:
        return _check_patch(v)

    @field_validator("label_weights")
    @classmethod
    def validate_weights(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if len(v) != len(HEAD_LABELS) or any(w < 0 for w in v) or sum(v) <= 0:
            raise ValueError(
                f"label_weights needs {len(HEAD_LABELS)} non-negative values with a positive sum"
            )
        return v


class InferenceConfig(BaseModel):
    """Sliding-window inference settings."""

    model_config = ConfigDict(extra="forbid")

    patch_size: PatchSize = Field(default=(16, 64, 64), description="(D, H, W) voxels")
    overlap: float = Field(default=0.5, ge=0.0, le=0.9)
    sigma_scale: float = Field(default=1.0 / 8.0, gt=0, description="Gaussian sigma / patch")
    thresholds: dict[str, float] = Field(
        default_factory=lambda: {label: 0.5 for label in HEAD_LABELS}
    )
    mirror_axes: tuple[Axis, ...] = Field(
        default=(), description="Average predictions over flips of these axes"
    )

    @field_validator("patch_size")
    @classmethod
    def validate_patch(cls, v: PatchSize) -> PatchSize:
        return _check_patch(v)

    @model_validator(mode="after")
    def validate_thresholds(self) -> "InferenceConfig":
        for label, value in self.thresholds.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"Threshold for {label} must be in [0, 1], got {value}")
        return self

    def threshold(self, label: str) -> float:
        return self.thresholds.get(label, 0.5)
