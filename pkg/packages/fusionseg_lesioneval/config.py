"""Evaluation configuration."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class EvaluationConfig(BaseModel):
    """
    Lesion-level evaluation settings.

    Example:
        >>> cfg = EvaluationConfig(min_dice=0.2)
        >>> cfg.connectivity
        26
    """

    model_config = ConfigDict(extra="forbid")

    threshold: float = Field(default=0.5, ge=0.0, le=1.0, description="Binarization threshold")
    connectivity: Literal[6, 26] = 26
    min_dice: float = Field(default=0.1, ge=0.0, le=1.0, description="Lesion hit criterion")
    label: str = Field(default="cspca", description="Head whose probability map is evaluated")
    bootstrap_resamples: int = Field(default=2000, ge=1)
    ci_level: float = Field(default=0.90, gt=0.0, lt=1.0)
    bootstrap_seed: int = 0
    clinical_volume_threshold_mm3: float = Field(default=500.0, gt=0.0)
