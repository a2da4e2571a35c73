"""
Registration configuration with Pydantic validation.

Defaults: 3 pyramid levels (factor 2), NCC, 200 iterations per level,
parameter steps rotation 1e-3 rad, translation 0.1 mm, log-scale 1e-3,
shear 1e-3.
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class Metric(str, Enum):
    """Similarity objective"""
    NCC = "ncc"
    MSE = "mse"


class RegistrationConfig(BaseModel):
    """
    Multi-resolution affine registration settings.

    Example:
        >>> cfg = RegistrationConfig(pyramid_levels=2, max_iters=50)
        >>> cfg.metric
        <Metric.NCC: 'ncc'>
    """

    model_config = ConfigDict(extra="forbid")

    pyramid_levels: int = Field(default=3, ge=1, le=6, description="Levels, downsample x2 each")
    metric: Metric = Field(default=Metric.NCC)
    max_iters: int = Field(default=200, ge=1, description="Iterations per pyramid level")
    rotation_step: float = Field(default=1e-3, gt=0, description="rad")
    translation_step: float = Field(default=1e-1, gt=0, description="mm")
    scale_step: float = Field(default=1e-3, gt=0, description="log-scale units")
    shear_step: float = Field(default=1e-3, gt=0)
    convergence_tol: float = Field(default=1e-6, gt=0, description="Minimum metric gain")
    initial_alpha: float = Field(
        default=10.0, gt=0, description="Initial line-search length in step units"
    )
    min_alpha: float = Field(default=1e-2, gt=0, description="Line search gives up below this")
    min_overlap: float = Field(default=0.1, gt=0, le=1, description="Required initial overlap")

    def parameter_steps(self) -> tuple[float, ...]:
        """Per-parameter finite-difference steps in parameter order."""
        return (
            (self.translation_step,) * 3
            + (self.rotation_step,) * 3
            + (self.scale_step,) * 3
            + (self.shear_step,) * 3
        )
