"""UNet architecture configuration."""

from pydantic import BaseModel, ConfigDict, Field, field_validator

from fusionseg_core.constants import HEAD_LABELS

MAX_CHANNELS = 256


class UNetConfig(BaseModel):
    """
    3-D UNet shape.

    Stage s has min(base_channels * 2**s, 256) channels; every stage but the
    first starts with a stride-2 convolution.

    Example:
        >>> cfg = UNetConfig(in_channels=4, stages=3, base_channels=8)
        >>> cfg.stage_channels()
        [8, 16, 32]
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    in_channels: int = Field(default=4, ge=1, description="1 TRUS, 3 MRI, 4 multimodal")
    stages: int = Field(default=4, ge=2, le=8)
    base_channels: int = Field(default=16, ge=1, le=MAX_CHANNELS)
    kernel: int = Field(default=3, description="Convolution kernel edge")
    leaky_slope: float = Field(default=0.01, ge=0.0, lt=1.0)
    head_labels: tuple[str, ...] = Field(default=HEAD_LABELS)

    @field_validator("kernel")
    @classmethod
    def validate_kernel(cls, v: int) -> int:
        if v != 3:
            raise ValueError(f"Only 3x3x3 kernels are supported, got {v}")
        return v

    @field_validator("head_labels")
    @classmethod
    def validate_heads(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        if not v or len(set(v)) != len(v):
            raise ValueError(f"Head labels must be non-empty and unique: {v}")
        return v

    def stage_channels(self) -> list[int]:
        return [min(self.base_channels * 2**s, MAX_CHANNELS) for s in range(self.stages)]

    @property
    def size_multiple(self) -> int:
        """Patch dims must be divisible by this."""
        return int(2 ** (self.stages - 1))
