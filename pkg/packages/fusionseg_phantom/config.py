"""Phantom cohort configuration."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fusionseg_core.constants import MRI_SPACING_MM, TRUS_SPACING_MM

Range = tuple[float, float]


def _check_range(name: str, lo: float, hi: float) -> None:
    if lo > hi:
        raise ValueError(f"{name}: lower bound {lo} exceeds upper bound {hi}")


class PhantomConfig(BaseModel):
    """
    Synthetic multimodal cohort.

    The TRUS grid is trus_dims (nx, ny, nz) at trus_spacing. MRI sequences
    cover the same physical box at mri_spacing and are carried onto TRUS
    space by a hidden rigid transform (the phantom truth).

    Example:
        >>> cfg = PhantomConfig(split_counts=(2, 0, 1), lesions_per_study=(1, 1))
        >>> cfg.study_count
        3
    """

    model_config = ConfigDict(extra="forbid")

    seed: int = 7
    split_counts: tuple[int, int, int] = Field(
        default=(24, 4, 12), description="(train, val, test) study counts"
    )
    n_studies: int | None = Field(
        default=None, ge=1, description="Defaults to sum(split_counts); extra studies are test"
    )
    cohort: str = Field(default="phantom", min_length=1)

    trus_dims: tuple[int, int, int] = Field(default=(96, 96, 48), description="(nx, ny, nz)")
    trus_spacing: tuple[float, float, float] = TRUS_SPACING_MM
    mri_spacing: tuple[float, float, float] = MRI_SPACING_MM

    gland_axes_mm: tuple[Range, Range, Range] = Field(
        default=((14.0, 18.0), (12.0, 15.0), (9.0, 10.5)),
        description="Semi-axis range per axis (x, y, z)",
    )
    boundary_perturbation: float = Field(default=0.06, ge=0.0, lt=0.5)
    lesions_per_study: tuple[int, int] = (0, 3)
    lesion_radius_mm: Range = (3.0, 8.0)
    min_lesion_gap_mm: float = Field(default=3.0, ge=0.0)
    visibility_mix: tuple[float, float, float] = Field(
        default=(0.3, 0.3, 0.4), description="(mri_only, trus_only, both) fractions"
    )

    trus_background: float = 0.3
    trus_lesion_drop: float = Field(default=0.5, gt=0.0, lt=1.0, description="Relative darkening")
    mri_background: float = 0.2
    mri_gland: tuple[float, float, float] = Field(
        default=(1.0, 1.0, 0.6), description="Gland tissue level (t2w, adc, dwi)"
    )
    mri_lesion_contrast: tuple[float, float, float] = Field(
        default=(-0.5, -0.6, 0.6), description="Additive lesion contrast (t2w, adc, dwi)"
    )
    noise_sd: float = Field(default=0.05, ge=0.0)
    speckle_sigma_vox: float = Field(default=1.0, gt=0.0)

    max_rotation_deg: float = Field(default=5.0, ge=0.0, le=45.0)
    max_translation_mm: float = Field(default=3.0, ge=0.0)
    identity_transform: bool = False

    @field_validator("trus_spacing", "mri_spacing")
    @classmethod
    def validate_spacing(cls, v: tuple[float, float, float]) -> tuple[float, float, float]:
        if any(s <= 0 for s in v):
            raise ValueError(f"Spacing must be positive, got {v}")
        return v

    @field_validator("trus_dims")
    @classmethod
    def validate_dims(cls, v: tuple[int, int, int]) -> tuple[int, int, int]:
        if any(n < 4 for n in v):
            raise ValueError(f"Phantom grid needs at least 4 voxels per axis, got {v}")
        return v

    @field_validator("split_counts")
    @classmethod
    def validate_splits(cls, v: tuple[int, int, int]) -> tuple[int, int, int]:
        if any(n < 0 for n in v) or sum(v) == 0:
            raise ValueError(f"Split counts must be non-negative with a positive total, got {v}")
        return v

    @field_validator("visibility_mix")
    @classmethod
    def validate_mix(cls, v: tuple[float, float, float]) -> tuple[float, float, float]:
        if any(f < 0 for f in v) or abs(sum(v) - 1.0) > 1e-6:
            raise ValueError(f"Visibility fractions must be non-negative and sum to 1, got {v}")
        return v

    @model_validator(mode="after")
    def validate_ranges(self) -> PhantomConfig:
        lo, hi = self.lesions_per_study
        if lo < 0:
            raise ValueError(f"lesions_per_study must be non-negative, got {lo}")
        _check_range("lesions_per_study", lo, hi)
        r_lo, r_hi = self.lesion_radius_mm
        if r_lo <= 0:
            raise ValueError(f"Lesion radius must be positive, got {r_lo}")
        _check_range("lesion_radius_mm", r_lo, r_hi)
        half_extent = [n * s / 2.0 for n, s in zip(self.trus_dims, self.trus_spacing)]
        for axis, ((a_lo, a_hi), half) in enumerate(zip(self.gland_axes_mm, half_extent)):
            _check_range(f"gland_axes_mm[{axis}]", a_lo, a_hi)
            if a_lo <= 0:
                raise ValueError(f"Gland semi-axis must be positive, got {a_lo}")
            if a_hi * (1.0 + self.boundary_perturbation) >= half:
                raise ValueError(
                    f"Gland semi-axis {a_hi} mm does not fit the {2 * half} mm grid on axis {axis}"
                )
        return self

    @property
    def study_count(self) -> int:
        return self.n_studies if self.n_studies is not None else sum(self.split_counts)
