"""
Study manifest models and loader.

A manifest file is a JSON array of study objects (a single object is also
accepted). Relative paths resolve against the manifest's directory.

Example entry:
    {"study_id": "ph000", "t2w": "ph000/t2w.nii", "adc": "ph000/adc.nii",
     "dwi": "ph000/dwi.nii", "trus": "ph000/trus.nii", "gland": "ph000/gland.nii",
     "lesions": "ph000/lesions.nii", "lesion_gg": {"1": 3},
     "mri_to_trus": "ph000/mri_to_trus.json", "split": "train"}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from fusionseg_core.constants import MAX_GG
from fusionseg_core.exceptions import IoError, MissingFile, SchemaError

Split = Literal["train", "val", "test"]

PATH_FIELDS = ("t2w", "adc", "dwi", "trus", "gland", "lesions")


class StudyManifest(BaseModel):
    """
    File references for one study.

    Example:
        >>> entry = StudyManifest(
        ...     study_id="ph000", t2w="t2w.nii", adc="adc.nii", dwi="dwi.nii",
        ...     trus="trus.nii", gland="gland.nii", lesions="lesions.nii",
        ...     lesion_gg={1: 3}, split="test",
        ... )
    """

    model_config = ConfigDict(extra="forbid")

    study_id: str = Field(..., min_length=1, description="Unique study identifier")
    t2w: Path
    adc: Path
    dwi: Path
    trus: Path
    gland: Path
    lesions: Path
    lesion_gg: dict[int, int] = Field(
        default_factory=dict, description="Lesion id -> grade group (1-5)"
    )
    mri_to_trus: Path | None = Field(default=None, description="Affine3 JSON, MRI -> TRUS mm")
    phantom_truth: Path | None = Field(
        default=None, description="Synthesis transform of phantom studies"
    )
    split: Split = "train"
    cohort: str = Field(default="default", min_length=1, description="Report grouping tag")

    @field_validator("lesion_gg")
    @classmethod
    def validate_gg(cls, v: dict[int, int]) -> dict[int, int]:
        """Ensure lesion ids are positive and grade groups are 1-5"""
        for lesion_id, gg in v.items():
            if lesion_id < 1:
                raise ValueError(f"Lesion ids must be >= 1, got {lesion_id}")
            if not 1 <= gg <= MAX_GG:
                raise ValueError(f"Grade group for lesion {lesion_id} must be 1-{MAX_GG}: {gg}")
        return v

    def resolved(self, base: Path) -> StudyManifest:
        """Copy with relative paths anchored at `base`."""
        updates: dict[str, Any] = {}
        for name in (*PATH_FIELDS, "mri_to_trus", "phantom_truth"):
            value = getattr(self, name)
            if value is not None and not value.is_absolute():
                updates[name] = base / value
        return self.model_copy(update=updates)

    def referenced_paths(self) -> dict[str, Path]:
        paths = {name: getattr(self, name) for name in PATH_FIELDS}
        for name in ("mri_to_trus", "phantom_truth"):
            if getattr(self, name) is not None:
                paths[name] = getattr(self, name)
        return paths

    def to_json_dict(self, relative_to: Path | None = None) -> dict[str, Any]:
        data = self.model_dump(mode="json")
        data["lesion_gg"] = {str(k): v for k, v in self.lesion_gg.items()}
        if relative_to is not None:
            for name, path in self.referenced_paths().items():
                try:
                    data[name] = str(path.relative_to(relative_to))
                except ValueError:
                    data[name] = str(path.resolve())
        return data


def check_paths_exist(entry: StudyManifest) -> None:
    """Raise MissingFile for the first referenced path that does not exist."""
    for name, path in entry.referenced_paths().items():
        if not path.exists():
            raise MissingFile(path, f"{entry.study_id} {name}")


def load_manifest(path: Path | str) -> list[StudyManifest]:
    """
    Load and validate a study manifest file.

    Args:
        path: JSON manifest (array of study objects or a single object)

    Returns:
        Manifest entries in file order with paths resolved

    Raises:
        MissingFile: manifest or any referenced file does not exist
        SchemaError: JSON invalid, schema violated, or duplicate study ids
    """
    p = Path(path)
    if not p.exists():
        raise MissingFile(p, "manifest")

    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(f"Invalid JSON in {p}: {e}") from e

    items = [raw] if isinstance(raw, dict) else raw
    if not isinstance(items, list):
        raise SchemaError(f"Manifest must be an object or an array, got {type(raw).__name__}")

    entries: list[StudyManifest] = []
    seen: set[str] = set()
    for index, item in enumerate(items):
        if not isinstance(item, dict):
            raise SchemaError(f"Manifest entry {index} must be an object")
        try:
            entry = StudyManifest(**item).resolved(p.resolve().parent)
        except ValidationError as e:
            raise SchemaError(f"Manifest entry {index} in {p}: {e}") from e
        if entry.study_id in seen:
            raise SchemaError(f"Duplicate study_id '{entry.study_id}' in {p}")
        seen.add(entry.study_id)
        check_paths_exist(entry)
        entries.append(entry)
    return entries


def write_manifest(entries: list[StudyManifest], path: Path | str) -> None:
    """Write manifest entries as a JSON array with paths relative to the file."""
    p = Path(path)
    data = [entry.to_json_dict(relative_to=p.parent.resolve()) for entry in entries]
    try:
        p.write_text(json.dumps(data, indent=2), encoding="utf-8")
    except OSError as e:
        raise IoError(f"Cannot write manifest {p}: {e}") from e
