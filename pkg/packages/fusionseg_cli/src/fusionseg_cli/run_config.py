"""
Run configuration.

One document with a section per module config, loaded from YAML or JSON.
Command-line flags override individual fields after loading.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from fusionseg_core.constants import SETUP_CHANNELS, Setup
from fusionseg_core.exceptions import InvalidConfig, IoError, MissingFile, SchemaError
from fusionseg_lesioneval import EvaluationConfig
from fusionseg_phantom import PhantomConfig
from fusionseg_pipeline import InferenceConfig, TrainConfig
from fusionseg_preprocess import PreprocessConfig
from fusionseg_register import RegistrationConfig
from fusionseg_unet import UNetConfig

LOCK_NAME = "config.lock.json"


class RunConfig(BaseModel):
    """
    Every module configuration in one place; all fields default.

    Example:
        >>> cfg = RunConfig.model_validate({"train": {"epochs": 2}})
        >>> cfg.train.epochs, cfg.evaluation.min_dice
        (2, 0.1)
    """

    model_config = ConfigDict(extra="forbid")

    phantom: PhantomConfig = Field(default_factory=PhantomConfig)
    preprocess: PreprocessConfig = Field(default_factory=PreprocessConfig)
    registration: RegistrationConfig = Field(default_factory=RegistrationConfig)
    unet: UNetConfig = Field(default_factory=UNetConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    inference: InferenceConfig = Field(default_factory=InferenceConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)

    def override(self, section: str, **values: Any) -> RunConfig:
        """
        Return a copy with fields of one section replaced; None values are ignored.

        Raises:
            InvalidConfig: the overridden section does not validate
        """
        changes = {k: v for k, v in values.items() if v is not None}
        if not changes:
            return self
        current: BaseModel = getattr(self, section)
        try:
            updated = type(current).model_validate({**current.model_dump(), **changes})
        except ValidationError as e:
            raise InvalidConfig(f"Invalid override for '{section}': {e}") from e
        return self.model_copy(update={section: updated})

    def with_setup(self, setup: Setup | None) -> RunConfig:
        """Select the input setup; the UNet input channel count follows it."""
        chosen = setup or self.train.setup
        cfg = self.override("train", setup=chosen)
        return cfg.override("unet", in_channels=len(SETUP_CHANNELS[chosen]))


def load_run_config(config_data: dict[str, Any]) -> RunConfig:
    """
    Raises:
        InvalidConfig: unknown keys or invalid values
    """
    try:
        return RunConfig.model_validate(config_data)
    except ValidationError as e:
        raise InvalidConfig(f"Invalid run configuration: {e}") from e


def load_run_config_from_file(file_path: Path | str) -> RunConfig:
    """
    Load a RunConfig from YAML or JSON.

    Raises:
        MissingFile: file does not exist
        SchemaError: unparseable file or unsupported suffix
        InvalidConfig: unknown keys or invalid values

    Example:
        >>> cfg = load_run_config_from_file("run.yaml")
    """
    path = Path(file_path)
    if not path.exists():
        raise MissingFile(path, "Run config file")

    content = path.read_text(encoding="utf-8")
    suffix = path.suffix.lower()
    if suffix in (".yaml", ".yml"):
        try:
            config_data = yaml.safe_load(content)
        except yaml.YAMLError as e:
            raise SchemaError(f"Invalid YAML in {path}: {e}") from e
    elif suffix == ".json":
        try:
            config_data = json.loads(content)
        except json.JSONDecodeError as e:
            raise SchemaError(f"Invalid JSON in {path}: {e}") from e
    else:
        raise SchemaError(f"Unsupported file format: {suffix}. Use .yaml, .yml, or .json")

    if config_data is None:
        config_data = {}
    if not isinstance(config_data, dict):
        raise SchemaError(f"Run config in {path} must be a mapping")
    return load_run_config(config_data)


def write_config_lock(cfg: RunConfig, directory: Path) -> Path:
    """Write the effective configuration as config.lock.json."""
    path = directory / LOCK_NAME
    try:
        path.write_text(
            json.dumps(cfg.model_dump(mode="json"), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    except OSError as e:
        raise IoError(f"Cannot write {path}: {e}") from e
    return path
