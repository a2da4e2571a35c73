"""Shared subcommand plumbing: stage error handling, output directories, worker pools."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Iterator
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import TypeVar

import click
from pydantic import ValidationError

from fusionseg_core.exceptions import (
    EmptyCohort,
    FusionSegError,
    FusionSegValidationError,
    OutputExists,
)
from fusionseg_volume import MultimodalStudy, StudyManifest, load_manifest, load_study

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

T = TypeVar("T")
R = TypeVar("R")


@contextmanager
def stage(ctx: click.Context, name: str) -> Iterator[None]:
    """
    Run a subcommand stage, mapping failures to exit codes.

    Validation errors exit 1; failures during computation exit 2.
    """
    formatter = ctx.obj["formatter"]
    try:
        yield
    except (FusionSegValidationError, ValidationError) as e:
        formatter.error(f"{name}: invalid input", str(e))
        ctx.exit(EXIT_VALIDATION)
    except (FusionSegError, OSError) as e:
        formatter.error(f"{name}: failed", str(e))
        ctx.exit(EXIT_RUNTIME)


def prepare_output_dir(path: Path, force: bool) -> Path:
    """
    Create `path`; refuse a non-empty directory unless `force`.

    Raises:
        OutputExists
    """
    if path.exists() and any(path.iterdir()) and not force:
        raise OutputExists(f"Output directory {path} is not empty (use --force to overwrite)")
    path.mkdir(parents=True, exist_ok=True)
    return path


def parallel_map(fn: Callable[[T], R], items: Iterable[T], jobs: int) -> list[R]:
    """Map in input order; jobs > 1 uses a thread pool."""
    if jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def select_split(entries: list[StudyManifest], split: str) -> list[StudyManifest]:
    """
    Raises:
        EmptyCohort: no entry in the requested split
    """
    chosen = entries if split == "all" else [e for e in entries if e.split == split]
    if not chosen:
        raise EmptyCohort(f"No studies with split '{split}' in the manifest")
    return chosen


def load_studies(manifest: Path, split: str, jobs: int) -> list[MultimodalStudy]:
    entries = select_split(load_manifest(manifest), split)
    studies = parallel_map(load_study, entries, jobs)
    logger.info(f"Loaded {len(studies)} studies ({split}) from {manifest}")
    return studies
