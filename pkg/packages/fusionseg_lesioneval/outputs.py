"""
Evaluation output files: per-case CSV, lesion table CSV, curve CSVs and the
aggregate JSON consumed by the comparison report.
"""

from __future__ import annotations

import csv
import json
from collections.abc import Sequence
from pathlib import Path

from pydantic import BaseModel, ConfigDict, ValidationError

from fusionseg_core.exceptions import IoError, MissingFile, SchemaError
from fusionseg_lesioneval.config import EvaluationConfig
from fusionseg_lesioneval.report import CaseRow, CohortReport, LesionRow

CASE_COLUMNS = list(CaseRow.model_fields)
LESION_COLUMNS = list(LesionRow.model_fields)


class EvaluationSummary(BaseModel):
    """Aggregate JSON document: one setup, its settings and its cohort reports."""

    model_config = ConfigDict(extra="forbid")

    setup: str | None = None
    config: EvaluationConfig
    reports: list[CohortReport]

    def average(self) -> CohortReport:
        for report in self.reports:
            if report.cohort == "Average":
                return report
        return self.reports[-1]


def _csv_value(value: object) -> object:
    return "" if value is None else value


def _write_rows(path: Path, columns: Sequence[str], rows: Sequence[dict[str, object]]) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=list(columns))
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _csv_value(row[k]) for k in columns})
    except OSError as e:
        raise IoError(f"Cannot write {path}: {e}") from e


def write_case_csv(rows: Sequence[CaseRow], path: Path) -> None:
    """One row per case; undefined rates are left blank."""
    _write_rows(path, CASE_COLUMNS, [r.model_dump() for r in rows])


def write_lesion_csv(rows: Sequence[LesionRow], path: Path) -> None:
    _write_rows(path, LESION_COLUMNS, [r.model_dump() for r in rows])


def write_curve_csv(
    points: Sequence[tuple[float, float]], path: Path, columns: tuple[str, str]
) -> None:
    _write_rows(path, columns, [dict(zip(columns, p)) for p in points])


def write_summary(summary: EvaluationSummary, path: Path) -> None:
    try:
        path.write_text(
            json.dumps(summary.model_dump(mode="json"), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    except OSError as e:
        raise IoError(f"Cannot write {path}: {e}") from e


def load_summary(path: Path) -> EvaluationSummary:
    """
    Raises:
        MissingFile: path does not exist
        SchemaError: not a valid aggregate document
    """
    if not path.exists():
        raise MissingFile(path, "Evaluation summary")
    try:
        return EvaluationSummary.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise SchemaError(f"Invalid evaluation summary {path}: {e}") from e
