"""
Per-case evaluation and cohort aggregation.

Rates are pooled over units (lesions for sensitivity, sextants for
specificity and NPV); Dice scores are averaged over cases. Undefined
quantities (for example sensitivity without any ground-truth lesion) are
None rather than a placeholder number.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field

from fusionseg_core.constants import ANY_CANCER_MIN_GG, CSPCA_MIN_GG, MAX_GG
from fusionseg_core.exceptions import DegenerateClasses, EmptyCohort, InvalidConfig, TooFewSamples
from fusionseg_lesioneval.config import EvaluationConfig
from fusionseg_lesioneval.lesions import (
    LesionSet,
    binarize,
    connected_components,
    lesions_from_labels,
    volume_to_diameter,
    with_scores,
)
from fusionseg_lesioneval.matching import MatchResult, match_lesions
from fusionseg_lesioneval.metrics import (
    ScoredUnit,
    dice,
    pr_auc,
    pr_curve,
    roc_auc,
    roc_curve,
    safe_rate,
)
from fusionseg_lesioneval.sextants import sextant_partition
from fusionseg_lesioneval.stats import bootstrap_median_ci, welch_t
from fusionseg_volume import MultimodalStudy, Volume, require_same_grid

logger = logging.getLogger(__name__)

LABEL_MIN_GG = {"any_cancer": ANY_CANCER_MIN_GG, "cspca": CSPCA_MIN_GG}
HISTOGRAM_GGS = tuple(range(CSPCA_MIN_GG, MAX_GG + 1))


class CaseRow(BaseModel):
    """One row of the per-case CSV."""

    study_id: str
    cohort: str = "default"
    tp: int = 0
    fn: int = 0
    fp: int = 0
    tn_sextants: int = 0
    fp_sextants: int = 0
    fn_sextants: int = 0
    sensitivity: float | None = None
    specificity: float | None = None
    npv: float | None = None
    overall_dice: float = 0.0
    lesion_dice: float | None = None


class LesionRow(BaseModel):
    """One row of the lesion table."""

    study_id: str
    id: int
    volume_mm3: float
    diameter_mm: float
    gg: int | None = None
    score: float = 0.0
    status: Literal["TP", "FN", "FP"]


@dataclass(frozen=True)
class CaseResult:
    row: CaseRow
    units: list[ScoredUnit] = field(default_factory=list)
    lesions: list[LesionRow] = field(default_factory=list)


class VolumeSummary(BaseModel):
    count: int
    median_mm3: float
    ci_low_mm3: float
    ci_high_mm3: float
    median_diameter_mm: float


class WelchResult(BaseModel):
    t: float
    dof: float
    p: float


class FailureStats(BaseModel):
    """TP vs FN lesion statistics."""

    tp_volume: VolumeSummary | None = None
    fn_volume: VolumeSummary | None = None
    gg_histogram_tp: dict[str, int] = Field(default_factory=dict)
    gg_histogram_fn: dict[str, int] = Field(default_factory=dict)
    welch_log_volume: WelchResult | None = None
    fn_fraction_gg_above_2: float | None = None
    fn_fraction_gg_above_3: float | None = None
    fn_fraction_below_volume_threshold: float | None = None


class CohortReport(BaseModel):
    """Aggregate metrics for one (setup, cohort)."""

    setup: str | None = None
    cohort: str = "all"
    n_cases: int
    tp: int
    fn: int
    fp: int
    tn_sextants: int
    fp_sextants: int
    fn_sextants: int
    sensitivity: float | None = None
    specificity: float | None = None
    npv: float | None = None
    overall_dice: float | None = None
    lesion_dice: float | None = None
    roc_auc: float | None = None
    pr_auc: float | None = None
    roc_points: list[tuple[float, float]] = Field(default_factory=list)
    pr_points: list[tuple[float, float]] = Field(default_factory=list)
    failure: FailureStats = Field(default_factory=FailureStats)


def min_gg_for(label: str) -> int:
    if label not in LABEL_MIN_GG:
        raise InvalidConfig(f"Lesion evaluation supports {sorted(LABEL_MIN_GG)}, got '{label}'")
    return LABEL_MIN_GG[label]


def case_metrics(
    study_id: str,
    gt: LesionSet,
    pred: LesionSet,
    match: MatchResult,
    prob: Volume,
    sextants: Sequence[NDArray[np.bool_]],
    cohort: str = "default",
) -> tuple[CaseRow, list[ScoredUnit]]:
    """
    Lesion counts, sextant counts, Dice scores and scored units for one case.

    Raises:
        GridMismatch
    """
    require_same_grid(gt.grid, pred.grid, "ground truth and prediction")
    require_same_grid(gt.grid, prob, "ground truth and probability map")
    gt_mask = gt.mask()
    pred_mask = pred.mask()

    tn = fp_s = fn_s = 0
    units: list[ScoredUnit] = []
    for region in sextants:
        if not region.any():
            continue
        positive = bool(np.any(gt_mask & region))
        predicted = bool(np.any(pred_mask & region))
        if positive:
            fn_s += int(not predicted)
            continue
        if predicted:
            fp_s += 1
        else:
            tn += 1
        units.append((float(prob.data[region].max()), False))

    pred_scores = {les.id: les.score or 0.0 for les in pred}
    for les in gt:
        matched = match.pred_for(les.id)
        units.append((pred_scores[matched] if matched is not None else 0.0, True))

    overall = dice(pred_mask, gt_mask)
    row = CaseRow(
        study_id=study_id,
        cohort=cohort,
        tp=match.tp,
        fn=match.fn,
        fp=match.fp,
        tn_sextants=tn,
        fp_sextants=fp_s,
        fn_sextants=fn_s,
        sensitivity=safe_rate(match.tp, match.tp + match.fn),
        specificity=safe_rate(tn, tn + fp_s),
        npv=safe_rate(tn, tn + fn_s),
        overall_dice=overall,
        lesion_dice=overall if match.tp > 0 else None,
    )
    return row, units


def lesion_rows(
    study_id: str, gt: LesionSet, pred: LesionSet, match: MatchResult
) -> list[LesionRow]:
    pred_by_id = pred.by_id()
    rows = []
    for les in gt:
        matched = match.pred_for(les.id)
        score = (pred_by_id[matched].score or 0.0) if matched is not None else 0.0
        rows.append(
            LesionRow(
                study_id=study_id,
                id=les.id,
                volume_mm3=les.volume_mm3,
                diameter_mm=les.diameter_mm,
                gg=les.gg,
                score=score,
                status="TP" if matched is not None else "FN",
            )
        )
    for pred_id in match.fp_ids:
        les = pred_by_id[pred_id]
        rows.append(
            LesionRow(
                study_id=study_id,
                id=les.id,
                volume_mm3=les.volume_mm3,
                diameter_mm=les.diameter_mm,
                score=les.score or 0.0,
                status="FP",
            )
        )
    return rows


def evaluate_case(study: MultimodalStudy, prob: Volume, cfg: EvaluationConfig) -> CaseResult:
    """
    Binarize, extract components, match, partition sextants and score one case.

    `prob` is the evaluated head's probability map on the TRUS grid.
    """
    gt = lesions_from_labels(study.lesion_labels, study.lesion_gg, min_gg_for(cfg.label))
    pred = with_scores(connected_components(binarize(prob, cfg.threshold), cfg.connectivity), prob)
    match = match_lesions(gt, pred, cfg.min_dice)
    sextants = sextant_partition(study.gland_mask)
    row, units = case_metrics(study.study_id, gt, pred, match, prob, sextants, study.cohort)
    logger.debug(
        f"{study.study_id}: TP={row.tp} FN={row.fn} FP={row.fp} dice={row.overall_dice:.3f}"
    )
    return CaseResult(row, units, lesion_rows(study.study_id, gt, pred, match))


def _volume_summary(volumes: list[float], cfg: EvaluationConfig) -> VolumeSummary | None:
    ci = bootstrap_median_ci(volumes, cfg.ci_level, cfg.bootstrap_resamples, cfg.bootstrap_seed)
    if ci is None:
        return None
    median, lo, hi = ci
    return VolumeSummary(
        count=len(volumes),
        median_mm3=median,
        ci_low_mm3=lo,
        ci_high_mm3=hi,
        median_diameter_mm=volume_to_diameter(median),
    )


def _gg_histogram(rows: list[LesionRow]) -> dict[str, int]:
    return {str(gg): sum(1 for r in rows if r.gg == gg) for gg in HISTOGRAM_GGS}


def failure_stats(lesions: list[LesionRow], cfg: EvaluationConfig) -> FailureStats:
    tp = [r for r in lesions if r.status == "TP"]
    fn = [r for r in lesions if r.status == "FN"]
    welch = None
    try:
        t, dof, p = welch_t(
            np.log([r.volume_mm3 for r in tp]), np.log([r.volume_mm3 for r in fn])
        )
        welch = WelchResult(t=t, dof=dof, p=p)
    except TooFewSamples:
        pass

    def fn_fraction(predicate) -> float | None:  # type: ignore[no-untyped-def]
        return sum(1 for r in fn if predicate(r)) / len(fn) if fn else None

    return FailureStats(
        tp_volume=_volume_summary([r.volume_mm3 for r in tp], cfg),
        fn_volume=_volume_summary([r.volume_mm3 for r in fn], cfg),
        gg_histogram_tp=_gg_histogram(tp),
        gg_histogram_fn=_gg_histogram(fn),
        welch_log_volume=welch,
        fn_fraction_gg_above_2=fn_fraction(lambda r: (r.gg or 0) > 2),
        fn_fraction_gg_above_3=fn_fraction(lambda r: (r.gg or 0) > 3),
        fn_fraction_below_volume_threshold=fn_fraction(
            lambda r: r.volume_mm3 < cfg.clinical_volume_threshold_mm3
        ),
    )


def pooled_units(cases: Sequence[CaseResult]) -> list[ScoredUnit]:
    return [unit for case in cases for unit in case.units]


def aggregate_report(
    cases: Sequence[CaseResult],
    cfg: EvaluationConfig,
    setup: str | None = None,
    cohort: str = "all",
) -> CohortReport:
    """
    Pool per-case results into cohort metrics and failure statistics.

    Raises:
        EmptyCohort
    """
    if not cases:
        raise EmptyCohort(f"No cases to aggregate for cohort '{cohort}'")
    rows = [c.row for c in cases]
    tp = sum(r.tp for r in rows)
    fn = sum(r.fn for r in rows)
    tn = sum(r.tn_sextants for r in rows)
    fp_s = sum(r.fp_sextants for r in rows)
    fn_s = sum(r.fn_sextants for r in rows)

    units = pooled_units(cases)
    auc: float | None = None
    ap: float | None = None
    roc_points: list[tuple[float, float]] = []
    pr_points: list[tuple[float, float]] = []
    try:
        auc = roc_auc(units)
        roc_points = roc_curve(units)
    except DegenerateClasses:
        logger.warning(f"Cohort '{cohort}': ROC undefined without both unit classes")
    try:
        ap = pr_auc(units)
        pr_points = pr_curve(units)
    except DegenerateClasses:
        logger.warning(f"Cohort '{cohort}': PR undefined without positive units")

    lesion_dices = [r.lesion_dice for r in rows if r.lesion_dice is not None]
    return CohortReport(
        setup=setup,
        cohort=cohort,
        n_cases=len(rows),
        tp=tp,
        fn=fn,
        fp=sum(r.fp for r in rows),
        tn_sextants=tn,
        fp_sextants=fp_s,
        fn_sextants=fn_s,
        sensitivity=safe_rate(tp, tp + fn),
        specificity=safe_rate(tn, tn + fp_s),
        npv=safe_rate(tn, tn + fn_s),
        overall_dice=float(np.mean([r.overall_dice for r in rows])),
        lesion_dice=float(np.mean(lesion_dices)) if lesion_dices else None,
        roc_auc=auc,
        pr_auc=ap,
        roc_points=roc_points,
        pr_points=pr_points,
        failure=failure_stats([les for c in cases for les in c.lesions], cfg),
    )


def reports_by_cohort(
    cases: Sequence[CaseResult], cfg: EvaluationConfig, setup: str | None = None
) -> list[CohortReport]:
    """One report per cohort tag (first-seen order) followed by the pooled "Average" report."""
    cohorts: dict[str, list[CaseResult]] = {}
    for case in cases:
        cohorts.setdefault(case.row.cohort, []).append(case)
    reports = [aggregate_report(group, cfg, setup, name) for name, group in cohorts.items()]
    reports.append(aggregate_report(cases, cfg, setup, "Average"))
    return reports
