"""
Lesion evaluation package.

Connected components, one-to-one lesion matching, sextant negatives,
detection metrics (sensitivity, specificity, NPV, ROC, PR), Dice variants
and the TP/FN failure analysis.
"""

from fusionseg_lesioneval.config import EvaluationConfig
from fusionseg_lesioneval.outputs import (
    EvaluationSummary,
    load_summary,
    write_case_csv,
    write_curve_csv,
    write_lesion_csv,
    write_summary,
)
from fusionseg_lesioneval.lesions import (
    Lesion,
    LesionSet,
    binarize,
    connected_components,
    lesion_score,
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
    roc_auc_trapezoid,
    roc_curve,
)
from fusionseg_lesioneval.plots import render_svg_curves
from fusionseg_lesioneval.report import (
    CaseResult,
    CaseRow,
    CohortReport,
    FailureStats,
    LesionRow,
    aggregate_report,
    case_metrics,
    evaluate_case,
    min_gg_for,
    reports_by_cohort,
)
from fusionseg_lesioneval.sextants import SEXTANT_NAMES, sextant_partition
from fusionseg_lesioneval.stats import bootstrap_median_ci, welch_t

__all__ = [
    "EvaluationConfig",
    "EvaluationSummary",
    "load_summary",
    "write_case_csv",
    "write_curve_csv",
    "write_lesion_csv",
    "write_summary",
    "Lesion",
    "LesionSet",
    "binarize",
    "connected_components",
    "lesion_score",
    "lesions_from_labels",
    "volume_to_diameter",
    "with_scores",
    "MatchResult",
    "match_lesions",
    "ScoredUnit",
    "dice",
    "pr_auc",
    "pr_curve",
    "roc_auc",
    "roc_auc_trapezoid",
    "roc_curve",
    "render_svg_curves",
    "CaseResult",
    "CaseRow",
    "CohortReport",
    "FailureStats",
    "LesionRow",
    "aggregate_report",
    "case_metrics",
    "evaluate_case",
    "min_gg_for",
    "reports_by_cohort",
    "SEXTANT_NAMES",
    "sextant_partition",
    "bootstrap_median_ci",
    "welch_t",
]
