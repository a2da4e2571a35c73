"""Evaluate command - lesion-level metrics for one setup"""

from pathlib import Path

import click

from fusionseg_cli.commands.infer import SPLIT_CHOICE, prediction_path
from fusionseg_cli.commands.train import SETUP_CHOICE
from fusionseg_cli.run_config import write_config_lock
from fusionseg_cli.utils.runtime import load_studies, parallel_map, prepare_output_dir, stage
from fusionseg_lesioneval import (
    CaseResult,
    EvaluationSummary,
    evaluate_case,
    render_svg_curves,
    reports_by_cohort,
    write_case_csv,
    write_curve_csv,
    write_lesion_csv,
    write_summary,
)
from fusionseg_volume import MultimodalStudy, SpaceTag, nifti_read

SUMMARY_NAME = "evaluation.json"


@click.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--predictions", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path)
)
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--setup", type=SETUP_CHOICE, default=None, help="Setup name recorded in reports")
@click.option("--threshold", type=float, default=None, help="Overrides evaluation.threshold")
@click.option("--split", type=SPLIT_CHOICE, default="test", show_default=True)
@click.option("--force", is_flag=True, help="Write into a non-empty output directory")
@click.pass_context
def evaluate(
    ctx: click.Context,
    manifest: Path,
    predictions: Path,
    out_dir: Path,
    setup: str | None,
    threshold: float | None,
    split: str,
    force: bool,
) -> None:
    """Match predicted lesions against ground truth and aggregate metrics

    Writes cases.csv, lesions.csv, roc.csv, pr.csv, roc.svg, pr.svg and
    evaluation.json.

    Example:
        fusionseg evaluate runs/prep/manifest.json --predictions runs/pred-mm \\
            --setup multimodal --out runs/eval-mm
    """
    formatter = ctx.obj["formatter"]

    with stage(ctx, "evaluate"):
        cfg = ctx.obj["config"].override("evaluation", threshold=threshold)
        setup_name = setup or cfg.train.setup.value
        label = cfg.evaluation.label
        studies = load_studies(manifest, split, ctx.obj["jobs"])
        prepare_output_dir(out_dir, force or ctx.obj["force"])
        write_config_lock(cfg, out_dir)

        def run(study: MultimodalStudy) -> CaseResult:
            prob = nifti_read(prediction_path(predictions, study.study_id, label), SpaceTag.TRUS)
            return evaluate_case(study, prob, cfg.evaluation)

        cases = parallel_map(run, studies, ctx.obj["jobs"])
        reports = reports_by_cohort(cases, cfg.evaluation, setup_name)
        summary = EvaluationSummary(setup=setup_name, config=cfg.evaluation, reports=reports)
        average = summary.average()

        write_case_csv([c.row for c in cases], out_dir / "cases.csv")
        write_lesion_csv([les for c in cases for les in c.lesions], out_dir / "lesions.csv")
        write_curve_csv(average.roc_points, out_dir / "roc.csv", ("fpr", "tpr"))
        write_curve_csv(average.pr_points, out_dir / "pr.csv", ("recall", "precision"))
        (out_dir / "roc.svg").write_text(
            render_svg_curves({setup_name: average.roc_points}, "ROC", "FPR", "TPR"),
            encoding="utf-8",
        )
        (out_dir / "pr.svg").write_text(
            render_svg_curves(
                {setup_name: average.pr_points}, "Precision-recall", "Recall", "Precision"
            ),
            encoding="utf-8",
        )
        write_summary(summary, out_dir / SUMMARY_NAME)

        formatter.table(
            f"Evaluation ({setup_name})",
            ["cohort", "ROC", "PR", "sens", "spec", "NPV", "overall dice", "lesion dice"],
            [
                (
                    r.cohort,
                    r.roc_auc,
                    r.pr_auc,
                    r.sensitivity,
                    r.specificity,
                    r.npv,
                    r.overall_dice,
                    r.lesion_dice,
                )
                for r in reports
            ],
        )
        formatter.success(
            f"Evaluated {len(cases)} studies",
            {
                "summary": str(out_dir / SUMMARY_NAME),
                "sensitivity": average.sensitivity,
                "specificity": average.specificity,
                "npv": average.npv,
                "roc_auc": average.roc_auc,
                "pr_auc": average.pr_auc,
                "overall_dice": average.overall_dice,
                "lesion_dice": average.lesion_dice,
            },
        )
