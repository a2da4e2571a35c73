"""Report command - cross-setup comparison table and curve overlays"""

import csv
from pathlib import Path

import click

from fusionseg_cli.run_config import write_config_lock
from fusionseg_cli.utils.runtime import prepare_output_dir, stage
from fusionseg_core.exceptions import IoError
from fusionseg_lesioneval import EvaluationSummary, load_summary, render_svg_curves

COMPARISON_COLUMNS = [
    "setup",
    "cohort",
    "n_cases",
    "roc_auc",
    "pr_auc",
    "sensitivity",
    "specificity",
    "npv",
    "overall_dice",
    "lesion_dice",
]


def comparison_rows(summaries: list[tuple[str, EvaluationSummary]]) -> list[dict[str, object]]:
    """One row per (setup, cohort) including each setup's Average row."""
    rows = []
    for name, summary in summaries:
        for report in summary.reports:
            row = {k: getattr(report, k, None) for k in COMPARISON_COLUMNS}
            row["setup"] = name
            rows.append(row)
    return rows


def write_comparison_csv(rows: list[dict[str, object]], path: Path) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=COMPARISON_COLUMNS)
            writer.writeheader()
            for row in rows:
                writer.writerow({k: "" if row[k] is None else row[k] for k in COMPARISON_COLUMNS})
    except OSError as e:
        raise IoError(f"Cannot write {path}: {e}") from e


@click.command()
@click.argument(
    "evaluations",
    nargs=-1,
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--force", is_flag=True, help="Write into a non-empty output directory")
@click.pass_context
def report(ctx: click.Context, evaluations: tuple[Path, ...], out_dir: Path, force: bool) -> None:
    """Compare setups from their evaluation.json files

    Example:
        fusionseg report runs/eval-trus/evaluation.json runs/eval-mri/evaluation.json \\
            runs/eval-mm/evaluation.json --out runs/report
    """
    formatter = ctx.obj["formatter"]

    with stage(ctx, "report"):
        summaries = []
        for path in evaluations:
            summary = load_summary(path)
            summaries.append((summary.setup or path.parent.name, summary))
        prepare_output_dir(out_dir, force or ctx.obj["force"])
        write_config_lock(ctx.obj["config"], out_dir)

        rows = comparison_rows(summaries)
        write_comparison_csv(rows, out_dir / "comparison.csv")
        roc = {name: s.average().roc_points for name, s in summaries if s.average().roc_points}
        pr = {name: s.average().pr_points for name, s in summaries if s.average().pr_points}
        (out_dir / "roc_overlay.svg").write_text(
            render_svg_curves(roc, "ROC by setup", "FPR", "TPR"), encoding="utf-8"
        )
        (out_dir / "pr_overlay.svg").write_text(
            render_svg_curves(pr, "Precision-recall by setup", "Recall", "Precision"),
            encoding="utf-8",
        )

        formatter.table(
            "Setup comparison",
            COMPARISON_COLUMNS,
            [[row[k] for k in COMPARISON_COLUMNS] for row in rows],
        )
        formatter.success(
            f"Compared {len(summaries)} setups",
            {"comparison": str(out_dir / "comparison.csv"), "rows": len(rows)},
        )
