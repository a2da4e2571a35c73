"""Phantom command - synthetic cohort generation"""

from pathlib import Path

import click

from fusionseg_cli.run_config import write_config_lock
from fusionseg_cli.utils.runtime import prepare_output_dir, stage
from fusionseg_phantom import generate_cohort, write_cohort


@click.command()
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--seed", type=int, default=None, help="Overrides phantom.seed")
@click.option("--force", is_flag=True, help="Write into a non-empty output directory")
@click.pass_context
def phantom(ctx: click.Context, out_dir: Path, seed: int | None, force: bool) -> None:
    """Generate a synthetic MRI + TRUS cohort with known transforms

    Example:
        fusionseg phantom --seed 7 --out runs/phantom
    """
    formatter = ctx.obj["formatter"]

    with stage(ctx, "phantom"):
        cfg = ctx.obj["config"].override("phantom", seed=seed)
        prepare_output_dir(out_dir, force or ctx.obj["force"])
        cohort = generate_cohort(cfg.phantom, jobs=ctx.obj["jobs"])
        manifest = write_cohort(cohort, out_dir)
        write_config_lock(cfg, out_dir)

        formatter.table(
            "Phantom studies",
            ["study", "split", "lesions", "visibility"],
            [
                (
                    item.study.study_id,
                    item.study.split,
                    len(item.anatomy.lesions),
                    ", ".join(les.visibility.value for les in item.anatomy.lesions),
                )
                for item in cohort
            ],
        )
        formatter.success(
            f"Generated {len(cohort)} phantom studies",
            {
                "manifest": str(manifest),
                "studies": len(cohort),
                "lesions": sum(len(item.anatomy.lesions) for item in cohort),
            },
        )
