"""Infer command - sliding-window probability maps"""

from pathlib import Path

import click

from fusionseg_cli.commands.train import SETUP_CHOICE
from fusionseg_cli.run_config import write_config_lock
from fusionseg_cli.utils.runtime import load_studies, parallel_map, prepare_output_dir, stage
from fusionseg_core.constants import Setup
from fusionseg_pipeline import predict_study
from fusionseg_unet import load_checkpoint
from fusionseg_volume import MultimodalStudy, nifti_write

SPLIT_CHOICE = click.Choice(["train", "val", "test", "all"])


def prediction_path(directory: Path, study_id: str, label: str) -> Path:
    return directory / f"{study_id}_{label}.nii"


@click.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--setup", type=SETUP_CHOICE, default=None, help="Overrides train.setup")
@click.option("--split", type=SPLIT_CHOICE, default="test", show_default=True)
@click.option("--force", is_flag=True, help="Write into a non-empty output directory")
@click.pass_context
def infer(
    ctx: click.Context,
    manifest: Path,
    checkpoint: Path,
    out_dir: Path,
    setup: str | None,
    split: str,
    force: bool,
) -> None:
    """Write one probability NIfTI per head per study on the TRUS grid

    Example:
        fusionseg infer runs/prep/manifest.json --checkpoint runs/train-mm/model.ckpt \\
            --setup multimodal --out runs/pred-mm
    """
    formatter = ctx.obj["formatter"]

    with stage(ctx, "infer"):
        cfg = ctx.obj["config"].with_setup(Setup(setup) if setup else None)
        model = load_checkpoint(checkpoint)
        studies = load_studies(manifest, split, ctx.obj["jobs"])
        prepare_output_dir(out_dir, force or ctx.obj["force"])
        write_config_lock(cfg, out_dir)

        def run(study: MultimodalStudy) -> int:
            maps = predict_study(model, study, cfg.train.setup, cfg.inference)
            for label, prob in maps.items():
                nifti_write(prob, prediction_path(out_dir, study.study_id, label))
            return len(maps)

        written = parallel_map(run, studies, ctx.obj["jobs"])
        formatter.success(
            f"Predicted {len(studies)} studies",
            {"directory": str(out_dir), "files": sum(written)},
        )
