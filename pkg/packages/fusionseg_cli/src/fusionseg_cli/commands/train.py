"""Train command - fit a UNet for one input setup"""

from pathlib import Path

import click

from fusionseg_cli.run_config import write_config_lock
from fusionseg_cli.utils.runtime import load_studies, prepare_output_dir, stage
from fusionseg_core.constants import Setup
from fusionseg_core.exceptions import EmptyCohort
from fusionseg_pipeline import train, write_loss_csv
from fusionseg_unet import build_unet, count_parameters, save_checkpoint

SETUP_CHOICE = click.Choice([s.value for s in Setup])


@click.command("train")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--setup", type=SETUP_CHOICE, default=None, help="Overrides train.setup")
@click.option("--seed", type=int, default=None, help="Overrides train.seed")
@click.option("--force", is_flag=True, help="Write into a non-empty output directory")
@click.pass_context
def train_cmd(
    ctx: click.Context,
    manifest: Path,
    out_dir: Path,
    setup: str | None,
    seed: int | None,
    force: bool,
) -> None:
    """Train on the manifest's train split

    Writes model.ckpt, per-epoch checkpoints and loss.csv.

    Example:
        fusionseg train runs/prep/manifest.json --setup multimodal --out runs/train-mm
    """
    formatter = ctx.obj["formatter"]

    with stage(ctx, "train"):
        cfg = ctx.obj["config"].with_setup(Setup(setup) if setup else None)
        cfg = cfg.override("train", seed=seed)
        studies = load_studies(manifest, "train", ctx.obj["jobs"])
        val_studies = []
        if cfg.train.validate_each_epoch:
            try:
                val_studies = load_studies(manifest, "val", ctx.obj["jobs"])
            except EmptyCohort:
                formatter.info("No val split; skipping validation loss")
        prepare_output_dir(out_dir, force or ctx.obj["force"])
        write_config_lock(cfg, out_dir)

        model = build_unet(cfg.unet, seed=cfg.train.seed)
        formatter.info(f"UNet with {count_parameters(model)} parameters")
        result = train(studies, model, cfg.train, checkpoint_dir=out_dir, val_studies=val_studies)
        checkpoint = out_dir / "model.ckpt"
        save_checkpoint(result.model, checkpoint)
        write_loss_csv(result.history, out_dir / "loss.csv")

        totals = result.totals()
        formatter.success(
            f"Trained {cfg.train.setup.value} model",
            {
                "checkpoint": str(checkpoint),
                "steps": len(totals),
                "final_loss": totals[-1] if totals else None,
            },
        )
