"""Preprocess command - resample, crop and normalize studies"""

from pathlib import Path

import click

from fusionseg_cli.run_config import write_config_lock
from fusionseg_cli.utils.runtime import parallel_map, prepare_output_dir, stage
from fusionseg_preprocess import preprocess_study
from fusionseg_volume import StudyManifest, load_manifest, load_study, save_study, write_manifest


@click.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--force", is_flag=True, help="Write into a non-empty output directory")
@click.pass_context
def preprocess(ctx: click.Context, manifest: Path, out_dir: Path, force: bool) -> None:
    """Resample, crop/pad and z-score every study in a manifest

    Example:
        fusionseg preprocess runs/phantom/manifest.json --out runs/prep
    """
    formatter = ctx.obj["formatter"]
    cfg = ctx.obj["config"]

    with stage(ctx, "preprocess"):
        entries = load_manifest(manifest)
        prepare_output_dir(out_dir, force or ctx.obj["force"])

        def run(entry: StudyManifest) -> StudyManifest:
            study = preprocess_study(load_study(entry), cfg.preprocess)
            return save_study(study, out_dir / study.study_id)

        written = parallel_map(run, entries, ctx.obj["jobs"])
        out_manifest = out_dir / "manifest.json"
        write_manifest(written, out_manifest)
        write_config_lock(cfg, out_dir)

        formatter.success(
            f"Preprocessed {len(written)} studies",
            {"manifest": str(out_manifest), "studies": len(written)},
        )
