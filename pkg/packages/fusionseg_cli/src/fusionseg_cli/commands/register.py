"""Register command - MRI to TRUS affine registration"""

from pathlib import Path

import click

from fusionseg_cli.run_config import write_config_lock
from fusionseg_cli.utils.runtime import parallel_map, prepare_output_dir, stage
from fusionseg_phantom import ground_truth_transform
from fusionseg_register import RegistrationResult, corner_error_mm, register
from fusionseg_volume import MRI_SEQUENCES, StudyManifest, load_manifest, load_study, write_manifest


@click.command("register")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option(
    "--sequence",
    type=click.Choice(MRI_SEQUENCES),
    default="t2w",
    show_default=True,
    help="MRI sequence registered to TRUS",
)
@click.option("--truth", is_flag=True, help="Report corner error against the phantom truth")
@click.option("--force", is_flag=True, help="Write into a non-empty output directory")
@click.pass_context
def register_cmd(
    ctx: click.Context, manifest: Path, out_dir: Path, sequence: str, truth: bool, force: bool
) -> None:
    """Estimate the MRI -> TRUS transform of every study

    Writes one transform JSON per study and a manifest pointing at them.

    Example:
        fusionseg register runs/phantom/manifest.json --out runs/reg --truth
    """
    formatter = ctx.obj["formatter"]
    cfg = ctx.obj["config"]

    with stage(ctx, "register"):
        entries = load_manifest(manifest)
        prepare_output_dir(out_dir, force or ctx.obj["force"])

        def run(entry: StudyManifest) -> tuple[StudyManifest, RegistrationResult, float | None]:
            study = load_study(entry)
            moving = study.mri(sequence)
            result = register(moving, study.trus, cfg.registration)
            path = out_dir / f"{study.study_id}_mri_to_trus.json"
            result.transform.save(path)
            error = None
            if truth:
                error = corner_error_mm(result.transform, ground_truth_transform(study), moving)
            return entry.model_copy(update={"mri_to_trus": path.resolve()}), result, error

        results = parallel_map(run, entries, ctx.obj["jobs"])
        out_manifest = out_dir / "manifest.json"
        write_manifest([entry for entry, _, _ in results], out_manifest)
        write_config_lock(cfg, out_dir)

        rows = [
            (entry.study_id, result.metric, result.iterations, error)
            for entry, result, error in results
        ]
        formatter.table("Registration", ["study", "metric", "iterations", "corner error mm"], rows)
        data: dict[str, object] = {"manifest": str(out_manifest), "studies": len(rows)}
        if truth:
            errors = [r[3] for r in rows if r[3] is not None]
            data["mean_corner_error_mm"] = sum(errors) / len(errors)
            data["corner_error_mm"] = {r[0]: r[3] for r in rows}
        formatter.success(f"Registered {len(rows)} studies", data)
