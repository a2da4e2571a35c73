"""Main CLI entry point"""

from pathlib import Path

import click
from rich.console import Console

from fusionseg_cli.commands.evaluate import evaluate
from fusionseg_cli.commands.infer import infer
from fusionseg_cli.commands.phantom import phantom
from fusionseg_cli.commands.preprocess import preprocess
from fusionseg_cli.commands.register import register_cmd
from fusionseg_cli.commands.report import report
from fusionseg_cli.commands.train import train_cmd
from fusionseg_cli.run_config import RunConfig, load_run_config_from_file
from fusionseg_cli.utils.output import OutputFormatter
from fusionseg_cli.utils.runtime import stage
from fusionseg_core.config import settings
from fusionseg_core.logsetup import setup_logging


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Run config (YAML or JSON); config.lock.json files are accepted",
)
@click.option("--json", "json_mode", is_flag=True, help="Output as JSON")
@click.option("--verbose", is_flag=True, help="Debug logging")
@click.option("--jobs", type=click.IntRange(min=1), default=None, help="Worker threads")
@click.pass_context
def cli(
    ctx: click.Context, config_path: Path | None, json_mode: bool, verbose: bool, jobs: int | None
) -> None:
    """fusionseg - multimodal MRI + TRUS prostate cancer segmentation

    Examples:
        fusionseg phantom --out runs/phantom
        fusionseg train runs/phantom/manifest.json --setup multimodal --out runs/mm
        fusionseg --json evaluate runs/phantom/manifest.json --predictions runs/pred --out runs/eval
    """
    setup_logging(verbose or settings.debug)

    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    ctx.obj["jobs"] = jobs or settings.jobs
    ctx.obj["force"] = settings.force

    console = Console()
    ctx.obj["console"] = console
    ctx.obj["formatter"] = OutputFormatter(json_mode=json_mode, console=console)

    ctx.obj["config"] = RunConfig()
    if config_path is not None:
        with stage(ctx, "config"):
            ctx.obj["config"] = load_run_config_from_file(config_path)


# Register commands
cli.add_command(phantom)
cli.add_command(preprocess)
cli.add_command(register_cmd)
cli.add_command(train_cmd)
cli.add_command(infer)
cli.add_command(evaluate)
cli.add_command(report)


if __name__ == "__main__":
    cli()
