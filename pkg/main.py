"""Command-line entry point for the spherical-space toolkit."""
import sys
from typing import Optional

import click

from sphkit.config import load_settings
from sphkit.errors import ToolkitError
from sphkit.logs import configure_logging
from sphkit.report import load_report, render_report, save_report
from sphkit.services import PipelineService

COMMAND_STAGES = {
    "analyze": "analyze",
    "degenerate": "degenerate",
    "fan": "fan",
    "cterm": "envalg,cterm,rapid",
    "verify": "all",
}


def run_options(func):
    options = [
        click.option("--example", "-e", default=None, help="Name of a built-in example."),
        click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Pair document (JSON)."),
        click.option("--stages", default=None, help="Comma-separated stages, or 'all'."),
        click.option("--out", "out_dir", default=None, help="Output directory for report.json and CSV series."),
        click.option("--tol", type=float, default=None, help="Numerical tolerance."),
        click.option("--degree-cap", type=int, default=None, help="PBW degree cap."),
        click.option("--seed", type=int, default=None, help="Seed for every sampling step."),
        click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None, help="key=value settings file."),
        click.option("--log-json", is_flag=True, default=False, help="Log JSON lines instead of colored text."),
        click.option("--strict", is_flag=True, default=False, help="Stop at the first failing stage."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def execute(default_stages: str, example, input_path, stages, out_dir, tol, degree_cap, seed, config_file, log_json, strict) -> None:
    try:
        settings = load_settings(
            config_file,
            tol=tol,
            degree_cap=degree_cap,
            seed=seed,
            out_dir=out_dir,
            log_json=log_json or None,
        )
        configure_logging(settings.log_level, settings.log_json)
        if example is None and input_path is None:
            example = "sl2_so2"
        service = PipelineService(settings)
        report = service.run(example=example, input_path=input_path, stages=stages or default_stages, strict=strict)
    except ToolkitError as exc:
        click.echo(f"Error: {exc}", err=True)
        sys.exit(2)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    path = save_report(report, settings.out_dir)
    for line in render_report(report):
        click.echo(line)
    click.echo(f"report written to {path}")
    sys.exit(0 if report.passed else 1)


@click.group()
def cli() -> None:
    """Structure theory and constant terms of real spherical spaces."""


def _make_command(name: str, default_stages: str, help_text: str):
    @cli.command(name=name, help=help_text)
    @run_options
    def command(**kwargs) -> None:
        execute(default_stages, **kwargs)

    return command


analyze = _make_command("analyze", COMMAND_STAGES["analyze"], "Local structure: adapted parabolic, spherical roots, rho.")
degenerate = _make_command("degenerate", COMMAND_STAGES["degenerate"], "Boundary degenerations h_I for every I in S.")
fan = _make_command("fan", COMMAND_STAGES["fan"], "Simplicial fan on the compression cone and the complete fans.")
cterm = _make_command("cterm", COMMAND_STAGES["cterm"], "Enveloping-algebra checks, constant terms and rapid convergence.")
verify = _make_command("verify", COMMAND_STAGES["verify"], "Every stage, including the synthetic verification harness.")


@cli.command()
@click.argument("path", type=click.Path(exists=True))
def report(path: str) -> None:
    """Render a saved report."""
    loaded = load_report(path)
    for line in render_report(loaded):
        click.echo(line)
    sys.exit(0 if loaded.passed else 1)


@cli.command(name="list")
def list_examples() -> None:
    """List the built-in examples."""
    service = PipelineService()
    for entry in service.registry.get_all():
        click.echo(f"{entry.name}: {entry.description}")


def main(argv: Optional[list] = None) -> None:
    cli.main(args=argv, prog_name="sphkit")


if __name__ == "__main__":
    main()
