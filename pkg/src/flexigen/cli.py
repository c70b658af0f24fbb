"""Command-line entry point: ``flexigen generate | validate | analyze``."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from .analysis import analyze, dataset_files, discover_runs
from .config import ConfigError, load_config, validate_config
from .dataset import validate_file
from .scenario import MODES, run_scenario

@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose: bool) -> None:
    """Synthetic hourly EV charging-flexibility datasets."""
    logging.basicConfig(level=logging.INFO if verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--mode", required=True, type=click.Choice(MODES))
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), envvar="FLEXIGEN_SEED", default=None,
              help="Master seed; falls back to $FLEXIGEN_SEED, then the config's seed.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False, path_type=Path))
def generate(config_path: Path, mode: str, seed, out_dir: Path) -> None:
    """Generate one CSV per EV of the chosen mode."""
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        click.echo(f"FATAL config: {exc}", err=True)
        sys.exit(2)
    report = validate_config(cfg)
    for finding in report:
        click.echo(str(finding), err=True)
    if not report.ok:
        sys.exit(2)
    seed = cfg.seed if seed is None else seed
    result = run_scenario(cfg, mode, seed, out_dir)
    click.echo(f"wrote {len(result.profiles)} profiles to {result.directory}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, path_type=Path))
def validate(input_path: Path) -> None:
    """Check files against the dataset contract; exit 0 only when there are no findings."""
    expected = {}
    if input_path.is_dir():
        for d, m in discover_runs(input_path):
            for entry in m["files"]:
                expected[d / entry["file"]] = m["horizon_days"] * 24
    files = dataset_files(input_path)
    if not files:
        click.echo(f"no CSV files found under {input_path}", err=True)
        sys.exit(1)
    total = 0
    for _, path in files:
        report = validate_file(path, expected.get(path))
        for finding in report:
            click.echo(str(finding))
        total += len(report)
    click.echo(f"{len(files)} file(s) checked, {total} finding(s)")
    sys.exit(1 if total else 0)


@main.command("analyze")
@click.option("--input", "input_dir", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False, path_type=Path))
def analyze_cmd(input_dir: Path, out_dir: Path) -> None:
    """Write run-length, hourly-profile and trip-duration tables."""
    for name, path in analyze(input_dir, out_dir).items():
        click.echo(f"{name}: {path}")


if __name__ == "__main__":
    main()
