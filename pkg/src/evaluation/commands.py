from pathlib import Path
from typing import Annotated, Optional
import logging

import typer

from src.config import load_run_config
from src.errors import EXIT_PARTIAL_FAILURE, handle_errors
from src.evaluation.report import (
    RAW_FILE, aggregate_report, load_reference, read_failures, read_raw_csv, write_report,
)
from src.evaluation.schemas import Halves
from src.evaluation.service import run_benchmark

logger = logging.getLogger(__name__)


@handle_errors
def benchmark(
    config: Annotated[Path, typer.Option("--config", "-c", help="Run config (TOML)")],
    workers: Annotated[Optional[int], typer.Option(min=1, help="Folds trained concurrently; overrides run.workers")] = None,
) -> None:
    """Cross-validate the configured models on the configured datasets."""
    run_config = load_run_config(config)
    report, run_dir = run_benchmark(run_config, workers)
    typer.echo(f"run directory: {run_dir}")
    if report is None:
        typer.echo("every combination failed", err=True)
        raise typer.Exit(code=EXIT_PARTIAL_FAILURE)

    typer.echo((run_dir / "tables.txt").read_text())
    if report.failures:
        typer.echo(f"{len(report.failures)} combination(s) failed", err=True)
        raise typer.Exit(code=EXIT_PARTIAL_FAILURE)


@handle_errors
def report(
    run_dir: Annotated[Path, typer.Option("--run-dir", "-r", help="A results/<run-id> directory")],
    reference: Annotated[Optional[Path], typer.Option(help="CSV `dataset,model,wss95` of published scores")] = None,
    halves: Annotated[str, typer.Option(help="Average `both` halves of every repetition or the `first` only")] = "both",
) -> None:
    """Re-render the report and tables from a run's raw.csv."""
    if halves not in ("both", "first"):
        raise typer.BadParameter("--halves must be `both` or `first`")
    chosen: Halves = halves  # type: ignore[assignment]
    results = read_raw_csv(run_dir / RAW_FILE)
    reference_scores = load_reference(reference) if reference is not None else None
    rebuilt = aggregate_report(results, halves=chosen, reference=reference_scores, failures=read_failures(run_dir))
    typer.echo(write_report(run_dir, rebuilt))
