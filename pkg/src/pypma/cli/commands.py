# Copyright (C) 2025 qBraid
#
# This file is part of PyPMA
#
# PyPMA is free software released under the GNU General Public License v3
# or later. You can redistribute and/or modify it under the terms of the GPL v3.
# See the LICENSE file in the project root or <https://www.gnu.org/licenses/gpl-3.0.html>.
#
# THERE IS NO WARRANTY for PyPMA, as per Section 15 of the GPL v3.

"""
Script running scenario workflows and reporting their outcome

"""

import logging
import os
from pathlib import Path
from typing import Callable, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from pypma.exceptions import (
    IdentificationError,
    IntegrationDivergedError,
    ScenarioError,
    ValidationError,
)
from pypma.experiments import (
    ComparisonReport,
    RunReport,
    compare_controllers,
    output_directory,
    run_metrics,
    run_scenario,
)
from pypma.maps import EXIT_DIVERGENCE, EXIT_SUCCESS, EXIT_VALIDATION_ERROR
from pypma.scenario import load_scenario

logger = logging.getLogger(__name__)


def validate_path_exists(path: Optional[Path]) -> Optional[Path]:
    """Verifies that a path exists."""
    if path is not None and not os.path.exists(path):
        raise typer.BadParameter(f"Path '{path}' does not exist")
    return path


def validate_paths_exist(paths: Optional[list[Path]]) -> Optional[list[Path]]:
    """Verifies that each path in the provided list exists."""
    if not paths:
        return paths

    non_existent_paths = [str(path) for path in paths if not os.path.exists(path)]
    if non_existent_paths:
        if len(non_existent_paths) == 1:
            raise typer.BadParameter(f"Path '{non_existent_paths[0]}' does not exist")

        formatted_paths = ", ".join(f"'{item}'" for item in non_existent_paths)
        raise typer.BadParameter(f"The following paths do not exist: {formatted_paths}")
    return paths


def configure_logging(verbose: bool) -> None:
    """Routes package logging through rich when verbose output is requested."""
    if not verbose:
        return
    package_logger = logging.getLogger("pypma")
    package_logger.setLevel(logging.DEBUG)
    if not any(isinstance(handler, RichHandler) for handler in package_logger.handlers):
        package_logger.addHandler(RichHandler(show_path=False, markup=False))


def _category(err: Exception) -> str:
    return (
        "".join(["-" + c.lower() if c.isupper() else c for c in type(err).__name__])
        .lstrip("-")
        .removesuffix("-error")
    )


def _print_error(console: Console, err: Exception) -> None:
    if isinstance(err, ScenarioError) and err.diagnostics:
        summary = str(err).split("\n", maxsplit=1)[0]
        console.print(f"[red]error:[/red] {summary}", highlight=False)
        for diagnostic in err.diagnostics:
            console.print(f"  {diagnostic}", highlight=False, markup=False)
        return
    console.print(f"[red]error:[/red] {err} [yellow]\\[{_category(err)}][/yellow]", highlight=False)


def _summary_table(report: RunReport) -> Table:
    table = Table(title=f"{report.command}: {report.scenario}")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for key, value in report.summary.items():
        table.add_row(key, f"{value:.6g}" if isinstance(value, float) else str(value))
    return table


def _comparison_table(report: ComparisonReport) -> Table:
    table = Table(title=f"compare: {report.scenario}")
    table.add_column("metric")
    table.add_column("FB", justify="right")
    table.add_column("CT", justify="right")
    rows = (("rms_error", "m"), ("phase_lag", "deg"), ("overshoot", "%"), ("peak_error", "m"))
    for key, unit in rows:
        table.add_row(
            f"{key} [{unit}]",
            f"{getattr(report.feedback, key):.6g}",
            f"{getattr(report.computed_torque, key):.6g}",
        )
    return table


def execute(action: Callable[[], RunReport], verbose: bool = False) -> None:
    """Runs a workflow and exits with the code matching its outcome.

    Raises:
        typer.Exit: 0 on success, 2 on invalid input, 3 when a simulation diverged.
    """
    configure_logging(verbose)
    console = Console()
    try:
        report = action()
    except IntegrationDivergedError as err:
        _print_error(console, err)
        raise typer.Exit(EXIT_DIVERGENCE) from err
    except (ValidationError, IdentificationError) as err:
        _print_error(console, err)
        raise typer.Exit(EXIT_VALIDATION_ERROR) from err

    if isinstance(report, ComparisonReport):
        console.print(_comparison_table(report))
    elif report.summary:
        console.print(_summary_table(report))
    for path in report.artifacts:
        logger.debug("Artifact %s", path)
    console.print(
        f"[green]Success: {report.command} wrote {len(report.artifacts)} artifacts "
        f"to {report.out_dir}[/green]",
        highlight=False,
    )
    raise typer.Exit(EXIT_SUCCESS)


def run_command(
    command: str,
    scenario: Path,
    out: Optional[Path],
    seed: Optional[int],
    verbose: bool = False,
) -> None:
    """Script running one single-scenario workflow."""
    execute(lambda: run_scenario(scenario, command, out, seed), verbose)


def run_compare(
    scenarios: list[Path], out: Optional[Path], seed: Optional[int], verbose: bool = False
) -> None:
    """Script comparing a feedback and a computed-torque scenario."""
    if len(scenarios) != 2:
        raise typer.BadParameter("compare takes exactly two --scenario options: FB then CT")

    def action() -> RunReport:
        feedback = load_scenario(scenarios[0]).with_seed(seed)
        computed_torque = load_scenario(scenarios[1]).with_seed(seed)
        out_dir = output_directory(feedback, out)
        return compare_controllers(feedback, computed_torque, out_dir)

    execute(action, verbose)


def run_trajectory_metrics(
    scenario: Path,
    trajectory: Path,
    out: Optional[Path],
    seed: Optional[int],
    verbose: bool = False,
) -> None:
    """Script computing the metrics of an explicit closed-loop trajectory CSV."""

    def action() -> RunReport:
        loaded = load_scenario(scenario).with_seed(seed)
        return run_metrics(loaded, output_directory(loaded, out), trajectory)

    execute(action, verbose)
