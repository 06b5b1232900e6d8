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
Entrypoint for the PyPMA CLI.

"""

import sys
from pathlib import Path
from typing import Optional

try:
    import typer
    from typing_extensions import Annotated

    from pypma.cli.commands import (
        run_command,
        run_compare,
        run_trajectory_metrics,
        validate_path_exists,
        validate_paths_exist,
    )
except ImportError as err:
    print(
        f"Missing required dependency: '{err.name}'.\n\n"
        "Install the dependencies for the PyPMA CLI with:\n\n"
        "\t$ pip install 'pypma[cli]'",
        file=sys.stderr,
    )
    sys.exit(1)

app = typer.Typer(context_settings={"help_option_names": ["-h", "--help"]})

ScenarioOption = Annotated[
    Path,
    typer.Option(
        "--scenario", help="Scenario file (*.scenario).", callback=validate_path_exists
    ),
]
OutOption = Annotated[
    Optional[Path],
    typer.Option("--out", "-o", help="Output directory; overrides the scenario's output_dir."),
]
SeedOption = Annotated[
    Optional[int],
    typer.Option("--seed", min=0, help="Random seed; overrides the scenario's rng_seed."),
]
VerboseOption = Annotated[
    bool, typer.Option("--verbose", help="Log progress to the terminal.")
]


def version_callback(value: bool):
    """Show the version and exit."""
    if value:
        # pylint: disable-next=import-outside-toplevel
        from pypma._version import __version__  # type: ignore

        typer.echo(f"pypma/{__version__}")
        raise typer.Exit(0)


@app.command(name="characterize", help="Simulate the open-loop response to a pressure signal.")
def characterize(
    scenario: ScenarioOption,
    out: OutOption = None,
    seed: SeedOption = None,
    verbose: VerboseOption = False,
):
    """Simulate the open-loop response to a pressure signal."""
    run_command("characterize", scenario, out, seed, verbose)


@app.command(name="identify", help="Identify the hysteresis and plant parameters.")
def identify(
    scenario: ScenarioOption,
    out: OutOption = None,
    seed: SeedOption = None,
    verbose: VerboseOption = False,
):
    """Identify the hysteresis and plant parameters."""
    run_command("identify", scenario, out, seed, verbose)


@app.command(name="track", help="Run a closed-loop tracking experiment.")
def track(
    scenario: ScenarioOption,
    out: OutOption = None,
    seed: SeedOption = None,
    verbose: VerboseOption = False,
):
    """Run a closed-loop tracking experiment."""
    run_command("track", scenario, out, seed, verbose)


@app.command(name="compare", help="Compare a feedback and a computed-torque scenario.")
def compare(
    scenarios: Annotated[
        list[Path],
        typer.Option(
            "--scenario",
            help="Give twice: the feedback scenario, then the computed-torque scenario.",
            callback=validate_paths_exist,
        ),
    ],
    out: OutOption = None,
    seed: SeedOption = None,
    verbose: VerboseOption = False,
):
    """Compare a feedback and a computed-torque scenario."""
    run_compare(scenarios, out, seed, verbose)


@app.command(name="metrics", help="Compute tracking metrics of a closed-loop trajectory.")
def metrics(
    scenario: ScenarioOption,
    out: OutOption = None,
    seed: SeedOption = None,
    trajectory: Annotated[
        Optional[Path],
        typer.Option(
            "--trajectory",
            help="Closed-loop trajectory CSV; defaults to the scenario's track output.",
            callback=validate_path_exists,
        ),
    ] = None,
    verbose: VerboseOption = False,
):
    """Compute tracking metrics of a closed-loop trajectory."""
    if trajectory is None:
        run_command("metrics", scenario, out, seed, verbose)
    else:
        run_trajectory_metrics(scenario, trajectory, out, seed, verbose)


@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    version: Annotated[
        bool,
        typer.Option(
            "--version",
            "-v",
            callback=version_callback,
            is_eager=True,
            help="Show the version and exit.",
        ),
    ] = False,
):
    """The PyPMA CLI."""
    if ctx.invoked_subcommand and version:
        raise typer.BadParameter("The '--version' option cannot be used with a subcommand.")
    if not ctx.invoked_subcommand and not version:
        typer.echo(ctx.get_help())
        raise typer.Exit(0)


if __name__ == "__main__":
    app()
