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
Module running the characterization, identification and tracking workflows of a
scenario and writing their artifacts.

Every workflow writes into an output directory named ``<scenario>.*`` artifacts plus a
``<scenario>.<command>.manifest.json`` that records the scenario hash, the resolved
scenario document, the seed and the toolkit version. Files are written to a temporary
sibling and renamed into place.

"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from pypma.elements import (
    ClosedLoopTrajectory,
    IdentificationProblem,
    IdentificationResult,
    MetricsReport,
    SignalKind,
    Trajectory,
)
from pypma.entrypoint import (
    dumps,
    dumps_fields,
    dumps_start_table,
    dumps_table,
    load,
    load_recording,
)
from pypma.exceptions import ValidationError
from pypma.identification import average_response, identify, synthesize_recordings
from pypma.integrator import simulate, simulate_commands
from pypma.loop import run_closed_loop
from pypma.maps import COMPARISON_COLUMNS
from pypma.metrics import branch_separation, compute_metrics, loop_integral
from pypma.scenario import Scenario, load_scenario

logger = logging.getLogger(__name__)


@dataclass
class RunReport:
    """
    Outcome of one workflow.

    Attributes:
        command (str): Workflow name.
        scenario (str): Scenario name.
        out_dir (Path): Directory holding the artifacts.
        artifacts (list[Path]): Files written, manifest last.
        summary (dict): Headline numbers for display.
    """

    command: str
    scenario: str
    out_dir: Path
    artifacts: list[Path] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)


@dataclass
class ComparisonReport(RunReport):
    """Outcome of a controller comparison with the metrics of both slots."""

    feedback: Optional[MetricsReport] = None
    computed_torque: Optional[MetricsReport] = None


def toolkit_version() -> str:
    """Returns the installed version, or ``dev`` outside an installation."""
    try:
        # pylint: disable-next=import-outside-toplevel
        from pypma._version import __version__  # type: ignore
    except ImportError:  # pragma: no cover
        return "dev"
    return str(__version__)


def write_atomic(path: Path, text: str) -> Path:
    """Writes ``text`` to ``path`` through a temporary file in the same directory."""
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="\n") as file:
            file.write(text)
        os.replace(temp_name, path)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise
    logger.debug("Wrote %s", path)
    return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(
    report: RunReport, scenarios: list[Scenario], extra: Optional[dict[str, Any]] = None
) -> Path:
    """Writes the run manifest and appends it to the report's artifacts."""
    manifest: dict[str, Any] = {
        "command": report.command,
        "scenario": report.scenario,
        "toolkit_version": toolkit_version(),
        "scenarios": [
            {
                "name": scenario.name,
                "path": str(scenario.path) if scenario.path is not None else None,
                "sha256": scenario.sha256,
                "rng_seed": scenario.rng_seed,
                "document": scenario.resolved(),
            }
            for scenario in scenarios
        ],
        "artifacts": {path.name: _sha256(path) for path in report.artifacts},
    }
    if extra:
        manifest.update(extra)
    path = report.out_dir / f"{report.scenario}.{report.command}.manifest.json"
    write_atomic(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    report.artifacts.append(path)
    return path


def output_directory(scenario: Scenario, out: Optional[Union[str, Path]]) -> Path:
    """Resolves the output directory: ``out``, else the scenario's, else ``./out``."""
    if out is not None:
        return Path(out)
    if scenario.output_dir is not None:
        return scenario.resolve_path(scenario.output_dir)
    return Path("out")


def _emit(report: RunReport, name: str, text: str) -> Path:
    path = write_atomic(report.out_dir / name, text)
    report.artifacts.append(path)
    return path


def _recorded_from_simulation(scenario: Scenario, truth: Trajectory) -> Trajectory:
    if scenario.measurement is None:
        return truth
    runs = synthesize_recordings(
        truth, scenario.measurement.runs, scenario.measurement.noise_std, scenario.rng_seed
    )
    return average_response(runs)


def _loop_fields(scenario: Scenario, traj: Trajectory) -> list[tuple[str, Any, str]]:
    fields: list[tuple[str, Any, str]] = [
        ("samples", len(traj), ""),
        ("x_min", float(np.min(traj.x)), "m"),
        ("x_max", float(np.max(traj.x)), "m"),
        ("x_final", float(traj.x[-1]), "m"),
        ("v_final", float(traj.v[-1]), "m/s"),
    ]
    signal = scenario.signal
    area = scenario.plant.A
    if signal is not None and signal.kind == SignalKind.SINE:
        period = int(round(1.0 / (signal.f0 * traj.dt)))
        if len(traj) > period:
            cycle = slice(len(traj) - 1 - period, len(traj))
            fields.append(
                ("loop_integral", loop_integral(traj.p_eff[cycle], traj.x[cycle], area), "J")
            )
        try:
            separation = branch_separation(traj.p_cmd, traj.x, signal.offset)
            fields.append(("branch_separation", separation, "m"))
        except ValidationError:
            logger.debug("No complete pressure cycle through %s Pa", signal.offset)
    else:
        fields.append(("loop_integral", loop_integral(traj.p_eff, traj.x, area), "J"))
    return fields


def run_characterize(scenario: Scenario, out_dir: Path) -> RunReport:
    """Simulates the open-loop response to the scenario's pressure signal.

    Writes ``<name>.csv`` (noiseless response), ``<name>.recorded.csv`` when a
    measurement block emulates averaged noisy recordings, and ``<name>.metrics.txt``
    with the hysteresis-loop summary.
    """
    scenario.require("signal", "clock")
    assert scenario.signal is not None and scenario.clock is not None
    report = RunReport("characterize", scenario.name, out_dir)
    traj = simulate(scenario.initial_state, scenario.signal, scenario.plant, scenario.clock)
    _emit(report, f"{scenario.name}.csv", dumps(traj))
    if scenario.measurement is not None:
        recorded = _recorded_from_simulation(scenario, traj)
        _emit(report, f"{scenario.name}.recorded.csv", dumps(recorded))

    fields = _loop_fields(scenario, traj)
    _emit(report, f"{scenario.name}.metrics.txt", dumps_fields(fields, "characterization"))
    report.summary = {key: value for key, value, _ in fields}
    write_manifest(report, [scenario])
    return report


def identification_problem(
    scenario: Scenario,
) -> tuple[IdentificationProblem, Optional[Trajectory]]:
    """Builds the identification problem of a scenario.

    Recorded CSVs listed in the identification block are averaged; without them the
    plant block is simulated under the signal and, when a measurement block is present,
    averaged noisy copies are used.

    Returns:
        tuple: The problem and the noiseless truth when the data is synthetic.
    """
    scenario.require("identification")
    settings = scenario.identification
    assert settings is not None
    truth: Optional[Trajectory] = None
    if settings.recorded:
        recorded = average_response([load_recording(str(path)) for path in settings.recorded])
    else:
        scenario.require("signal", "clock")
        assert scenario.signal is not None and scenario.clock is not None
        truth = simulate(scenario.initial_state, scenario.signal, scenario.plant, scenario.clock)
        recorded = _recorded_from_simulation(scenario, truth)

    problem = IdentificationProblem(
        recorded=recorded,
        fixed=scenario.plant,
        bounds=dict(settings.bounds),
        n_starts=settings.n_starts,
        rng_seed=scenario.rng_seed,
        sim_dt=settings.sim_dt,
        initial_state=scenario.initial_state,
        max_iterations=settings.max_iterations,
        cost_tolerance=settings.cost_tolerance,
        initial_guess=settings.initial_guess,
        refine_rounds=settings.refine_rounds,
        workers=settings.workers,
    )
    return problem, truth


def run_identify(scenario: Scenario, out_dir: Path) -> RunReport:
    """Identifies the free parameters and writes the result document, the per-start
    table and the response of the identified model (``<name>.fit.csv``)."""
    problem, truth = identification_problem(scenario)
    report = RunReport("identify", scenario.name, out_dir)
    result: IdentificationResult = identify(problem)
    _emit(report, f"{scenario.name}.result.txt", dumps(result))
    _emit(report, f"{scenario.name}.starts.csv", dumps_start_table(result))

    fitted = simulate_commands(
        problem.initial_state,
        problem.recorded.t,
        problem.recorded.p_cmd,
        result.plant(problem.fixed),
        substeps=problem.substeps,
    )
    _emit(report, f"{scenario.name}.fit.csv", dumps(fitted))
    report.summary = {"cost": result.cost, "best_start_index": result.best_start_index}
    report.summary.update(result.params_hat)
    if truth is not None:
        report.summary["fit_vs_truth"] = float(np.sqrt(np.mean((fitted.x - truth.x) ** 2)))
    write_manifest(report, [scenario])
    return report


def _closed_loop(scenario: Scenario) -> ClosedLoopTrajectory:
    scenario.require("reference", "controller", "clock")
    assert scenario.reference is not None and scenario.controller is not None
    assert scenario.clock is not None
    return run_closed_loop(
        scenario.plant,
        scenario.model_hat,
        scenario.controller,
        scenario.reference,
        scenario.sensor,
        scenario.regulator,
        scenario.clock,
        scenario.initial_state,
    )


def _metrics(scenario: Scenario, traj: ClosedLoopTrajectory) -> MetricsReport:
    ref = scenario.reference
    assert ref is not None
    return compute_metrics(traj, ref.f, ref.center, ref.amplitude)


def _metrics_summary(report: MetricsReport) -> dict[str, float]:
    return {
        "rms_error": report.rms_error,
        "phase_lag": report.phase_lag,
        "overshoot": report.overshoot,
        "peak_error": report.peak_error,
    }


def run_track(scenario: Scenario, out_dir: Path) -> RunReport:
    """Runs the closed loop and writes the trajectory and its metrics."""
    traj = _closed_loop(scenario)
    report = RunReport("track", scenario.name, out_dir)
    _emit(report, f"{scenario.name}.csv", dumps(traj))
    metrics = _metrics(scenario, traj)
    _emit(report, f"{scenario.name}.metrics.txt", dumps(metrics))
    report.summary = _metrics_summary(metrics)
    write_manifest(report, [scenario])
    return report


def run_metrics(
    scenario: Scenario, out_dir: Path, trajectory: Optional[Union[str, Path]] = None
) -> RunReport:
    """Recomputes the metrics of a closed-loop trajectory CSV.

    The CSV is ``trajectory`` when given, else the scenario's ``trajectory`` entry, else
    ``<out_dir>/<name>.csv`` from an earlier ``track`` run.
    """
    scenario.require("reference")
    if trajectory is not None:
        source = Path(trajectory)
    elif scenario.trajectory is not None:
        source = scenario.resolve_path(scenario.trajectory)
    else:
        source = out_dir / f"{scenario.name}.csv"
    if not source.is_file():
        raise ValidationError(f"trajectory file not found: {source}")
    traj = load(str(source))
    if not isinstance(traj, ClosedLoopTrajectory):
        raise ValidationError(f"{source} is not a closed-loop trajectory")

    report = RunReport("metrics", scenario.name, out_dir)
    metrics = _metrics(scenario, traj)
    _emit(report, f"{scenario.name}.metrics.txt", dumps(metrics))
    report.summary = _metrics_summary(metrics)
    write_manifest(report, [scenario], {"trajectory": str(source)})
    return report


def compare_controllers(
    scenario_fb: Scenario, scenario_ct: Scenario, out_dir: Path
) -> ComparisonReport:
    """Runs two tracking scenarios and writes the overlay CSV and side-by-side metrics.

    Args:
        scenario_fb: Feedback (PID) slot.
        scenario_ct: Computed-torque slot.
        out_dir: Output directory.

    Raises:
        ValidationError: If the scenarios differ in a shared block or in time grid.

    Returns:
        ComparisonReport: Metrics of both slots and the artifacts.
    """
    mismatched = scenario_fb.mismatched_blocks(scenario_ct)
    if mismatched:
        raise ValidationError(
            f"scenarios '{scenario_fb.name}' and '{scenario_ct.name}' differ in shared "
            f"blocks: {', '.join(mismatched)}"
        )
    traj_fb = _closed_loop(scenario_fb)
    traj_ct = _closed_loop(scenario_ct)
    metrics_fb = _metrics(scenario_fb, traj_fb)
    metrics_ct = _metrics(scenario_ct, traj_ct)

    name = f"{scenario_fb.name}_vs_{scenario_ct.name}"
    report = ComparisonReport(
        "compare", name, out_dir, feedback=metrics_fb, computed_torque=metrics_ct
    )
    overlay = np.column_stack(
        [traj_fb.t, traj_fb.x_d, traj_fb.x, traj_ct.x, traj_fb.e, traj_ct.e]
    )
    _emit(report, f"{name}.csv", dumps_table(COMPARISON_COLUMNS, overlay))

    fields = []
    for key, unit in (
        ("rms_error", "m"),
        ("phase_lag", "deg"),
        ("overshoot", "%"),
        ("peak_error", "m"),
    ):
        fields.append((f"{key}.FB", getattr(metrics_fb, key), unit))
        fields.append((f"{key}.CT", getattr(metrics_ct, key), unit))
    _emit(report, f"{name}.metrics.txt", dumps_fields(fields, "controller comparison"))
    report.summary = {key: value for key, value, _ in fields}
    write_manifest(report, [scenario_fb, scenario_ct])
    return report


WORKFLOWS = {
    "characterize": run_characterize,
    "identify": run_identify,
    "track": run_track,
    "metrics": run_metrics,
}


def run_scenario(
    path: Union[str, Path],
    command: str,
    out: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
) -> RunReport:
    """Loads a scenario and runs one workflow on it.

    Args:
        path: Scenario file.
        command: One of ``characterize``, ``identify``, ``track`` or ``metrics``.
        out: Output directory override.
        seed: Seed override.

    Raises:
        ValidationError: If the command is unknown or the scenario is invalid.
        IntegrationDivergedError: If a simulation blows up.

    Returns:
        RunReport: The workflow outcome.
    """
    if command not in WORKFLOWS:
        raise ValidationError(f"unknown command '{command}'")
    scenario = load_scenario(path).with_seed(seed)
    out_dir = output_directory(scenario, out)
    logger.info("Running %s on scenario '%s' into %s", command, scenario.name, out_dir)
    return WORKFLOWS[command](scenario, out_dir)
