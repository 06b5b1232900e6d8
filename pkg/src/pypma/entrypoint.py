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
Top-level entrypoint functions for pypma.

Trajectories are CSV files with a single header row and one row per sample at full
double precision. Identification results and metrics reports are plain text with one
``key = value # unit`` line per entry.

"""
from __future__ import annotations

import io
from typing import Iterable, Optional, Union

import numpy as np

from pypma.elements import (
    ClosedLoopTrajectory,
    IdentificationResult,
    MetricsReport,
    Trajectory,
)
from pypma.exceptions import ValidationError
from pypma.maps import (
    CLOSED_LOOP_COLUMNS,
    FLOAT_FORMAT,
    FREE_PARAMETERS,
    PARAMETER_UNITS,
    START_TABLE_COLUMNS,
    TRAJECTORY_COLUMNS,
)

RECORDING_COLUMNS: tuple[str, ...] = ("t", "p_cmd", "x")

ReportField = tuple[str, Union[float, int, bool, str], str]
Dumpable = Union[Trajectory, IdentificationResult, MetricsReport]


def _format_value(value: Union[float, int, bool, str]) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    return value


def dumps_fields(fields: Iterable[ReportField], title: Optional[str] = None) -> str:
    """Formats ``(key, value, unit)`` entries as ``key = value # unit`` lines."""
    lines = [f"# {title}"] if title else []
    for key, value, unit in fields:
        line = f"{key} = {_format_value(value)}"
        lines.append(f"{line} # {unit}" if unit else line)
    return "\n".join(lines) + "\n"


def _split_csv(text: str) -> tuple[list[str], np.ndarray]:
    stream = io.StringIO(text)
    header = stream.readline().strip()
    if not header:
        raise ValidationError("trajectory CSV is empty")
    names = [name.strip() for name in header.split(",")]
    try:
        data = np.loadtxt(stream, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as err:
        raise ValidationError(f"Failed to parse trajectory CSV: {err}") from err
    if data.size == 0:
        raise ValidationError("trajectory CSV has no rows")
    if data.shape[1] != len(names):
        raise ValidationError(
            f"trajectory CSV header names {len(names)} columns but rows hold {data.shape[1]}"
        )
    return names, data


def loads(text: str) -> Trajectory:
    """Parses a trajectory CSV.

    A file carrying the ``x_d``, ``v_d`` and ``e`` columns loads as a
    :class:`~pypma.elements.ClosedLoopTrajectory`.

    Args:
        text: CSV text with a header row.

    Raises:
        ValidationError: If the header does not match a trajectory schema or a column
            is not finite.

    Returns:
        Trajectory: The parsed trajectory.
    """
    names, data = _split_csv(text)
    if tuple(names) == CLOSED_LOOP_COLUMNS:
        cls: type[Trajectory] = ClosedLoopTrajectory
    elif tuple(names) == TRAJECTORY_COLUMNS:
        cls = Trajectory
    else:
        raise ValidationError(f"Unsupported trajectory header: {','.join(names)}")
    return cls(**{name: data[:, index] for index, name in enumerate(names)})


def load(filename: str) -> Trajectory:
    """Reads a trajectory CSV file; see :func:`loads`."""
    with open(filename, "r", encoding="utf-8") as file:
        return loads(file.read())


def loads_recording(text: str) -> Trajectory:
    """Parses recorded data, requiring only the ``t``, ``p_cmd`` and ``x`` columns.

    Columns that are absent are zero-filled; extra columns are ignored.

    Raises:
        ValidationError: If a required column is missing.

    Returns:
        Trajectory: The recording.
    """
    names, data = _split_csv(text)
    missing = [name for name in RECORDING_COLUMNS if name not in names]
    if missing:
        raise ValidationError(f"recording is missing columns: {', '.join(missing)}")
    zeros = np.zeros(data.shape[0])
    columns = {
        name: data[:, names.index(name)] if name in names else zeros
        for name in TRAJECTORY_COLUMNS
    }
    return Trajectory(**columns)


def load_recording(filename: str) -> Trajectory:
    """Reads recorded data from a CSV file; see :func:`loads_recording`."""
    with open(filename, "r", encoding="utf-8") as file:
        return loads_recording(file.read())


def dumps_table(names: Iterable[str], rows: np.ndarray, formats: Optional[list] = None) -> str:
    """Formats a numeric table as CSV with a single header row."""
    stream = io.StringIO()
    np.savetxt(
        stream,
        rows,
        fmt=formats or FLOAT_FORMAT,
        delimiter=",",
        header=",".join(names),
        comments="",
    )
    return stream.getvalue()


def dumps_start_table(result: IdentificationResult) -> str:
    """Formats the per-start table with the converged point of every start."""
    rows = np.array(
        [
            [record.start_index, record.cost, record.iterations]
            + [record.converged_point[name] for name in FREE_PARAMETERS]
            for record in result.starts
        ],
        dtype=np.float64,
    )
    formats = ["%d", FLOAT_FORMAT, "%d"] + [FLOAT_FORMAT] * len(FREE_PARAMETERS)
    return dumps_table(START_TABLE_COLUMNS, rows, formats)


def _result_fields(result: IdentificationResult) -> list[ReportField]:
    fields: list[ReportField] = [
        ("cost", result.cost, "m"),
        ("best_start_index", result.best_start_index, ""),
        ("n_starts", len(result.starts), ""),
        ("refined", result.refined, ""),
    ]
    fields.extend(
        (name, result.params_hat[name], PARAMETER_UNITS[name]) for name in FREE_PARAMETERS
    )
    return fields


def _metrics_fields(report: MetricsReport) -> list[ReportField]:
    fields: list[ReportField] = [
        ("rms_error", report.rms_error, "m"),
        ("phase_lag", report.phase_lag, "deg"),
        ("overshoot", report.overshoot, "%"),
        ("peak_error", report.peak_error, "m"),
        ("cycles", len(report.cycles), ""),
    ]
    for cycle in report.cycles:
        fields.extend(
            [
                (f"cycle_{cycle.index}.rms_error", cycle.rms_error, "m"),
                (f"cycle_{cycle.index}.peak_error", cycle.peak_error, "m"),
                (f"cycle_{cycle.index}.overshoot", cycle.overshoot, "%"),
            ]
        )
    return fields


def dumps(obj: Dumpable) -> str:
    """Dumps a trajectory, identification result or metrics report to a string.

    Args:
        obj: The object to dump.

    Raises:
        TypeError: If the object is of none of the supported types.

    Returns:
        str: CSV for trajectories, ``key = value # unit`` text otherwise.
    """
    if isinstance(obj, Trajectory):
        return dumps_table(obj.column_names(), obj.as_array())
    if isinstance(obj, IdentificationResult):
        return dumps_fields(_result_fields(obj), "identification result")
    if isinstance(obj, MetricsReport):
        return dumps_fields(_metrics_fields(obj), "tracking metrics")
    raise TypeError(
        "Input must be a Trajectory, IdentificationResult or MetricsReport, "
        f"got {type(obj).__name__}"
    )


def dump(obj: Dumpable, filename: str) -> None:
    """Dumps an object to a file; see :func:`dumps`."""
    text = dumps(obj)
    with open(filename, "w", encoding="utf-8", newline="\n") as file:
        file.write(text)
