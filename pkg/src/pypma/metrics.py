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
Module computing tracking and hysteresis-loop metrics.

"""
from __future__ import annotations

from typing import TYPE_CHECKING, Optional

import numpy as np

from pypma.elements import CycleMetrics, MetricsReport
from pypma.exceptions import ValidationError
from pypma.validator import ParameterValidator

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from pypma.elements import ClosedLoopTrajectory


def wrap_degrees(angle: float) -> float:
    """Wraps an angle to ``(-180, 180]`` degrees."""
    wrapped = (angle + 180.0) % 360.0 - 180.0
    return 180.0 if wrapped == -180.0 else wrapped


def _lag_samples(a: NDArray[np.float64], b: NDArray[np.float64]) -> float:
    """Delay of ``a`` behind ``b`` from the circular cross-correlation peak, in samples."""
    size = a.size
    corr = np.fft.irfft(np.fft.rfft(a) * np.conj(np.fft.rfft(b)), n=size)
    peak = int(np.argmax(corr))
    left, centre, right = corr[peak - 1], corr[peak], corr[(peak + 1) % size]
    curvature = left - 2.0 * centre + right
    offset = 0.0
    if curvature < 0:
        offset = 0.5 * (left - right) / curvature
    lag = peak + offset
    return lag - size if lag > size / 2 else lag


def _overshoot(x: NDArray[np.float64], bias: float, amplitude: float) -> float:
    if amplitude <= 0:
        return 0.0
    return max(float(np.max(x)) - bias - amplitude, 0.0) / amplitude * 100.0


def compute_metrics(
    traj: ClosedLoopTrajectory,
    f: float,
    bias: Optional[float] = None,
    amplitude: Optional[float] = None,
) -> MetricsReport:
    """Computes post-transient tracking metrics.

    The first reference period is skipped and the window is cut to a whole number of
    periods. The phase lag is positive when ``x`` lags ``x_d``.

    Args:
        traj: Closed-loop trajectory with ``x`` and ``x_d`` columns.
        f: Reference frequency, Hz.
        bias: Reference mean, m; inferred from ``x_d`` when omitted.
        amplitude: Reference amplitude, m; inferred from ``x_d`` when omitted.

    Raises:
        ValidationError: If the trajectory spans fewer than three reference periods.

    Returns:
        MetricsReport: RMS and peak error (m), phase lag (degrees), overshoot (percent)
        and the per-cycle breakdown.
    """
    ParameterValidator.validate_positive("f", f)
    dt = traj.dt
    period = int(round(1.0 / (f * dt)))
    if period < 2:
        raise ValidationError(f"reference frequency {f} Hz is not resolved by dt = {dt} s")
    if len(traj) - 1 < 3 * period:
        raise ValidationError(
            f"trajectory spans {(len(traj) - 1) * dt:.6g} s, "
            f"metrics need at least three periods ({3 * period * dt:.6g} s)"
        )

    cycles = (len(traj) - period) // period
    window = slice(period, period + cycles * period)
    x = np.asarray(traj.x[window])
    x_d = np.asarray(traj.x_d[window])
    error = x_d - x

    if bias is None or amplitude is None:
        upper, lower = float(np.max(x_d)), float(np.min(x_d))
        bias = 0.5 * (upper + lower) if bias is None else bias
        amplitude = 0.5 * (upper - lower) if amplitude is None else amplitude

    lag = _lag_samples(x - np.mean(x), x_d - np.mean(x_d))
    breakdown = []
    for index in range(cycles):
        part = slice(index * period, (index + 1) * period)
        breakdown.append(
            CycleMetrics(
                index=index,
                rms_error=float(np.sqrt(np.mean(error[part] ** 2))),
                peak_error=float(np.max(np.abs(error[part]))),
                overshoot=_overshoot(x[part], bias, amplitude),
            )
        )

    return MetricsReport(
        rms_error=float(np.sqrt(np.mean(error**2))),
        phase_lag=wrap_degrees(lag * dt * f * 360.0),
        overshoot=_overshoot(x, bias, amplitude),
        peak_error=float(np.max(np.abs(error))),
        cycles=breakdown,
    )


def _pair(a: ArrayLike, b: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    first = np.asarray(a, dtype=np.float64)
    second = np.asarray(b, dtype=np.float64)
    if first.ndim != 1 or first.shape != second.shape or first.size < 2:
        raise ValidationError("loop metrics need two equal-length series of >= 2 samples")
    return first, second


def loop_integral(p_eff: ArrayLike, x: ArrayLike, area: float) -> float:
    """Input work ``sum F dx`` along the path with ``F = area * p_eff``, trapezoid rule, J.

    Over one closed pressure cycle this is the energy dissipated by the actuator.
    """
    pressure, position = _pair(p_eff, x)
    force = area * pressure
    return float(np.sum(0.5 * (force[1:] + force[:-1]) * np.diff(position)))


def branch_separation(pressure: ArrayLike, x: ArrayLike, level: float) -> float:
    """Gap between the unloading and loading branches at a pressure level, m.

    Crossings are located by linear interpolation; the last rising crossing followed by a
    falling crossing is used, so that start-up transients drop out.

    Raises:
        ValidationError: If the series never rises through and then falls back past ``level``.

    Returns:
        float: ``x`` on the falling crossing minus ``x`` on the rising crossing.
    """
    p, position = _pair(pressure, x)
    above = p >= level
    rising = np.flatnonzero(~above[:-1] & above[1:])
    falling = np.flatnonzero(above[:-1] & ~above[1:])

    pairs = [
        (start, falling[falling > start][0]) for start in rising if np.any(falling > start)
    ]
    if not pairs:
        raise ValidationError(f"pressure never cycles through {level} Pa")

    def crossing(index: int) -> float:
        fraction = (level - p[index]) / (p[index + 1] - p[index])
        return float(position[index] + fraction * (position[index + 1] - position[index]))

    load, unload = pairs[-1]
    return crossing(int(unload)) - crossing(int(load))
