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
Module generating pressure excitations and position references.

"""
from __future__ import annotations

import math
from typing import TYPE_CHECKING, Union

import numpy as np

from pypma.elements import SignalKind, SweepMode
from pypma.exceptions import ValidationError
from pypma.maps import REFERENCE_AMPLITUDE_M, REFERENCE_BIAS_M

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from pypma.elements import PressureSignal, ReferenceSignal

_TIME_TOLERANCE_S = 1e-9

Signal = Union[float, "NDArray[np.float64]"]


def _as_output(values: NDArray[np.float64], scalar: bool) -> Signal:
    return float(values) if scalar else values


def _chirp_phase(
    t: NDArray[np.float64], f0: float, f1: float, T: float, sweep: SweepMode
) -> NDArray[np.float64]:
    if sweep == SweepMode.LINEAR:
        return 2.0 * np.pi * (f0 * t + (f1 - f0) * t**2 / (2.0 * T))
    ratio = f1 / f0
    return 2.0 * np.pi * f0 * T / math.log(ratio) * (np.power(ratio, t / T) - 1.0)


def _validate_chirp(t: NDArray[np.float64], f0: float, f1: float, T: float) -> None:
    if not T > 0:
        raise ValidationError(f"chirp duration must be > 0, got {T}")
    if not f1 > f0 > 0:
        raise ValidationError(f"chirp requires f1 > f0 > 0, got f0={f0}, f1={f1}")
    if not np.all(np.isfinite(t)):
        raise ValidationError("chirp time must be finite")
    if np.any(t < -_TIME_TOLERANCE_S) or np.any(t > T + _TIME_TOLERANCE_S):
        raise ValidationError(f"chirp is defined on [0, {T}] s only")


def chirp_pressure(
    t: Union[float, ArrayLike],
    f0: float,
    f1: float,
    T: float,
    offset: float,
    amplitude: float,
    sweep: SweepMode = SweepMode.LINEAR,
) -> Signal:
    """Evaluates a swept-frequency pressure excitation.

    For the linear sweep the pressure is
    ``offset + amplitude * sin(2 pi (f0 t + (f1 - f0) t^2 / (2 T)))``; the logarithmic
    sweep grows the frequency geometrically from ``f0`` to ``f1`` instead.

    Args:
        t: Time(s) in ``[0, T]``, s.
        f0: Start frequency, Hz.
        f1: End frequency, Hz.
        T: Sweep duration, s.
        offset: Constant pressure part, Pa.
        amplitude: Sinusoid amplitude, Pa.
        sweep: Frequency law.

    Raises:
        ValidationError: If ``t`` lies outside ``[0, T]`` or the frequencies are invalid.

    Returns:
        Pressure(s), Pa; a float for scalar input.
    """
    times = np.asarray(t, dtype=np.float64)
    _validate_chirp(times, f0, f1, T)
    values = offset + amplitude * np.sin(_chirp_phase(times, f0, f1, T, sweep))
    return _as_output(values, times.ndim == 0)


def instantaneous_frequency(
    t: Union[float, ArrayLike],
    f0: float,
    f1: float,
    T: float,
    sweep: SweepMode = SweepMode.LINEAR,
) -> Signal:
    """Returns the chirp frequency at time ``t``, Hz."""
    times = np.asarray(t, dtype=np.float64)
    _validate_chirp(times, f0, f1, T)
    if sweep == SweepMode.LINEAR:
        values = f0 + (f1 - f0) * times / T
    else:
        values = f0 * np.power(f1 / f0, times / T)
    return _as_output(values, times.ndim == 0)


def sample_pressure(signal: PressureSignal, t: ArrayLike) -> NDArray[np.float64]:
    """Samples a pressure signal on a time grid.

    Args:
        signal: The signal definition.
        t: Times, s.

    Raises:
        ValidationError: If a chirp is sampled outside its sweep.

    Returns:
        np.ndarray: Commanded pressure at each time, Pa.
    """
    times = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if signal.kind == SignalKind.CONSTANT:
        return np.full_like(times, signal.offset)
    if signal.kind == SignalKind.STEP:
        return np.where(times < signal.step_time, signal.offset, signal.offset + signal.amplitude)
    if signal.kind == SignalKind.SINE:
        return signal.offset + signal.amplitude * np.sin(
            2.0 * np.pi * signal.f0 * times + signal.phase
        )
    return np.asarray(
        chirp_pressure(
            times,
            signal.f0,
            signal.f1,
            signal.duration,
            signal.offset,
            signal.amplitude,
            signal.sweep,
        )
    )


def tracking_reference(
    t: Union[float, ArrayLike],
    f: float,
    bias: float = REFERENCE_BIAS_M,
    amplitude: float = REFERENCE_AMPLITUDE_M,
    origin: float = 0.0,
) -> tuple[Signal, Signal, Signal]:
    """Evaluates the sinusoidal position reference and its exact derivatives.

    Args:
        t: Time(s), s.
        f: Reference frequency, Hz.
        bias: Mean position relative to ``origin``, m.
        amplitude: Position amplitude, m.
        origin: Plant extension of the tracking zero, m.

    Raises:
        ValidationError: If ``f`` is not positive.

    Returns:
        tuple: ``(x_d, v_d, a_d)`` in m, m/s and m/s^2.
    """
    if not f > 0:
        raise ValidationError(f"reference frequency must be > 0, got {f}")
    times = np.asarray(t, dtype=np.float64)
    omega = 2.0 * np.pi * f
    angle = omega * times
    x_d = origin + bias + amplitude * np.sin(angle)
    v_d = amplitude * omega * np.cos(angle)
    a_d = -amplitude * omega**2 * np.sin(angle)
    scalar = times.ndim == 0
    return _as_output(x_d, scalar), _as_output(v_d, scalar), _as_output(a_d, scalar)


def reference_at(ref: ReferenceSignal, t: Union[float, ArrayLike]) -> tuple[Signal, Signal, Signal]:
    """Evaluates a reference signal definition; see :func:`tracking_reference`."""
    return tracking_reference(t, ref.f, ref.bias, ref.amplitude, ref.origin)
