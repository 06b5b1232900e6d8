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
Module for fixed-step integration of the actuator ODE under zero-order-hold pressure.

"""
from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

# pylint: disable-next=no-name-in-module
from pypma.accelerate.plant import integrate_zero_order_hold  # type: ignore
from pypma.elements import IntegrationMethod, PlantState, Trajectory
from pypma.exceptions import IntegrationDivergedError, ValidationError
from pypma.model import dynamics_rhs, effective_pressure
from pypma.signals import sample_pressure
from pypma.validator import ParameterValidator

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from pypma.elements import PlantParams, PressureSignal, SimClock

logger = logging.getLogger(__name__)


def step_rk4(
    state: PlantState, p_eff: float, params: PlantParams, dt: float, t: float = 0.0
) -> PlantState:
    """Takes one classical Runge-Kutta step with the pressure held over the step.

    Args:
        state: State at time ``t``.
        p_eff: Effective pressure held over ``[t, t + dt)``, Pa.
        params: Plant parameters.
        dt: Step, s.
        t: Time of ``state``, used to report divergence.

    Raises:
        ValidationError: If ``dt`` is not positive.
        IntegrationDivergedError: If any stage or the result is not finite.

    Returns:
        PlantState: State at ``t + dt``.
    """
    ParameterValidator.validate_positive("dt", dt)
    try:
        k1 = dynamics_rhs(state, p_eff, params)
        k2 = dynamics_rhs(_advance(state, k1, 0.5 * dt), p_eff, params)
        k3 = dynamics_rhs(_advance(state, k2, 0.5 * dt), p_eff, params)
        k4 = dynamics_rhs(_advance(state, k3, dt), p_eff, params)
    except IntegrationDivergedError as err:
        raise IntegrationDivergedError(t + dt) from err

    scale = dt / 6.0
    result = PlantState(
        state.x + scale * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        state.v + scale * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        state.z + scale * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    )
    if not result.is_finite():
        raise IntegrationDivergedError(t + dt)
    return result


def _advance(state: PlantState, rate: tuple[float, float, float], h: float) -> PlantState:
    return PlantState(state.x + h * rate[0], state.v + h * rate[1], state.z + h * rate[2])


def integrate(
    initial: PlantState,
    p_eff: ArrayLike,
    params: PlantParams,
    dt: float,
    method: IntegrationMethod = IntegrationMethod.RK4,
    substeps: int = 1,
    t0: float = 0.0,
) -> NDArray[np.float64]:
    """Integrates the plant over a pressure sequence held constant between samples.

    Sample ``k`` of ``p_eff`` drives the step from ``t0 + k dt`` to ``t0 + (k + 1) dt``;
    the last sample is not applied.

    Args:
        initial: State at ``t0``.
        p_eff: Effective pressures, Pa.
        params: Plant parameters.
        dt: Grid step, s.
        method: Integration scheme.
        substeps: Integration steps per grid step.
        t0: Time of the first sample, s.

    Raises:
        ValidationError: If the initial state or the step settings are invalid.
        IntegrationDivergedError: If a grid sample is not finite.

    Returns:
        np.ndarray: ``(len(p_eff), 3)`` array of ``x``, ``v`` and ``z``.
    """
    if not initial.is_finite():
        raise ValidationError(f"initial state must be finite, got {initial}")
    ParameterValidator.validate_positive("dt", dt)
    if substeps < 1:
        raise ValidationError(f"substeps must be >= 1, got {substeps}")

    pressures = np.ascontiguousarray(p_eff, dtype=np.float64)
    states, diverged = integrate_zero_order_hold(
        pressures,
        initial.x,
        initial.v,
        initial.z,
        dt,
        substeps,
        method.value,
        params.total_mass,
        params.K_e,
        params.d,
        params.g_signed,
        params.A,
        params.alpha,
        params.beta,
        params.gamma,
    )
    if diverged >= 0:
        t_fail = t0 + diverged * dt
        logger.debug("Plant integration diverged at t = %s s", t_fail)
        raise IntegrationDivergedError(t_fail)
    return states


def simulate_commands(
    initial: PlantState,
    t: ArrayLike,
    p_cmd: ArrayLike,
    params: PlantParams,
    method: IntegrationMethod = IntegrationMethod.RK4,
    substeps: int = 1,
) -> Trajectory:
    """Simulates the plant response to a sampled pressure command.

    Args:
        initial: State at ``t[0]``.
        t: Uniform time grid, s.
        p_cmd: Commanded pressure on the grid, Pa.
        params: Plant parameters.
        method: Integration scheme.
        substeps: Integration steps per grid step.

    Raises:
        ValidationError: If the grid is not uniform or the columns differ in length.
        IntegrationDivergedError: If the integration blows up.

    Returns:
        Trajectory: The sampled response.
    """
    times = np.asarray(t, dtype=np.float64)
    commands = np.asarray(p_cmd, dtype=np.float64)
    if times.shape != commands.shape:
        raise ValidationError("t and p_cmd must have the same shape")
    dt = ParameterValidator.validate_uniform_grid(times)
    if not np.all(np.isfinite(commands)):
        raise ValidationError("p_cmd must be finite")

    pressures = effective_pressure(commands, params)
    states = integrate(initial, pressures, params, dt, method, substeps, float(times[0]))
    return Trajectory(
        t=times,
        p_cmd=commands,
        p_eff=pressures,
        x=states[:, 0],
        v=states[:, 1],
        z=states[:, 2],
    )


def simulate(
    initial: PlantState,
    pressure: PressureSignal,
    params: PlantParams,
    clock: SimClock,
    method: IntegrationMethod = IntegrationMethod.RK4,
    substeps: int = 1,
) -> Trajectory:
    """Simulates the plant driven by a pressure signal on the clock grid.

    Args:
        initial: State at ``t = 0``.
        pressure: Commanded pressure signal.
        params: Plant parameters.
        clock: Simulation clock; the grid is ``k * dt`` for ``k = 0..n_steps``.
        method: Integration scheme.
        substeps: Integration steps per clock step.

    Raises:
        ValidationError: If the signal is undefined on the clock span.
        IntegrationDivergedError: If the integration blows up.

    Returns:
        Trajectory: ``n_steps + 1`` rows including commanded and effective pressure.
    """
    times = clock.times()
    commands = sample_pressure(pressure, times)
    logger.debug(
        "Simulating %s pressure for %s steps of %s s", pressure.kind.value, clock.n_steps, clock.dt
    )
    return simulate_commands(initial, times, commands, params, method, substeps)
