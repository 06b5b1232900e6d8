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
Module closing the position loop around the simulated actuator.

The plant integrates at the clock rate. Every inner tick the encoder is read, the
velocity and hysteresis estimates are advanced and the controller runs; every command
tick the latest controller output is latched into the regulator, which lags it and
feeds the dead zone.

"""
from __future__ import annotations

import itertools
import logging
import math
from typing import TYPE_CHECKING, Iterable, Optional

import numpy as np

from pypma.controllers import ComputedTorqueController, Controller, ControlSample, PidController
from pypma.elements import (
    ClosedLoopTrajectory,
    ControlMode,
    ControllerConfig,
    PlantState,
    VelocitySource,
)
from pypma.exceptions import IntegrationDivergedError, ValidationError
from pypma.integrator import integrate
from pypma.metrics import compute_metrics
from pypma.model import bouc_wen_rate, effective_pressure
from pypma.signals import reference_at
from pypma.validator import ParameterValidator

if TYPE_CHECKING:
    from pypma.elements import (
        PlantParams,
        ReferenceSignal,
        RegulatorModel,
        SensorModel,
        SimClock,
    )

logger = logging.getLogger(__name__)


def quantize(x: float, resolution: Optional[float]) -> float:
    """Rounds a position to the nearest encoder count; ``None`` leaves it untouched."""
    if resolution is None:
        return x
    return resolution * round(x / resolution)


class VelocityEstimator:
    """
    First-order low-pass filtered finite difference of the measured position.

    Args:
        cutoff (float): Filter cutoff, Hz.
        dt (float): Sample period, s.
    """

    def __init__(self, cutoff: float, dt: float):
        ParameterValidator.validate_positive("cutoff", cutoff)
        ParameterValidator.validate_positive("dt", dt)
        self._dt = dt
        self._gain = 1.0 - math.exp(-2.0 * math.pi * cutoff * dt)
        self._previous: Optional[float] = None
        self._estimate = 0.0

    @property
    def estimate(self) -> float:
        return self._estimate

    def update(self, x_m: float) -> float:
        """Feeds one measurement and returns the velocity estimate, m/s."""
        if self._previous is not None:
            raw = (x_m - self._previous) / self._dt
            self._estimate += self._gain * (raw - self._estimate)
        self._previous = x_m
        return self._estimate


def hysteresis_observer_step(v_hat: float, z_hat: float, params_hat: PlantParams, dt: float):
    """Advances the open-loop hysteresis estimate by one RK4 step with ``v_hat`` held.

    Args:
        v_hat: Velocity estimate, m/s.
        z_hat: Current hysteresis force estimate, N.
        params_hat: Model supplying alpha, beta and gamma.
        dt: Step, s.

    Returns:
        float: The advanced estimate, N.
    """
    ParameterValidator.validate_positive("dt", dt)
    k1 = bouc_wen_rate(v_hat, z_hat, params_hat)
    k2 = bouc_wen_rate(v_hat, z_hat + 0.5 * dt * k1, params_hat)
    k3 = bouc_wen_rate(v_hat, z_hat + 0.5 * dt * k2, params_hat)
    k4 = bouc_wen_rate(v_hat, z_hat + dt * k3, params_hat)
    return z_hat + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def regulator_gain(reg: RegulatorModel, dt: float) -> float:
    """Per-step blend factor of the regulator lag; 1 when ``tau = 0``."""
    if reg.tau == 0:
        return 1.0
    return 1.0 - math.exp(-dt / reg.tau)


def build_controller(
    config: ControllerConfig, model_hat: PlantParams, regulator: RegulatorModel
) -> Controller:
    """Instantiates the controller named by ``config.mode``."""
    if config.mode == ControlMode.PID:
        return PidController(config, regulator)
    return ComputedTorqueController(config, model_hat, regulator)


def _loop_steps(ctl: ControllerConfig, clock: SimClock) -> tuple[int, int]:
    inner = ParameterValidator.validate_divisible_rate("inner_rate", ctl.inner_rate, clock.rate)
    command = ParameterValidator.validate_divisible_rate(
        "command_rate", ctl.command_rate, clock.rate
    )
    if command % inner != 0:
        raise ValidationError(
            f"command_rate ({ctl.command_rate} Hz) must divide inner_rate ({ctl.inner_rate} Hz)"
        )
    return inner, command


# pylint: disable-next=too-many-arguments,too-many-locals
def run_closed_loop(
    plant: PlantParams,
    model_hat: PlantParams,
    ctl: ControllerConfig,
    ref: ReferenceSignal,
    sensor: SensorModel,
    reg: RegulatorModel,
    clock: SimClock,
    initial: Optional[PlantState] = None,
) -> ClosedLoopTrajectory:
    """Simulates the dual-rate tracking loop.

    The regulator starts at ``reg.start_pressure`` and the controller is primed with it;
    the velocity filter and the hysteresis observer start from the initial state. A
    controller with a preview receives the reference that far ahead as well.

    Args:
        plant: True plant.
        model_hat: Model used by the controller and the hysteresis observer.
        ctl: Controller gains and rates.
        ref: Position reference.
        sensor: Encoder model.
        reg: Regulator model.
        clock: Simulation clock.
        initial: Plant state at ``t = 0``; rest at the origin when omitted.

    Raises:
        ValidationError: If a rate does not divide the clock rate.
        IntegrationDivergedError: If the plant blows up.

    Returns:
        ClosedLoopTrajectory: The response with ``p_cmd`` the latched regulator setpoint.
    """
    inner_steps, command_steps = _loop_steps(ctl, clock)
    state = initial if initial is not None else PlantState()
    if not state.is_finite():
        raise ValidationError(f"initial state must be finite, got {state}")

    dt = clock.dt
    dt_inner = inner_steps * dt
    n = clock.n_steps
    times = clock.times()
    x_d, v_d, a_d = (np.asarray(column) for column in reference_at(ref, times))

    states = np.empty((n + 1, 3), dtype=np.float64)
    states[0] = state.as_tuple()
    p_cmd = np.empty(n + 1, dtype=np.float64)
    p_reg = np.empty(n + 1, dtype=np.float64)

    controller = build_controller(ctl, model_hat, reg)
    ahead = None
    if controller.preview > 0:
        ahead = np.column_stack(reference_at(ref, times + controller.preview))
    estimator = VelocityEstimator(ctl.velocity_cutoff, dt_inner)
    blend = regulator_gain(reg, dt)
    z_hat = state.z
    held = reg.start_pressure
    pressure = reg.start_pressure
    controller.prime(held)
    logger.debug(
        "Closed loop %s: %s steps, inner every %s, command every %s",
        ctl.mode.value,
        n,
        inner_steps,
        command_steps,
    )

    for k in range(0, n, inner_steps):
        delayed = max(k - sensor.latency, 0)
        x_m = quantize(float(states[delayed, 0]), sensor.resolution)
        v_filtered = estimator.update(x_m)
        if sensor.velocity_source == VelocitySource.PLANT:
            v_hat = float(states[delayed, 1])
        else:
            v_hat = v_filtered

        preview = None
        if ahead is not None:
            preview = (float(ahead[k, 0]), float(ahead[k, 1]), float(ahead[k, 2]))

        sample = ControlSample(
            t=float(times[k]),
            x_m=x_m,
            v_hat=v_hat,
            z_hat=z_hat,
            x_d=float(x_d[k]),
            v_d=float(v_d[k]),
            a_d=float(a_d[k]),
            ahead=preview,
        )
        output = controller.update(sample, dt_inner)
        if k % command_steps == 0:
            held = output
        z_hat = hysteresis_observer_step(v_hat, z_hat, model_hat, dt_inner)

        stop = min(k + inner_steps, n)
        for j in range(k, stop):
            pressure += blend * (held - pressure)
            p_cmd[j] = held
            p_reg[j] = pressure

        chunk = effective_pressure(np.append(p_reg[k:stop], p_reg[stop - 1]), plant)
        try:
            segment = integrate(
                PlantState(*states[k]), chunk, plant, dt, t0=float(times[k])
            )
        except IntegrationDivergedError:
            logger.debug("Closed loop diverged between %s s and %s s", times[k], times[stop])
            raise
        states[k + 1 : stop + 1] = segment[1:]

    p_cmd[n] = held
    p_reg[n] = pressure + blend * (held - pressure)
    x = states[:, 0]
    return ClosedLoopTrajectory(
        t=times,
        p_cmd=p_cmd,
        p_eff=effective_pressure(p_reg, plant),
        x=x,
        v=states[:, 1],
        z=states[:, 2],
        x_d=x_d,
        v_d=v_d,
        e=x_d - x,
    )


# pylint: disable-next=too-many-arguments
def tune_pid_gains(
    plant: PlantParams,
    ref: ReferenceSignal,
    sensor: SensorModel,
    reg: RegulatorModel,
    clock: SimClock,
    base: ControllerConfig,
    kp_grid: Iterable[float],
    ki_grid: Iterable[float],
    kd_grid: Iterable[float],
) -> tuple[ControllerConfig, float]:
    """Grid-searches PID gains for the lowest post-transient RMS tracking error.

    Gain sets whose run diverges are skipped; ties keep the first set in grid order.

    Args:
        plant: Simulated plant.
        ref: Reference used for scoring.
        sensor: Encoder model.
        reg: Regulator model.
        clock: Simulation clock; must span at least three reference periods.
        base: Supplies the loop timing and anti-windup limit.
        kp_grid: Proportional gains, Pa/m.
        ki_grid: Integral gains, Pa/(m*s).
        kd_grid: Derivative gains, Pa*s/m.

    Raises:
        ValidationError: If no gain set completes without diverging.

    Returns:
        tuple[ControllerConfig, float]: Best configuration and its RMS error, m.
    """
    best: Optional[tuple[ControllerConfig, float]] = None
    for kp, ki, kd in itertools.product(kp_grid, ki_grid, kd_grid):
        config = ControllerConfig(
            mode=ControlMode.PID,
            kp=kp,
            ki=ki,
            kd=kd,
            inner_rate=base.inner_rate,
            command_rate=base.command_rate,
            integral_limit=base.integral_limit,
            velocity_cutoff=base.velocity_cutoff,
        )
        try:
            traj = run_closed_loop(plant, plant, config, ref, sensor, reg, clock)
        except IntegrationDivergedError:
            logger.debug("Gains kp=%s ki=%s kd=%s diverged", kp, ki, kd)
            continue
        rms = compute_metrics(traj, ref.f).rms_error
        logger.debug("Gains kp=%s ki=%s kd=%s give RMS %s m", kp, ki, kd, rms)
        if best is None or rms < best[1]:
            best = (config, rms)

    if best is None:
        raise ValidationError("every PID gain set diverged")
    return best
