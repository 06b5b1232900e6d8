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
Defines the joint-space PID controller with conditional-integration anti-windup.
"""

from dataclasses import dataclass

from pypma.controllers.base import Controller, ControlSample
from pypma.elements import ControllerConfig, RegulatorModel
from pypma.validator import ParameterValidator


@dataclass
class PidState:
    """Mutable PID memory: the clamped error integral (m*s) and the last saturation flag."""

    integral: float = 0.0
    saturated: bool = False


def pid_step(
    e: float,
    e_dot: float,
    dt: float,
    state: PidState,
    config: ControllerConfig,
    p_min: float,
    p_max: float,
) -> float:
    """Advances the PID law by one tick.

    The integral is clamped to ``+/- integral_limit``. When accumulating the current
    error would drive the output past a limit, the integral only advances until the
    output sits on that limit, and it is frozen if the output is already there.

    Args:
        e: Position error, m.
        e_dot: Error rate, m/s.
        dt: Tick period, s.
        state: PID memory, updated in place.
        config: Gains in Pa/m, Pa/(m*s) and Pa*s/m.
        p_min: Lower command limit, Pa.
        p_max: Upper command limit, Pa.

    Returns:
        float: ``kp e + ki int(e) + kd e_dot`` saturated to ``[p_min, p_max]``, Pa.
    """
    ParameterValidator.validate_positive("dt", dt)
    limit = config.integral_limit
    candidate = min(max(state.integral + e * dt, -limit), limit)
    proportional = config.kp * e + config.kd * e_dot
    trial = proportional + config.ki * candidate
    push = config.ki * e
    bound = None
    if trial > p_max and push > 0:
        bound = p_max
    elif trial < p_min and push < 0:
        bound = p_min
    if bound is None:
        state.integral = candidate
    else:
        # integrate only up to the integral that puts the output on the bound
        current = proportional + config.ki * state.integral
        if (bound - current) * push > 0:
            state.integral = (bound - proportional) / config.ki

    output = proportional + config.ki * state.integral
    state.saturated = trial > p_max or trial < p_min
    return min(max(output, p_min), p_max)


class PidController(Controller):
    """
    PID on the position error, with the derivative taken on ``v_d - v_hat``.

    Args:
        config (ControllerConfig): PID gains and loop timing.
        regulator (RegulatorModel): Supplies the admissible command range.
    """

    def __init__(self, config: ControllerConfig, regulator: RegulatorModel):
        super().__init__(config, regulator)
        self._state = PidState()

    @property
    def state(self) -> PidState:
        return self._state

    def _compute(self, sample: ControlSample, dt: float) -> float:
        return pid_step(
            sample.error,
            sample.error_rate,
            dt,
            self._state,
            self._config,
            self._regulator.p_min,
            self._regulator.p_max,
        )

    def prime(self, p_hold: float) -> None:
        super().prime(p_hold)
        if self._config.ki != 0.0:
            limit = self._config.integral_limit
            self._state.integral = min(max(self.last_output / self._config.ki, -limit), limit)

    def reset(self) -> None:
        self._state = PidState()
        self._last_output = 0.0
