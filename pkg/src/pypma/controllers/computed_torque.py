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
Defines the computed-torque controller that inverts the identified actuator model.
"""

from pypma.controllers.base import Controller, ControlSample
from pypma.elements import ControllerConfig, PlantParams, RegulatorModel
from pypma.exceptions import ValidationError


def computed_torque_step(  # pylint: disable=too-many-arguments
    x_m: float,
    v_hat: float,
    ref: tuple[float, float, float],
    z_hat: float,
    params_hat: PlantParams,
    config: ControllerConfig,
    p_min: float,
    p_max: float,
    e_int: float = 0.0,
) -> float:
    """Computes the pressure realizing the commanded acceleration under the model.

    ``a_cmd = a_d + kd (v_d - v_hat) + kp (x_d - x_m) + ki e_int`` and the command is
    ``[(M + m)(a_cmd + g_signed) + K_e x_m + d v_hat + z_hat] / A + p_dz``.

    Args:
        x_m: Measured extension, m.
        v_hat: Velocity estimate, m/s.
        ref: ``(x_d, v_d, a_d)`` in m, m/s and m/s^2.
        z_hat: Hysteresis force estimate, N.
        params_hat: Model used for the inversion.
        config: Gains in 1/s^2, 1/s^3 and 1/s.
        p_min: Lower command limit, Pa.
        p_max: Upper command limit, Pa.
        e_int: Integral of the position error, m*s.

    Raises:
        ValidationError: If the model area is not positive.

    Returns:
        float: Command saturated to ``[p_min, p_max]``, Pa.
    """
    if not params_hat.A > 0:
        raise ValidationError(f"model area must be > 0, got {params_hat.A}")
    x_d, v_d, a_d = ref
    a_cmd = a_d + config.kd * (v_d - v_hat) + config.kp * (x_d - x_m) + config.ki * e_int
    force = (
        params_hat.total_mass * (a_cmd + params_hat.g_signed)
        + params_hat.K_e * x_m
        + params_hat.d * v_hat
        + z_hat
    )
    p_cmd = force / params_hat.A + params_hat.p_dz
    return min(max(p_cmd, p_min), p_max)


class ComputedTorqueController(Controller):
    """
    Feedback-linearizing controller built on the estimated plant.

    The command latched now reaches the actuator through the command hold and the
    regulator lag, so the controller inverts the model one preview ``tau + 1/(2 f_cmd)``
    ahead: the reference is sampled at that time and the measured state is shifted
    along the reference by the same interval, leaving the tracking errors unchanged.

    Args:
        config (ControllerConfig): Outer-loop gains and loop timing.
        model_hat (PlantParams): Estimated plant used for the inversion.
        regulator (RegulatorModel): Supplies the admissible command range and the lag.
    """

    def __init__(
        self, config: ControllerConfig, model_hat: PlantParams, regulator: RegulatorModel
    ):
        super().__init__(config, regulator)
        self._model_hat = model_hat
        self._integral = 0.0

    @property
    def model_hat(self) -> PlantParams:
        """Returns the model used for the inversion."""
        return self._model_hat

    @property
    def preview(self) -> float:
        return self._regulator.tau + 0.5 / self._config.command_rate

    def _compute(self, sample: ControlSample, dt: float) -> float:
        if self._config.ki != 0.0:
            limit = self._config.integral_limit
            self._integral = min(max(self._integral + sample.error * dt, -limit), limit)
        x_m, v_hat = sample.x_m, sample.v_hat
        ref = (sample.x_d, sample.v_d, sample.a_d)
        if sample.ahead is not None:
            x_m += sample.ahead[0] - sample.x_d
            v_hat += sample.ahead[1] - sample.v_d
            ref = sample.ahead
        return computed_torque_step(
            x_m,
            v_hat,
            ref,
            sample.z_hat,
            self._model_hat,
            self._config,
            self._regulator.p_min,
            self._regulator.p_max,
            self._integral,
        )

    def reset(self) -> None:
        self._integral = 0.0
        self._last_output = 0.0
