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
Module containing unit tests for the PID and computed-torque controllers.

"""
import pytest

from pypma.controllers import (
    ComputedTorqueController,
    ControlSample,
    PidController,
    PidState,
    computed_torque_step,
    pid_step,
)
from pypma.elements import ControllerConfig, ControlMode, RegulatorModel
from pypma.exceptions import ValidationError
from tests.utils import carriage_plant

REGULATOR = RegulatorModel()


def _pid(**kwargs) -> ControllerConfig:
    return ControllerConfig(mode=ControlMode.PID, **kwargs)


def _ct(**kwargs) -> ControllerConfig:
    return ControllerConfig(mode=ControlMode.COMPUTED_TORQUE, **kwargs)


def _sample(x_m=0.0, v_hat=0.0, z_hat=0.0, x_d=0.0, v_d=0.0, a_d=0.0) -> ControlSample:
    return ControlSample(t=0.0, x_m=x_m, v_hat=v_hat, z_hat=z_hat, x_d=x_d, v_d=v_d, a_d=a_d)


def test_control_sample_errors():
    """Test the position and velocity errors of a sample."""
    sample = _sample(x_m=0.01, v_hat=0.2, x_d=0.015, v_d=0.1)
    assert sample.error == pytest.approx(0.005)
    assert sample.error_rate == pytest.approx(-0.1)


def test_pid_zero_error_from_rest():
    """Test that no error commands no pressure."""
    config = _pid(kp=1.0e7, ki=2.0e7, kd=2.0e5)
    assert pid_step(0.0, 0.0, 0.01, PidState(), config, 0.0, 0.9e6) == 0.0


def test_pid_pure_proportional():
    """Test a 1 mm error under a pure proportional law."""
    config = _pid(kp=1.0e7)
    assert pid_step(1.0e-3, 0.0, 0.01, PidState(), config, 0.0, 0.9e6) == pytest.approx(1.0e4)


def test_pid_output_is_saturated():
    """Test that the command stays within the regulator range."""
    config = _pid(kp=1.0e7)
    assert pid_step(1.0, 0.0, 0.01, PidState(), config, 0.0, 0.9e6) == 0.9e6
    assert pid_step(-1.0, 0.0, 0.01, PidState(), config, 0.0, 0.9e6) == 0.0


def test_pid_integral_respects_limit():
    """Test that the error integral never exceeds the anti-windup clamp."""
    config = _pid(kp=1.0e3, ki=1.0e3, integral_limit=0.01)
    state = PidState()
    for _ in range(1000):
        pid_step(0.05, 0.0, 0.01, state, config, 0.0, 0.9e6)
        assert abs(state.integral) <= 0.01
    assert state.integral == pytest.approx(0.01)


def test_pid_integral_freezes_in_saturation():
    """Test that the integral stops accumulating once the output saturates upward."""
    config = _pid(kp=1.0e7, ki=1.0e7, integral_limit=0.05)
    state = PidState()
    outputs = [pid_step(0.05, 0.0, 0.01, state, config, 0.0, 0.9e6) for _ in range(200)]
    frozen = state.integral

    assert state.saturated
    assert outputs[-1] == pytest.approx(0.9e6)
    assert frozen < 0.05
    pid_step(0.05, 0.0, 0.01, state, config, 0.0, 0.9e6)
    assert state.integral == frozen


def test_pid_integral_reaches_the_limit_before_freezing():
    """Test that windup stops with the output on the limit, not one step short of it."""
    config = _pid(kp=1.0e7, ki=1.0e7, integral_limit=0.05)
    state = PidState()
    outputs = [pid_step(0.05, 0.0, 0.03, state, config, 0.0, 0.9e6) for _ in range(100)]

    assert outputs[-1] == pytest.approx(0.9e6)
    assert state.saturated
    assert state.integral == pytest.approx(0.04)


def test_pid_integral_reaches_the_lower_limit():
    """Test the same rule against the lower command limit."""
    config = _pid(kp=1.0e7, ki=1.0e7, integral_limit=0.05)
    state = PidState(integral=0.02)
    outputs = [pid_step(-0.01, 0.0, 0.03, state, config, 0.0, 0.9e6) for _ in range(50)]

    assert outputs[-1] == pytest.approx(0.0, abs=1e-6)
    assert state.saturated
    assert state.integral == pytest.approx(0.01)


def test_pid_integral_unwinds_from_saturation():
    """Test that an opposite error is integrated while saturated."""
    config = _pid(kp=1.0e7, ki=1.0e7, integral_limit=0.05)
    state = PidState(integral=0.02, saturated=True)
    pid_step(-0.001, 0.0, 0.01, state, config, 0.0, 0.9e6)
    assert state.integral == pytest.approx(0.02 - 0.001 * 0.01)


def test_pid_controller_uses_error_rate():
    """Test that the derivative acts on the velocity error."""
    controller = PidController(_pid(kp=0.0, kd=1.0e5), REGULATOR)
    output = controller.update(_sample(v_d=0.5, v_hat=0.1), 0.01)
    assert output == pytest.approx(4.0e4)
    assert controller.last_output == output

    controller.reset()
    assert controller.last_output == 0.0
    assert controller.state.integral == 0.0


def test_computed_torque_at_rest_cancels_dead_zone():
    """Test that the command at rest without gravity is the dead zone."""
    params = carriage_plant(g_signed=0.0)
    p_cmd = computed_torque_step(
        0.0, 0.0, (0.0, 0.0, 0.0), 0.0, params, _ct(kp=1000.0, kd=60.0), 0.0, 0.9e6
    )
    assert p_cmd == pytest.approx(params.p_dz)


def test_computed_torque_inverts_the_model():
    """Test the command against the force balance of the model."""
    params = carriage_plant()
    config = _ct(kp=1000.0, ki=10.0, kd=60.0)
    x_m, v_hat, z_hat = 0.01, 0.02, 1.5
    x_d, v_d, a_d = 0.012, 0.05, -0.3
    a_cmd = a_d + 60.0 * (v_d - v_hat) + 1000.0 * (x_d - x_m) + 10.0 * 0.002
    force = (
        params.total_mass * (a_cmd + params.g_signed)
        + params.K_e * x_m
        + params.d * v_hat
        + z_hat
    )

    p_cmd = computed_torque_step(
        x_m, v_hat, (x_d, v_d, a_d), z_hat, params, config, 0.0, 0.9e6, e_int=0.002
    )
    assert p_cmd == pytest.approx(force / params.A + params.p_dz)


@pytest.mark.parametrize("a_d, expected", [(1.0e5, 0.9e6), (-1.0e5, 0.0)])
def test_computed_torque_is_saturated(a_d, expected):
    """Test that extreme accelerations saturate the command."""
    p_cmd = computed_torque_step(
        0.0, 0.0, (0.0, 0.0, a_d), 0.0, carriage_plant(), _ct(kp=0.0), 0.0, 0.9e6
    )
    assert p_cmd == expected


def test_computed_torque_controller_integral():
    """Test that integral action accumulates only when enabled."""
    model = carriage_plant()
    without = ComputedTorqueController(_ct(kp=100.0), model, REGULATOR)
    with_integral = ComputedTorqueController(_ct(kp=100.0, ki=50.0), model, REGULATOR)
    sample = _sample(x_m=0.01, x_d=0.011)

    first = with_integral.update(sample, 0.01)
    second = with_integral.update(sample, 0.01)
    assert second > first
    assert without.update(sample, 0.01) == without.update(sample, 0.01)
    assert with_integral.model_hat is model


def test_computed_torque_inverts_at_the_preview():
    """Test that a sample with a preview is inverted at the previewed reference."""
    model = carriage_plant()
    config = _ct(kp=1000.0, kd=60.0)
    controller = ComputedTorqueController(config, model, REGULATOR)
    ahead = (0.015, 0.04, -0.2)
    sample = ControlSample(
        t=0.0, x_m=0.01, v_hat=0.02, z_hat=0.5, x_d=0.012, v_d=0.05, a_d=-0.3, ahead=ahead
    )

    expected = computed_torque_step(
        0.01 + 0.003, 0.02 - 0.01, ahead, 0.5, model, config, 0.0, 0.9e6
    )
    assert controller.update(sample, 0.01) == pytest.approx(expected)
    assert controller.preview == pytest.approx(REGULATOR.tau + 0.5 / config.command_rate)


def test_controller_rejects_slow_inner_loop():
    """Test that the inner loop cannot be slower than the command refresh."""
    with pytest.raises(ValidationError):
        _pid(kp=1.0, inner_rate=10.0, command_rate=20.0)


def test_pid_prime_holds_the_pressure():
    """Test that priming loads the integral so a zero error keeps the held pressure."""
    controller = PidController(_pid(kp=1.0e7, ki=5.0e7), REGULATOR)
    controller.prime(3.0e5)

    assert controller.last_output == 3.0e5
    assert controller.state.integral == pytest.approx(3.0e5 / 5.0e7)
    assert controller.update(_sample(), 0.01) == pytest.approx(3.0e5)
