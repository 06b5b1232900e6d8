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
Module containing unit tests for plant integration.

"""
import math

import numpy as np
import pytest

from pypma.elements import (
    IntegrationMethod,
    PlantState,
    PressureSignal,
    SignalKind,
    SimClock,
)
from pypma.exceptions import IntegrationDivergedError, ValidationError
from pypma.integrator import integrate, simulate, simulate_commands, step_rk4
from pypma.metrics import branch_separation, loop_integral
from pypma.model import effective_pressure, steady_state_extension
from tests.utils import carriage_plant, characterization_chirp, loaded_plant


def _state_error(a: PlantState, b: PlantState) -> float:
    return float(np.linalg.norm(np.subtract(a.as_tuple(), b.as_tuple())))


def test_step_rk4_keeps_equilibrium():
    """Test that the origin stays put without gravity and pressure."""
    params = carriage_plant(g_signed=0.0)
    assert step_rk4(PlantState(), 0.0, params, 0.001) == PlantState()


def test_step_rk4_is_fourth_order():
    """Test the error ratio of one full step against two half steps."""
    params = loaded_plant()
    state = PlantState(0.01, 0.05, 2.0)
    p_eff = 2.0e5
    dt = 1.0e-3

    reference = state
    for _ in range(2000):
        reference = step_rk4(reference, p_eff, params, dt / 2000)

    full = step_rk4(state, p_eff, params, dt)
    half = step_rk4(step_rk4(state, p_eff, params, dt / 2), p_eff, params, dt / 2)
    ratio = _state_error(full, reference) / _state_error(half, reference)
    assert 12.0 < ratio < 20.0


def test_step_rk4_matches_kernel():
    """Test that the compiled kernel takes the same step as the reference implementation."""
    params = carriage_plant()
    state = PlantState(0.02, -0.03, 1.5)
    expected = step_rk4(state, 1.2e5, params, 0.001)
    states = integrate(state, [1.2e5, 1.2e5], params, 0.001)
    assert states[1] == pytest.approx(expected.as_tuple(), rel=1e-12, abs=1e-15)


def test_step_rk4_reports_divergence_time():
    """Test that a blow-up names the end time of the failing step."""
    params = carriage_plant()
    with pytest.raises(IntegrationDivergedError) as excinfo:
        step_rk4(PlantState(1e308, 1e308, 1e308), 0.0, params, 0.001, t=2.5)
    assert excinfo.value.t == pytest.approx(2.501)
    assert "2.501000" in str(excinfo.value)


def test_step_rk4_rejects_non_positive_step():
    """Test that the step must be positive."""
    with pytest.raises(ValidationError):
        step_rk4(PlantState(), 0.0, carriage_plant(), 0.0)


def test_integrate_reports_divergence_time():
    """Test that the kernel reports the first non-finite sample time."""
    params = carriage_plant()
    with pytest.raises(IntegrationDivergedError) as excinfo:
        integrate(PlantState(1e308, 1e308, 1e308), np.zeros(10), params, 0.001, t0=1.0)
    assert 1.0 < excinfo.value.t <= 1.009 + 1e-12


def test_integrate_rejects_non_finite_initial_state():
    """Test that the initial state must be finite."""
    with pytest.raises(ValidationError):
        integrate(PlantState(math.inf, 0.0, 0.0), np.zeros(3), carriage_plant(), 0.001)


def test_simulate_zero_input_stays_at_rest():
    """Test that a plant without gravity and pressure never leaves the origin."""
    params = carriage_plant(g_signed=0.0)
    clock = SimClock(t_end=2.0)
    traj = simulate(PlantState(), PressureSignal(SignalKind.CONSTANT), params, clock)

    assert len(traj) == 2001
    for column in (traj.p_cmd, traj.p_eff, traj.x, traj.v, traj.z):
        assert np.all(column == 0.0)


def test_simulate_grid_is_exact():
    """Test that sample k sits at k * dt."""
    clock = SimClock(t_end=1.5, dt=0.001)
    traj = simulate(PlantState(), characterization_chirp(1.5), carriage_plant(), clock)
    assert np.array_equal(traj.t, np.arange(1501) * 0.001)
    assert np.array_equal(traj.p_eff, effective_pressure(traj.p_cmd, carriage_plant()))


def test_simulate_is_deterministic():
    """Test that two runs produce identical trajectories."""
    clock = SimClock(t_end=3.0)
    first = simulate(PlantState(), characterization_chirp(3.0), carriage_plant(), clock)
    second = simulate(PlantState(), characterization_chirp(3.0), carriage_plant(), clock)
    assert np.array_equal(first.as_array(), second.as_array())


def test_simulate_rejects_chirp_beyond_sweep():
    """Test that a chirp cannot be sampled past its duration."""
    with pytest.raises(ValidationError):
        simulate(PlantState(), characterization_chirp(1.0), carriage_plant(), SimClock(2.0))


def test_simulate_commands_rejects_mismatched_columns():
    """Test that the command must be sampled on the time grid."""
    with pytest.raises(ValidationError):
        simulate_commands(PlantState(), np.arange(5) * 0.001, np.zeros(4), carriage_plant())


def test_chirp_matches_fine_euler_reference():
    """Test the 1 ms Runge-Kutta chirp response against a 1 us Euler integration."""
    params = carriage_plant()
    clock = SimClock(t_end=15.0)
    signal = characterization_chirp()

    rk4 = simulate(PlantState(), signal, params, clock)
    euler = simulate(
        PlantState(), signal, params, clock, method=IntegrationMethod.EULER, substeps=1000
    )
    assert len(rk4) == 15001
    assert np.max(np.abs(rk4.x - euler.x)) < 5.0e-5


def test_constant_pressure_settles_at_static_balance():
    """Test that a held 0.4 MPa settles at the root of the static balance."""
    params = carriage_plant()
    traj = simulate(
        PlantState(), PressureSignal(SignalKind.CONSTANT, offset=0.4e6), params, SimClock(100.0)
    )
    assert abs(traj.v[-1]) < 1e-6
    assert traj.x[-1] == pytest.approx(steady_state_extension(0.4e6, params), abs=1e-4)


def test_pressure_cycle_is_hysteretic():
    """Test the loop area and branch gap of a 0.5 Hz 0 -> 0.4 MPa -> 0 cycle."""
    params = carriage_plant()
    signal = PressureSignal(
        SignalKind.SINE, offset=0.2e6, amplitude=0.2e6, f0=0.5, phase=-0.5 * math.pi
    )
    traj = simulate(PlantState(), signal, params, SimClock(6.0))
    last_cycle = slice(4000, 6001)

    assert traj.p_cmd[0] == pytest.approx(0.0, abs=1e-6)
    assert loop_integral(traj.p_eff[last_cycle], traj.x[last_cycle], params.A) > 0
    assert branch_separation(traj.p_cmd, traj.x, 0.2e6) > 1.0e-3
