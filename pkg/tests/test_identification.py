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
Module containing unit tests for parameter identification and area calibration.

"""
import math

import numpy as np
import pytest

from pypma import dumps
from pypma.elements import IdentificationProblem, PlantState, PressureSignal, SignalKind, SimClock
from pypma.entrypoint import dumps_start_table
from pypma.exceptions import (
    CalibrationError,
    IdentificationError,
    IntegrationDivergedError,
    ValidationError,
)
from pypma.identification import (
    average_response,
    calibrate_area,
    evaluate_cost,
    identify,
    synthesize_recordings,
)
from pypma.integrator import simulate, simulate_commands
from pypma.maps import (
    CALIBRATED_AREA_M2,
    DIVERGENCE_PENALTY_M,
    FREE_PARAMETERS,
    STEADY_STATE_EXTENSION_M,
    STEADY_STATE_PRESSURE_PA,
)
from tests.utils import carriage_plant, characterization_chirp


def _truth(duration: float = 15.0):
    clock = SimClock(t_end=duration)
    return simulate(PlantState(), characterization_chirp(duration), carriage_plant(), clock)


def _half_boxes(params) -> dict[str, tuple[float, float]]:
    bounds = {}
    for name, value in params.free_parameters().items():
        lo, hi = sorted((0.5 * value, 1.5 * value))
        bounds[name] = (lo, hi)
    return bounds


def _problem(recorded, **kwargs) -> IdentificationProblem:
    fixed = carriage_plant()
    kwargs.setdefault("bounds", _half_boxes(fixed))
    return IdentificationProblem(recorded=recorded, fixed=fixed, **kwargs)


def test_average_response_single_run():
    """Test that averaging one run returns it unchanged."""
    truth = _truth(1.0)
    assert average_response([truth]) is truth


def test_average_response_cancels_opposite_runs():
    """Test that runs x and -x average to zero."""
    truth = _truth(1.0)
    mirrored = truth.with_columns(x=-truth.x)
    assert np.all(average_response([truth, mirrored]).x == 0.0)


def test_average_response_rejects_mismatched_grids():
    """Test that runs must share the time grid."""
    with pytest.raises(ValidationError, match="does not share the time grid"):
        average_response([_truth(1.0), _truth(2.0)])


def test_average_response_rejects_empty_input():
    """Test that at least one run is required."""
    with pytest.raises(ValidationError):
        average_response([])


def test_average_response_reduces_noise():
    """Test that averaging ten runs shrinks the noise by sqrt(10)."""
    truth = _truth()
    runs = synthesize_recordings(truth, runs=10, noise_std=5.0e-4, rng_seed=3)
    deviation = average_response(runs).x - truth.x
    assert np.std(deviation) == pytest.approx(5.0e-4 / math.sqrt(10), rel=0.05)
    assert np.array_equal(average_response(runs).t, truth.t)


def test_synthesize_recordings_is_seeded():
    """Test that recordings are reproducible from the seed."""
    truth = _truth(1.0)
    first = synthesize_recordings(truth, 3, 1e-4, rng_seed=11)
    second = synthesize_recordings(truth, 3, 1e-4, rng_seed=11)
    for a, b in zip(first, second):
        assert np.array_equal(a.x, b.x)
    assert not np.array_equal(first[0].x, first[1].x)


def test_cost_is_zero_on_own_data():
    """Test that the generating parameters reproduce noiseless data."""
    truth = _truth(5.0)
    problem = _problem(truth)
    assert evaluate_cost(carriage_plant().free_parameters(), problem) < 1e-12


def test_cost_of_constant_offset():
    """Test that a constant 1 mm residual costs exactly 1 mm."""
    truth = _truth(5.0)
    problem = _problem(truth.with_columns(x=truth.x + 1.0e-3))
    assert evaluate_cost(carriage_plant().free_parameters(), problem) == pytest.approx(
        1.0e-3, rel=1e-9
    )


def test_cost_accepts_ordered_array():
    """Test that a candidate may be given in free-parameter order."""
    truth = _truth(2.0)
    problem = _problem(truth)
    values = carriage_plant().free_parameters()
    as_array = [values[name] for name in FREE_PARAMETERS]
    assert evaluate_cost(as_array, problem) == evaluate_cost(values, problem)


def test_cost_agrees_with_refined_step():
    """Test that re-simulating at a tenth of the step changes the cost by under 2%."""
    truth = _truth()
    recorded = average_response(synthesize_recordings(truth, 10, 1.0e-3, rng_seed=5))
    candidate = carriage_plant().free_parameters()

    coarse = evaluate_cost(candidate, _problem(recorded))
    fine = evaluate_cost(candidate, _problem(recorded, sim_dt=1.0e-4))
    assert fine == pytest.approx(coarse, rel=0.02)


@pytest.mark.parametrize(
    "change", [{"alpha": 100.0}, {"K_e": 1.0}, {"gamma": math.nan}, {"p_dz": -1.0}]
)
def test_cost_rejects_out_of_bounds_candidate(change):
    """Test that candidates outside the bound box are rejected."""
    problem = _problem(_truth(1.0))
    candidate = dict(carriage_plant().free_parameters(), **change)
    with pytest.raises(ValidationError):
        evaluate_cost(candidate, problem)


def test_cost_rejects_incomplete_candidate():
    """Test that all six free parameters are required."""
    problem = _problem(_truth(1.0))
    with pytest.raises(ValidationError, match="missing"):
        evaluate_cost({"alpha": 23.705}, problem)


def test_cost_penalizes_divergence(monkeypatch):
    """Test that a diverged simulation costs the penalty instead of raising."""

    def diverge(*args, **kwargs):
        raise IntegrationDivergedError(0.5)

    monkeypatch.setattr("pypma.identification.integrate", diverge)
    problem = _problem(_truth(1.0))
    assert evaluate_cost(carriage_plant().free_parameters(), problem) == DIVERGENCE_PENALTY_M


def test_identify_fails_when_every_start_diverges(monkeypatch):
    """Test that identification reports failure when no start escapes the penalty."""

    def diverge(*args, **kwargs):
        raise IntegrationDivergedError(0.5)

    problem = _problem(_truth(1.0), n_starts=2, max_iterations=5, refine_rounds=0)
    monkeypatch.setattr("pypma.identification.integrate", diverge)
    with pytest.raises(IdentificationError, match="no start converged"):
        identify(problem)


def test_identify_from_true_start():
    """Test that a single search started at the truth stays there."""
    truth = _truth(5.0)
    problem = _problem(
        truth,
        n_starts=1,
        max_iterations=50,
        refine_rounds=0,
        initial_guess=carriage_plant().free_parameters(),
    )
    result = identify(problem)
    assert result.cost < 1e-9
    assert result.best_start_index == 0
    assert len(result.starts) == 1


def test_identify_is_deterministic():
    """Test that two runs with the same seed give identical results."""
    truth = _truth(3.0)
    problem = _problem(truth, n_starts=3, max_iterations=40, refine_rounds=1, rng_seed=9)
    threaded = _problem(
        truth, n_starts=3, max_iterations=40, refine_rounds=1, rng_seed=9, workers=3
    )

    first, second, third = identify(problem), identify(problem), identify(threaded)
    assert dumps(first) == dumps(second) == dumps(third)
    assert dumps_start_table(first) == dumps_start_table(third)


def test_identify_result_invariants():
    """Test that the result is within bounds and never worse than any start."""
    truth = _truth(3.0)
    problem = _problem(truth, n_starts=4, max_iterations=60, refine_rounds=2, rng_seed=1)
    result = identify(problem)

    assert result.cost == evaluate_cost(result.params_hat, problem)
    assert all(result.cost <= record.cost + 1e-15 for record in result.starts)
    for name, value in result.params_hat.items():
        lo, hi = problem.bounds[name]
        assert lo <= value <= hi
    assert [record.start_index for record in result.starts] == [0, 1, 2, 3]


def test_identify_recovers_chirp_response():
    """Test recovery from averaged noisy chirp recordings within +/-50% boxes."""
    truth = _truth()
    recorded = average_response(synthesize_recordings(truth, 10, 1.0e-4, rng_seed=7))
    problem = _problem(recorded, n_starts=20, rng_seed=7, workers=4)

    result = identify(problem)
    fitted = simulate_commands(PlantState(), truth.t, truth.p_cmd, result.plant(problem.fixed))
    assert result.cost < 3.0e-4
    assert np.sqrt(np.mean((fitted.x - truth.x) ** 2)) < 3.0e-4


def test_identify_recovers_noiseless_response():
    """Test that noiseless data are fitted to within 0.2 mm from 20 starts in +/-50% boxes."""
    truth = _truth(5.0)
    problem = _problem(truth, n_starts=20, rng_seed=3, workers=4)

    result = identify(problem)
    fitted = simulate_commands(PlantState(), truth.t, truth.p_cmd, result.plant(problem.fixed))
    assert result.cost < 2.0e-4
    assert np.sqrt(np.mean((fitted.x - truth.x) ** 2)) < 2.0e-4


def test_recovered_cost_grows_with_noise():
    """Test that the median recovered cost does not fall as the measurement noise rises."""
    truth = _truth(3.0)
    medians = []
    for noise_std in (0.0, 1.0e-4, 5.0e-4):
        costs = []
        for seed in (1, 2, 3):
            recorded = synthesize_recordings(truth, 1, noise_std, rng_seed=seed)[0]
            problem = _problem(recorded, n_starts=4, rng_seed=seed, refine_rounds=1)
            costs.append(identify(problem).cost)
        medians.append(float(np.median(costs)))

    assert medians == sorted(medians)
    assert medians[-1] > medians[0]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_starts": 0},
        {"bounds": {"alpha": (1.0, 2.0)}},
        {"bounds": dict(_half_boxes(carriage_plant()), alpha=(0.0, 10.0))},
        {"bounds": dict(_half_boxes(carriage_plant()), beta=(3.0, 2.0))},
        {"initial_guess": {"alpha": 20.0}},
        {"workers": 0},
    ],
)
def test_identification_problem_invariants(kwargs):
    """Test that invalid problems are rejected."""
    with pytest.raises(ValidationError):
        _problem(_truth(1.0), **kwargs)


def test_sim_dt_must_divide_recorded_step():
    """Test that sub-stepping needs an integer ratio."""
    problem = _problem(_truth(1.0), sim_dt=3.0e-4)
    with pytest.raises(ValidationError, match="must divide"):
        _ = problem.substeps


def test_calibrate_area_direct_division():
    """Test the balance without gravity or hysteresis."""
    params = carriage_plant(g_signed=0.0, K_e=1000.0, alpha=1e-12, beta=1.0, gamma=0.0, p_dz=0.0)
    assert calibrate_area(0.01, 1.0e5, params) == pytest.approx(1.0e-4, rel=1e-9)


def test_calibrate_area_at_steady_state_datum():
    """Test the calibrated area shipped with the rig constants."""
    area = calibrate_area(STEADY_STATE_EXTENSION_M, STEADY_STATE_PRESSURE_PA, carriage_plant())
    assert area == pytest.approx(CALIBRATED_AREA_M2, rel=1e-5)


def test_calibrated_area_round_trip():
    """Test that the calibrated area settles at 85 mm under 0.4 MPa after 100 s."""
    area = calibrate_area(STEADY_STATE_EXTENSION_M, STEADY_STATE_PRESSURE_PA, carriage_plant())
    traj = simulate(
        PlantState(),
        PressureSignal(SignalKind.CONSTANT, offset=STEADY_STATE_PRESSURE_PA),
        carriage_plant(A=area),
        SimClock(100.0),
    )
    assert abs(traj.x[-1] - STEADY_STATE_EXTENSION_M) < 2.0e-3
    assert abs(traj.v[-1]) < 1e-6


def test_calibrate_area_rejects_inconsistent_inputs():
    """Test that a non-positive balance is reported."""
    params = carriage_plant(M=10.0)
    with pytest.raises(CalibrationError, match="inconsistent calibration inputs"):
        calibrate_area(1.0e-4, 0.4e6, params)


@pytest.mark.parametrize("x_ss, p", [(0.0, 0.4e6), (-0.01, 0.4e6), (0.085, 50000.0)])
def test_calibrate_area_rejects_invalid_inputs(x_ss, p):
    """Test that the datum must extend the actuator above the dead zone."""
    with pytest.raises(ValidationError):
        calibrate_area(x_ss, p, carriage_plant())
