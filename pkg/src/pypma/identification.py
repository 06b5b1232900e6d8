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
Module recovering the hysteresis, stiffness, damping and dead-zone parameters from
recorded pressure/extension data.

The cost is the RMS difference between the recorded extension and the response of the
candidate model to the recorded command. Local searches run the bounded Nelder-Mead
simplex of :func:`scipy.optimize.minimize` in coordinates normalized to the unit cube,
so that parameters spanning five orders of magnitude move on a common scale.

"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING, Mapping, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from pypma.elements import IdentificationResult, StartRecord, Trajectory
from pypma.exceptions import (
    CalibrationError,
    IdentificationError,
    IntegrationDivergedError,
    ValidationError,
)
from pypma.integrator import integrate
from pypma.maps import DIVERGENCE_PENALTY_M, FREE_PARAMETERS
from pypma.model import effective_pressure, quasi_static_z

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from pypma.elements import IdentificationProblem, PlantParams

logger = logging.getLogger(__name__)

Candidate = Union[Mapping[str, float], "ArrayLike"]

_INITIAL_SIMPLEX_STEP = 0.1
_BOUND_TOLERANCE = 1e-12


def average_response(runs: Sequence[Trajectory]) -> Trajectory:
    """Averages repeated recordings sample by sample.

    Args:
        runs: Recordings on identical time grids.

    Raises:
        ValidationError: If no runs are given or the grids differ.

    Returns:
        Trajectory: Pointwise mean of every column on the shared grid.
    """
    if len(runs) == 0:
        raise ValidationError("average_response requires at least one run")
    reference = runs[0]
    for index, run in enumerate(runs[1:], start=1):
        if len(run) != len(reference) or not np.array_equal(run.t, reference.t):
            raise ValidationError(f"run {index} does not share the time grid of run 0")
    if len(runs) == 1:
        return reference

    averaged = {
        name: np.mean([getattr(run, name) for run in runs], axis=0)
        for name in reference.column_names()
        if name != "t"
    }
    return reference.with_columns(**averaged)


def synthesize_recordings(
    truth: Trajectory, runs: int, noise_std: float, rng_seed: int = 0
) -> list[Trajectory]:
    """Emulates repeated measurements by adding Gaussian position noise.

    Args:
        truth: Noiseless response.
        runs: Number of recordings.
        noise_std: Standard deviation of the position noise, m.
        rng_seed: Seed of the noise generator.

    Raises:
        ValidationError: If ``runs < 1`` or ``noise_std < 0``.

    Returns:
        list[Trajectory]: Copies of ``truth`` with noisy ``x``.
    """
    if runs < 1:
        raise ValidationError(f"runs must be >= 1, got {runs}")
    if not noise_std >= 0:
        raise ValidationError(f"noise_std must be >= 0, got {noise_std}")
    rng = np.random.default_rng(rng_seed)
    return [
        truth.with_columns(x=truth.x + rng.normal(0.0, noise_std, size=len(truth)))
        for _ in range(runs)
    ]


def _candidate_values(candidate: Candidate) -> dict[str, float]:
    if isinstance(candidate, Mapping):
        missing = [name for name in FREE_PARAMETERS if name not in candidate]
        if missing:
            raise ValidationError(f"candidate is missing: {', '.join(missing)}")
        return {name: float(candidate[name]) for name in FREE_PARAMETERS}
    values = np.asarray(candidate, dtype=np.float64)
    if values.shape != (len(FREE_PARAMETERS),):
        raise ValidationError(f"candidate must hold {len(FREE_PARAMETERS)} values")
    return dict(zip(FREE_PARAMETERS, (float(value) for value in values)))


def _check_in_bounds(values: Mapping[str, float], bounds: Mapping[str, tuple[float, float]]):
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValidationError(f"candidate {name} must be finite, got {value}")
        lo, hi = bounds[name]
        slack = _BOUND_TOLERANCE * max(1.0, abs(lo), abs(hi))
        if value < lo - slack or value > hi + slack:
            raise ValidationError(f"candidate {name} = {value} lies outside [{lo}, {hi}]")


def evaluate_cost(candidate: Candidate, problem: IdentificationProblem) -> float:
    """RMS difference between the recorded and the simulated extension.

    The candidate plant is simulated from ``problem.initial_state`` under the recorded
    command, sub-stepped when ``problem.sim_dt`` is finer than the recorded grid.

    Args:
        candidate: The six free parameters, as a mapping or in ``FREE_PARAMETERS`` order.
        problem: Recorded data and known parameters.

    Raises:
        ValidationError: If the candidate is incomplete, not finite or out of bounds.

    Returns:
        float: RMS error, m; ``DIVERGENCE_PENALTY_M`` when the simulation diverges.
    """
    values = _candidate_values(candidate)
    _check_in_bounds(values, problem.bounds)
    plant = problem.fixed.replace(**values)
    recorded = problem.recorded
    pressures = effective_pressure(recorded.p_cmd, plant)
    try:
        states = integrate(
            problem.initial_state,
            pressures,
            plant,
            recorded.dt,
            substeps=problem.substeps,
            t0=float(recorded.t[0]),
        )
    except IntegrationDivergedError:
        return DIVERGENCE_PENALTY_M
    residual = states[:, 0] - recorded.x
    return float(np.sqrt(np.mean(residual**2)))


class _NormalizedCost:
    """Cost evaluated in unit-cube coordinates of the bound box."""

    def __init__(self, problem: IdentificationProblem):
        self.problem = problem
        self.lower = np.array([problem.bounds[name][0] for name in FREE_PARAMETERS])
        self.upper = np.array([problem.bounds[name][1] for name in FREE_PARAMETERS])
        self.span = self.upper - self.lower

    def to_physical(self, u: NDArray[np.float64]) -> dict[str, float]:
        clipped = np.clip(u, 0.0, 1.0)
        values = np.clip(self.lower + clipped * self.span, self.lower, self.upper)
        return dict(zip(FREE_PARAMETERS, (float(value) for value in values)))

    def to_unit(self, values: Mapping[str, float]) -> NDArray[np.float64]:
        physical = np.array([values[name] for name in FREE_PARAMETERS], dtype=np.float64)
        return np.clip((physical - self.lower) / self.span, 0.0, 1.0)

    def __call__(self, u: NDArray[np.float64]) -> float:
        return evaluate_cost(self.to_physical(u), self.problem)


def _initial_simplex(u0: NDArray[np.float64]) -> NDArray[np.float64]:
    dim = u0.size
    simplex = np.tile(u0, (dim + 1, 1))
    for i in range(dim):
        step = _INITIAL_SIMPLEX_STEP
        if u0[i] + step > 1.0:
            step = -step
        simplex[i + 1, i] += step
    return simplex


def _local_search(
    cost: _NormalizedCost, u0: NDArray[np.float64]
) -> tuple[NDArray[np.float64], float, int]:
    problem = cost.problem
    result = minimize(
        cost,
        u0,
        method="Nelder-Mead",
        bounds=[(0.0, 1.0)] * u0.size,
        options={
            "initial_simplex": _initial_simplex(u0),
            "xatol": np.inf,
            "fatol": problem.cost_tolerance,
            "maxiter": problem.max_iterations,
            "adaptive": True,
        },
    )
    return np.clip(result.x, 0.0, 1.0), float(result.fun), int(result.nit)


def _start_points(problem: IdentificationProblem, cost: _NormalizedCost) -> NDArray[np.float64]:
    rng = np.random.default_rng(problem.rng_seed)
    points = rng.uniform(0.0, 1.0, size=(problem.n_starts, len(FREE_PARAMETERS)))
    if problem.initial_guess is not None:
        guess = _candidate_values(problem.initial_guess)
        _check_in_bounds(guess, problem.bounds)
        points[0] = cost.to_unit(guess)
    return points


def _run_start(cost: _NormalizedCost, index: int, u0: NDArray[np.float64]) -> StartRecord:
    u_hat, value, iterations = _local_search(cost, u0)
    logger.debug("Start %s finished at cost %s after %s iterations", index, value, iterations)
    return StartRecord(
        start_index=index,
        start_point=cost.to_physical(u0),
        converged_point=cost.to_physical(u_hat),
        cost=value,
        iterations=iterations,
    )


def identify(problem: IdentificationProblem) -> IdentificationResult:
    """Runs the multistart bounded simplex search and polishes the best start.

    Start points are drawn uniformly in the bound box from ``problem.rng_seed``; the
    first is replaced by ``problem.initial_guess`` when given. The best converged point
    (lowest cost, lowest start index on ties) is then restarted ``refine_rounds`` times
    and the polished point is kept only if it lowers the cost.

    Args:
        problem: The identification problem.

    Raises:
        IdentificationError: If every start ends at the divergence penalty.

    Returns:
        IdentificationResult: Recovered parameters, their cost and the per-start table.
    """
    cost = _NormalizedCost(problem)
    points = _start_points(problem, cost)
    logger.info(
        "Identifying %s parameters from %s starts (seed %s)",
        len(FREE_PARAMETERS),
        problem.n_starts,
        problem.rng_seed,
    )

    if problem.workers > 1:
        with ThreadPoolExecutor(max_workers=problem.workers) as executor:
            futures = [
                executor.submit(_run_start, cost, index, point)
                for index, point in enumerate(points)
            ]
            starts = [future.result() for future in futures]
    else:
        starts = [_run_start(cost, index, point) for index, point in enumerate(points)]

    best = min(starts, key=lambda record: (record.cost, record.start_index))
    if best.cost >= DIVERGENCE_PENALTY_M:
        raise IdentificationError("no start converged: every local search diverged")

    params_hat = dict(best.converged_point)
    best_cost = evaluate_cost(params_hat, problem)
    refined = False
    u_best = cost.to_unit(params_hat)
    for round_index in range(problem.refine_rounds):
        u_new, value, _ = _local_search(cost, u_best)
        if not value < best_cost:
            break
        logger.debug("Refine round %s lowered the cost to %s", round_index, value)
        u_best, best_cost = u_new, value
        params_hat = cost.to_physical(u_new)
        refined = True

    best_cost = evaluate_cost(params_hat, problem)
    logger.info("Identification finished at RMS cost %s m", best_cost)
    return IdentificationResult(
        params_hat=params_hat,
        cost=best_cost,
        starts=starts,
        best_start_index=best.start_index,
        refined=refined,
    )


def calibrate_area(
    x_ss: float, p: float, params: PlantParams, samples: int = 2001
) -> float:
    """Solves the steady-state force balance for the effective area.

    ``A = [(M + m) g_signed + K_e x_ss + z_qs(x_ss)] / p_eff`` where ``z_qs`` is the
    hysteresis force accumulated along a loading path from rest and ``p_eff`` the
    effective pressure of ``p``.

    Args:
        x_ss: Settled extension, m.
        p: Applied pressure, Pa.
        params: Plant parameters; ``A`` itself is ignored.
        samples: Loading path resolution.

    Raises:
        ValidationError: If ``x_ss <= 0`` or ``p`` does not exceed the dead zone.
        CalibrationError: If the balance yields a non-positive area.

    Returns:
        float: Effective area, m^2.
    """
    if not x_ss > 0:
        raise ValidationError(f"x_ss must be > 0, got {x_ss}")
    p_eff = effective_pressure(p, params)
    if not p_eff > 0:
        raise ValidationError(f"pressure {p} Pa does not exceed the dead zone {params.p_dz} Pa")
    z_qs = quasi_static_z(np.linspace(0.0, x_ss, samples), params)
    numerator = params.total_mass * params.g_signed + params.K_e * x_ss + z_qs
    if not numerator > 0:
        raise CalibrationError("inconsistent calibration inputs")
    area = numerator / p_eff
    logger.debug("Calibrated area %s m^2 from x_ss=%s m, p=%s Pa", area, x_ss, p)
    return float(area)

