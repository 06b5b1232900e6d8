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
Module defining PyPMA domain elements.

"""
# pylint: disable=invalid-name,too-many-instance-attributes
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np

from pypma.exceptions import ValidationError
from pypma.maps import (
    CALIBRATED_AREA_M2,
    CARRIAGE_MASS_KG,
    CLOSED_LOOP_COLUMNS,
    COMMAND_RATE_HZ,
    DEFAULT_BOUNDS,
    DEFAULT_G_SIGNED_M_PER_S2,
    ENCODER_RESOLUTION_M,
    FREE_PARAMETERS,
    IDENTIFIED_PARAMETERS,
    INNER_RATE_HZ,
    PMA_MASS_KG,
    REFERENCE_AMPLITUDE_M,
    REFERENCE_BIAS_M,
    REGULATOR_P_MAX_PA,
    REGULATOR_P_MIN_PA,
    REGULATOR_TAU_S,
    SIM_DT_S,
    TRAJECTORY_COLUMNS,
    VELOCITY_CUTOFF_HZ,
)
from pypma.validator import ParameterValidator


class SignalKind(Enum):
    """
    Enum for the pressure excitation shapes.
    """

    CONSTANT = "constant"
    STEP = "step"
    CHIRP = "chirp"
    SINE = "sine"


class SweepMode(Enum):
    """
    Enum for the chirp frequency sweep law.
    """

    LINEAR = "linear"
    LOGARITHMIC = "logarithmic"


class ControlMode(Enum):
    """
    Enum for the available position controllers.
    """

    PID = "pid"
    COMPUTED_TORQUE = "computed_torque"


class VelocitySource(Enum):
    """
    Enum for the velocity fed to the controller.
    """

    FILTERED_DIFFERENCE = "filtered_difference"
    PLANT = "plant"


class IntegrationMethod(Enum):
    """
    Enum for the fixed-step integration schemes of the plant kernel.
    """

    RK4 = 0
    EULER = 1


@dataclass(frozen=True)
class PlantParams:
    """
    Physical and hysteresis parameters of the single-DOF actuator model.

    Bouc-Wen coefficients are stored as plain scalars. With the hysteresis force in
    newtons, dimensional consistency gives alpha in N/m and beta, gamma in 1/m.

    Attributes:
        M (float): Load mass, kg.
        m (float): Actuator mass, kg.
        K_e (float): Linear elastic stiffness, N/m.
        d (float): Viscous damping, N*s/m.
        g_signed (float): Signed gravity term, m/s^2; negative when gravity aids extension.
        A (float): Effective cross-sectional area, m^2.
        p_dz (float): Pressure dead zone, Pa.
        alpha (float): Bouc-Wen scale, N/m.
        beta (float): Bouc-Wen shape, 1/m.
        gamma (float): Bouc-Wen shape, 1/m.
        p_max (float): Regulator saturation ceiling, Pa.
    """

    M: float
    m: float
    K_e: float
    d: float
    g_signed: float
    A: float
    p_dz: float
    alpha: float
    beta: float
    gamma: float
    p_max: float = REGULATOR_P_MAX_PA

    def __post_init__(self):
        ParameterValidator.validate_positive("M", self.M, allow_zero=True)
        ParameterValidator.validate_positive("m", self.m)
        ParameterValidator.validate_positive("K_e", self.K_e)
        ParameterValidator.validate_positive("d", self.d, allow_zero=True)
        ParameterValidator.validate_finite("g_signed", self.g_signed)
        ParameterValidator.validate_positive("A", self.A)
        ParameterValidator.validate_positive("p_dz", self.p_dz, allow_zero=True)
        ParameterValidator.validate_positive("alpha", self.alpha)
        ParameterValidator.validate_positive("beta", self.beta)
        ParameterValidator.validate_finite("gamma", self.gamma)
        ParameterValidator.validate_finite("p_max", self.p_max)
        if not self.p_max > self.p_dz:
            raise ValidationError(f"p_max must exceed p_dz, got {self.p_max} <= {self.p_dz}")

    @classmethod
    def identified(
        cls,
        M: float = CARRIAGE_MASS_KG,
        g_signed: float = DEFAULT_G_SIGNED_M_PER_S2,
        A: float = CALIBRATED_AREA_M2,
        **overrides: float,
    ) -> PlantParams:
        """Build the identified actuator model with the given load, gravity sign and area."""
        values: dict[str, float] = dict(IDENTIFIED_PARAMETERS)
        values.update(overrides)
        return cls(M=M, m=values.pop("m", PMA_MASS_KG), g_signed=g_signed, A=A, **values)

    @property
    def total_mass(self) -> float:
        """Moving mass M + m, kg."""
        return self.M + self.m

    def free_parameters(self) -> dict[str, float]:
        """Returns the identifiable subset of the parameters."""
        return {name: float(getattr(self, name)) for name in FREE_PARAMETERS}

    def replace(self, **changes: float) -> PlantParams:
        """Returns a validated copy with the given fields changed."""
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class PlantState:
    """Continuous plant state: extension x (m), velocity v (m/s), hysteresis force z (N)."""

    x: float = 0.0
    v: float = 0.0
    z: float = 0.0

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.v) and math.isfinite(self.z)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.v, self.z)


@dataclass(frozen=True)
class SimClock:
    """
    Fixed-step simulation clock.

    Attributes:
        t_end (float): Duration, s.
        dt (float): Step, s.
    """

    t_end: float
    dt: float = SIM_DT_S

    def __post_init__(self):
        ParameterValidator.validate_positive("dt", self.dt)
        ParameterValidator.validate_positive("t_end", self.t_end)
        if self.n_steps < 1:
            raise ValidationError(f"t_end = {self.t_end} s is shorter than one step")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def rate(self) -> float:
        """Simulation rate, Hz."""
        return 1.0 / self.dt

    def times(self) -> np.ndarray:
        """Returns the grid ``t[k] = k * dt`` for ``k = 0..n_steps``."""
        return np.arange(self.n_steps + 1, dtype=np.float64) * self.dt


@dataclass(frozen=True)
class PressureSignal:  # pylint: disable=too-many-instance-attributes
    """
    Commanded pressure excitation.

    Attributes:
        kind (SignalKind): Waveform shape.
        offset (float): Constant part, Pa. For steps, the level before ``step_time``.
        amplitude (float): Sinusoid amplitude or step height, Pa.
        f0 (float): Sine frequency or chirp start frequency, Hz.
        f1 (float): Chirp end frequency, Hz.
        duration (float): Chirp sweep duration, s.
        step_time (float): Step instant, s.
        phase (float): Sine phase, rad.
        sweep (SweepMode): Chirp frequency law.
    """

    kind: SignalKind
    offset: float = 0.0
    amplitude: float = 0.0
    f0: float = 0.0
    f1: float = 0.0
    duration: float = 0.0
    step_time: float = 0.0
    phase: float = 0.0
    sweep: SweepMode = SweepMode.LINEAR

    def __post_init__(self):
        for name in ("offset", "amplitude", "f0", "f1", "duration", "step_time", "phase"):
            ParameterValidator.validate_finite(name, getattr(self, name))
        if self.kind == SignalKind.CHIRP:
            ParameterValidator.validate_positive("duration", self.duration)
            ParameterValidator.validate_positive("f0", self.f0)
            if not self.f1 > self.f0:
                raise ValidationError(f"chirp requires f1 > f0, got f0={self.f0}, f1={self.f1}")
        elif self.kind == SignalKind.SINE:
            ParameterValidator.validate_positive("f0", self.f0)
        elif self.kind == SignalKind.STEP:
            ParameterValidator.validate_positive("step_time", self.step_time, allow_zero=True)


@dataclass(frozen=True)
class ReferenceSignal:
    """
    Sinusoidal position reference ``x_d(t) = origin + bias + amplitude * sin(2 pi f t)``.

    ``origin`` is the plant extension the tracking coordinate is measured from, so that
    a loaded actuator can follow the whole stroke above its unpressurized rest length.
    """

    f: float
    bias: float = REFERENCE_BIAS_M
    amplitude: float = REFERENCE_AMPLITUDE_M
    origin: float = 0.0

    def __post_init__(self):
        ParameterValidator.validate_positive("f", self.f)
        ParameterValidator.validate_finite("origin", self.origin)
        ParameterValidator.validate_finite("bias", self.bias)
        ParameterValidator.validate_finite("amplitude", self.amplitude)

    @property
    def period(self) -> float:
        return 1.0 / self.f

    @property
    def center(self) -> float:
        """Mean reference position in plant coordinates, m."""
        return self.origin + self.bias


def _frozen_column(name: str, values: Any) -> np.ndarray:
    column = np.array(values, dtype=np.float64, copy=True)
    if column.ndim != 1:
        raise ValidationError(f"column '{name}' must be one-dimensional")
    if not np.all(np.isfinite(column)):
        raise ValidationError(f"column '{name}' contains non-finite values")
    column.setflags(write=False)
    return column


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Uniformly sampled plant response.

    Row ``k`` holds the state at ``t[k]`` and the pressures applied over
    ``[t[k], t[k] + dt)``.

    Attributes:
        t (np.ndarray): Time grid, s.
        p_cmd (np.ndarray): Commanded pressure, Pa.
        p_eff (np.ndarray): Effective pressure after saturation and dead zone, Pa.
        x (np.ndarray): Extension (or measured extension for recordings), m.
        v (np.ndarray): Velocity, m/s.
        z (np.ndarray): Hysteresis force, N.
    """

    t: np.ndarray
    p_cmd: np.ndarray
    p_eff: np.ndarray
    x: np.ndarray
    v: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        lengths = set()
        for name in self.column_names():
            column = _frozen_column(name, getattr(self, name))
            object.__setattr__(self, name, column)
            lengths.add(column.size)
        if len(lengths) != 1:
            raise ValidationError("all trajectory columns must have the same length")
        ParameterValidator.validate_uniform_grid(self.t)

    @classmethod
    def column_names(cls) -> tuple[str, ...]:
        return TRAJECTORY_COLUMNS

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def __len__(self) -> int:
        return int(self.t.size)

    def columns(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in self.column_names()}

    def as_array(self) -> np.ndarray:
        """Returns the columns stacked as an ``(n, k)`` array in schema order."""
        return np.column_stack([getattr(self, name) for name in self.column_names()])

    def with_columns(self, **columns: np.ndarray) -> Trajectory:
        """Returns a copy with some columns replaced."""
        values = self.columns()
        values.update(columns)
        return type(self)(**values)

    def final_state(self) -> PlantState:
        return PlantState(float(self.x[-1]), float(self.v[-1]), float(self.z[-1]))


@dataclass(frozen=True, eq=False)
class ClosedLoopTrajectory(Trajectory):
    """Closed-loop response with the reference position, velocity and tracking error."""

    x_d: np.ndarray
    v_d: np.ndarray
    e: np.ndarray

    @classmethod
    def column_names(cls) -> tuple[str, ...]:
        return CLOSED_LOOP_COLUMNS


@dataclass(frozen=True)
class ControllerConfig:
    """
    Position controller gains and dual-rate timing.

    Attributes:
        mode (ControlMode): Controller family.
        kp (float): Pa/m for PID, 1/s^2 for computed torque.
        ki (float): Pa/(m*s) for PID, 1/s^3 for computed torque.
        kd (float): Pa*s/m for PID, 1/s for computed torque.
        inner_rate (float): Controller update rate, Hz.
        command_rate (float): Regulator command refresh rate, Hz.
        integral_limit (float): Anti-windup clamp on the error integral, m*s.
        velocity_cutoff (float): Cutoff of the velocity estimate filter, Hz.
    """

    mode: ControlMode
    kp: float
    ki: float = 0.0
    kd: float = 0.0
    inner_rate: float = INNER_RATE_HZ
    command_rate: float = COMMAND_RATE_HZ
    integral_limit: float = 0.05
    velocity_cutoff: float = VELOCITY_CUTOFF_HZ

    def __post_init__(self):
        for name in ("kp", "ki", "kd"):
            ParameterValidator.validate_finite(name, getattr(self, name))
        ParameterValidator.validate_positive("inner_rate", self.inner_rate)
        ParameterValidator.validate_positive("command_rate", self.command_rate)
        ParameterValidator.validate_positive("integral_limit", self.integral_limit)
        ParameterValidator.validate_positive("velocity_cutoff", self.velocity_cutoff)
        if self.inner_rate < self.command_rate:
            raise ValidationError(
                f"inner_rate ({self.inner_rate} Hz) must be >= "
                f"command_rate ({self.command_rate} Hz)"
            )


@dataclass(frozen=True)
class SensorModel:
    """
    Position encoder model.

    Attributes:
        resolution (Optional[float]): Metres per count; ``None`` disables quantization.
        latency (int): Measurement delay in simulation steps.
        velocity_source (VelocitySource): Where the controller velocity comes from.
    """

    resolution: Optional[float] = ENCODER_RESOLUTION_M
    latency: int = 0
    velocity_source: VelocitySource = VelocitySource.FILTERED_DIFFERENCE

    def __post_init__(self):
        if self.resolution is not None:
            ParameterValidator.validate_positive("resolution", self.resolution)
        if self.latency < 0:
            raise ValidationError(f"latency must be >= 0 steps, got {self.latency}")


@dataclass(frozen=True)
class RegulatorModel:
    """
    Pressure regulator: saturation to [p_min, p_max] and a first-order lag ``tau`` (s).

    ``p_initial`` is the pressure held before ``t = 0``; the regulator starts vented at
    ``p_min`` when it is omitted.
    """

    tau: float = REGULATOR_TAU_S
    p_min: float = REGULATOR_P_MIN_PA
    p_max: float = REGULATOR_P_MAX_PA
    p_initial: Optional[float] = None

    def __post_init__(self):
        ParameterValidator.validate_positive("tau", self.tau, allow_zero=True)
        ParameterValidator.validate_finite("p_min", self.p_min)
        ParameterValidator.validate_finite("p_max", self.p_max)
        if not self.p_min < self.p_max:
            raise ValidationError(f"p_min must be < p_max, got [{self.p_min}, {self.p_max}]")
        if self.p_initial is not None and not self.p_min <= self.p_initial <= self.p_max:
            raise ValidationError(
                f"p_initial must lie in [{self.p_min}, {self.p_max}], got {self.p_initial}"
            )

    @property
    def start_pressure(self) -> float:
        """Pressure the regulator holds at ``t = 0``, Pa."""
        return self.p_min if self.p_initial is None else self.p_initial


@dataclass(frozen=True, eq=False)
class IdentificationProblem:
    """
    Recorded data, known parameters and optimizer settings for identification.

    Attributes:
        recorded (Trajectory): Recording; only ``t``, ``p_cmd`` and ``x`` are used.
        fixed (PlantParams): Supplies the known fields (M, m, A, g_signed, p_max).
        bounds (dict): ``(lo, hi)`` for each free parameter.
        n_starts (int): Number of multistart local searches.
        rng_seed (int): Seed for the start points.
        sim_dt (float): Integration step, must divide the recorded step.
        initial_state (PlantState): Initial condition of every cost simulation.
        max_iterations (int): Iteration cap per local search.
        cost_tolerance (float): Simplex cost-spread termination threshold, m.
        initial_guess (Optional[dict]): Replaces the first random start when given.
        refine_rounds (int): Restarted local searches polishing the best start.
        workers (int): Threads used to run starts concurrently.
    """

    recorded: Trajectory
    fixed: PlantParams
    bounds: dict[str, tuple[float, float]] = field(default_factory=lambda: dict(DEFAULT_BOUNDS))
    n_starts: int = 20
    rng_seed: int = 0
    sim_dt: Optional[float] = None
    initial_state: PlantState = PlantState()
    max_iterations: int = 500
    cost_tolerance: float = 1.0e-7
    initial_guess: Optional[dict[str, float]] = None
    refine_rounds: int = 3
    workers: int = 1

    def __post_init__(self):
        ParameterValidator.validate_bounds(
            self.bounds,
            FREE_PARAMETERS,
            strictly_positive=("alpha", "beta", "K_e"),
            non_negative=("d", "p_dz"),
        )
        if self.bounds["p_dz"][1] >= self.fixed.p_max:
            raise ValidationError("p_dz upper bound must stay below p_max")
        if self.n_starts < 1:
            raise ValidationError(f"n_starts must be >= 1, got {self.n_starts}")
        if self.max_iterations < 1:
            raise ValidationError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.refine_rounds < 0 or self.workers < 1:
            raise ValidationError("refine_rounds must be >= 0 and workers >= 1")
        ParameterValidator.validate_positive("cost_tolerance", self.cost_tolerance)
        if self.initial_guess is not None:
            missing = [name for name in FREE_PARAMETERS if name not in self.initial_guess]
            if missing:
                raise ValidationError(f"initial_guess is missing: {', '.join(missing)}")
        if self.sim_dt is not None:
            ParameterValidator.validate_positive("sim_dt", self.sim_dt)

    @property
    def substeps(self) -> int:
        """Integration sub-steps per recorded sample."""
        if self.sim_dt is None:
            return 1
        ratio = self.recorded.dt / self.sim_dt
        steps = int(round(ratio))
        if steps < 1 or not math.isclose(ratio, steps, rel_tol=1e-9):
            raise ValidationError(
                f"sim_dt = {self.sim_dt} s must divide the recorded step {self.recorded.dt} s"
            )
        return steps


@dataclass(frozen=True)
class StartRecord:
    """Outcome of one multistart local search."""

    start_index: int
    start_point: dict[str, float]
    converged_point: dict[str, float]
    cost: float
    iterations: int


@dataclass(frozen=True)
class IdentificationResult:
    """
    Recovered parameters and the per-start table.

    Attributes:
        params_hat (dict): The six recovered values.
        cost (float): RMS cost at ``params_hat``, m.
        starts (list[StartRecord]): One entry per multistart search.
        best_start_index (int): Start whose converged point seeded ``params_hat``.
        refined (bool): True when the polishing stage lowered the cost further.
    """

    params_hat: dict[str, float]
    cost: float
    starts: list[StartRecord]
    best_start_index: int
    refined: bool = False

    def plant(self, fixed: PlantParams) -> PlantParams:
        """Returns ``fixed`` with the recovered parameters substituted."""
        return fixed.replace(**self.params_hat)


@dataclass(frozen=True)
class CycleMetrics:
    """Tracking metrics restricted to one reference period."""

    index: int
    rms_error: float
    peak_error: float
    overshoot: float


@dataclass(frozen=True)
class MetricsReport:
    """
    Post-transient tracking metrics.

    Attributes:
        rms_error (float): Root-mean-square tracking error, m.
        phase_lag (float): Lag of the response behind the reference, degrees in (-180, 180].
        overshoot (float): Peak excursion above the reference crest, percent of amplitude.
        peak_error (float): Largest absolute tracking error, m.
        cycles (list[CycleMetrics]): Per-period breakdown.
    """

    rms_error: float
    phase_lag: float
    overshoot: float
    peak_error: float
    cycles: list[CycleMetrics] = field(default_factory=list)
