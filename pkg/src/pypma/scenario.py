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
Module parsing and validating declarative experiment scenarios.

A scenario is a YAML document whose keys carry their units, for example::

    name: characterize
    rng_seed: 0
    plant:
      M_kg: 0.045
      K_e_N_per_m: 624.78
      g_signed_m_per_s2: -9.81
      ...

Schema violations and domain invariant failures are collected into a
:class:`~pypma.exceptions.ScenarioError` whose diagnostics read
``line N: block.field: message``.

"""
# pylint: disable=too-few-public-methods,invalid-name
from __future__ import annotations

import dataclasses
import hashlib
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from pypma.elements import (
    ControlMode,
    ControllerConfig,
    PlantParams,
    PlantState,
    PressureSignal,
    ReferenceSignal,
    RegulatorModel,
    SensorModel,
    SignalKind,
    SimClock,
    SweepMode,
    VelocitySource,
)
from pypma.exceptions import ScenarioError, ValidationError, raise_pypma_error
from pypma.maps import (
    COMMAND_RATE_HZ,
    DEFAULT_BOUNDS,
    ENCODER_RESOLUTION_M,
    INNER_RATE_HZ,
    REFERENCE_AMPLITUDE_M,
    REFERENCE_BIAS_M,
    REGULATOR_P_MAX_PA,
    REGULATOR_P_MIN_PA,
    REGULATOR_TAU_S,
    SIM_DT_S,
    VELOCITY_CUTOFF_HZ,
)

logger = logging.getLogger(__name__)

_NAME_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")

# scenario key -> PlantParams field
PLANT_KEYS: dict[str, str] = {
    "M_kg": "M",
    "m_kg": "m",
    "K_e_N_per_m": "K_e",
    "d_N_s_per_m": "d",
    "g_signed_m_per_s2": "g_signed",
    "A_m2": "A",
    "p_dz_Pa": "p_dz",
    "alpha_N_per_m": "alpha",
    "beta_per_m": "beta",
    "gamma_per_m": "gamma",
    "p_max_Pa": "p_max",
}

# scenario key -> free parameter name
FREE_PARAMETER_KEYS: dict[str, str] = {
    "alpha_N_per_m": "alpha",
    "beta_per_m": "beta",
    "gamma_per_m": "gamma",
    "d_N_s_per_m": "d",
    "K_e_N_per_m": "K_e",
    "p_dz_Pa": "p_dz",
}


PositiveFinite = Annotated[FiniteFloat, Field(gt=0)]


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class PlantBlock(_Block):
    """Plant parameters; the gravity sign is always recorded explicitly."""

    M_kg: FiniteFloat = Field(ge=0)
    m_kg: FiniteFloat = Field(gt=0)
    K_e_N_per_m: FiniteFloat = Field(gt=0)
    d_N_s_per_m: FiniteFloat = Field(ge=0)
    g_signed_m_per_s2: FiniteFloat
    A_m2: FiniteFloat = Field(gt=0)
    p_dz_Pa: FiniteFloat = Field(ge=0)
    alpha_N_per_m: FiniteFloat = Field(gt=0)
    beta_per_m: FiniteFloat = Field(gt=0)
    gamma_per_m: FiniteFloat
    p_max_Pa: FiniteFloat = Field(default=REGULATOR_P_MAX_PA, gt=0)


class SignalBlock(_Block):
    """Pressure excitation."""

    kind: Literal["constant", "step", "chirp", "sine"]
    offset_Pa: FiniteFloat = 0.0
    amplitude_Pa: FiniteFloat = 0.0
    f0_Hz: FiniteFloat = Field(default=0.0, ge=0)
    f1_Hz: FiniteFloat = Field(default=0.0, ge=0)
    duration_s: FiniteFloat = Field(default=0.0, ge=0)
    step_time_s: FiniteFloat = Field(default=0.0, ge=0)
    phase_rad: FiniteFloat = 0.0
    sweep: Optional[Literal["linear", "logarithmic"]] = None

    @model_validator(mode="after")
    def _chirp_records_sweep(self) -> SignalBlock:
        if self.kind == "chirp" and self.sweep is None:
            raise ValueError("chirp signals must record sweep: linear or logarithmic")
        return self


class MeasurementBlock(_Block):
    """Repeated noisy recordings emulated from the simulated response."""

    runs: int = Field(ge=1)
    noise_std_m: FiniteFloat = Field(ge=0)


class ReferenceBlock(_Block):
    f_Hz: FiniteFloat = Field(gt=0)
    bias_m: FiniteFloat = REFERENCE_BIAS_M
    amplitude_m: FiniteFloat = REFERENCE_AMPLITUDE_M
    origin_m: FiniteFloat = 0.0


class _ControllerBlock(_Block):
    inner_rate_Hz: FiniteFloat = Field(default=INNER_RATE_HZ, gt=0)
    command_rate_Hz: FiniteFloat = Field(default=COMMAND_RATE_HZ, gt=0)
    integral_limit_m_s: FiniteFloat = Field(default=0.05, gt=0)
    velocity_cutoff_Hz: FiniteFloat = Field(default=VELOCITY_CUTOFF_HZ, gt=0)


class PidBlock(_ControllerBlock):
    mode: Literal["pid"]
    kp_Pa_per_m: FiniteFloat
    ki_Pa_per_m_s: FiniteFloat = 0.0
    kd_Pa_s_per_m: FiniteFloat = 0.0


class ComputedTorqueBlock(_ControllerBlock):
    mode: Literal["computed_torque"]
    kp_per_s2: FiniteFloat
    ki_per_s3: FiniteFloat = 0.0
    kd_per_s: FiniteFloat = 0.0


ControllerBlock = Annotated[Union[PidBlock, ComputedTorqueBlock], Field(discriminator="mode")]


class SensorBlock(_Block):
    resolution_m: Optional[PositiveFinite] = ENCODER_RESOLUTION_M
    latency_steps: int = Field(default=0, ge=0)
    velocity_source: Literal["filtered_difference", "plant"] = "filtered_difference"


class RegulatorBlock(_Block):
    tau_s: FiniteFloat = Field(default=REGULATOR_TAU_S, ge=0)
    p_min_Pa: FiniteFloat = REGULATOR_P_MIN_PA
    p_max_Pa: FiniteFloat = REGULATOR_P_MAX_PA
    p_initial_Pa: Optional[FiniteFloat] = None


class ClockBlock(_Block):
    dt_s: FiniteFloat = Field(default=SIM_DT_S, gt=0)
    t_end_s: FiniteFloat = Field(gt=0)


class InitialStateBlock(_Block):
    x_m: FiniteFloat = 0.0
    v_m_per_s: FiniteFloat = 0.0
    z_N: FiniteFloat = 0.0


Interval = tuple[FiniteFloat, FiniteFloat]


class BoundsBlock(_Block):
    """Search box of the free parameters."""

    alpha_N_per_m: Interval = DEFAULT_BOUNDS["alpha"]
    beta_per_m: Interval = DEFAULT_BOUNDS["beta"]
    gamma_per_m: Interval = DEFAULT_BOUNDS["gamma"]
    d_N_s_per_m: Interval = DEFAULT_BOUNDS["d"]
    K_e_N_per_m: Interval = DEFAULT_BOUNDS["K_e"]
    p_dz_Pa: Interval = DEFAULT_BOUNDS["p_dz"]


class GuessBlock(_Block):
    alpha_N_per_m: FiniteFloat
    beta_per_m: FiniteFloat
    gamma_per_m: FiniteFloat
    d_N_s_per_m: FiniteFloat
    K_e_N_per_m: FiniteFloat
    p_dz_Pa: FiniteFloat


class IdentificationBlock(_Block):
    """Optimizer settings; ``recorded`` lists trajectory CSVs relative to the scenario file."""

    recorded: list[str] = Field(default_factory=list)
    n_starts: int = Field(default=20, ge=1)
    sim_dt_s: Optional[PositiveFinite] = None
    max_iterations: int = Field(default=500, ge=1)
    cost_tolerance_m: FiniteFloat = Field(default=1.0e-7, gt=0)
    refine_rounds: int = Field(default=3, ge=0)
    workers: int = Field(default=1, ge=1)
    bounds: BoundsBlock = Field(default_factory=BoundsBlock)
    initial_guess: Optional[GuessBlock] = None


class ScenarioDocument(_Block):
    """Top-level scenario schema."""

    name: str
    rng_seed: int = Field(default=0, ge=0)
    output_dir: Optional[str] = None
    trajectory: Optional[str] = None
    plant: PlantBlock
    model: Optional[PlantBlock] = None
    signal: Optional[SignalBlock] = None
    measurement: Optional[MeasurementBlock] = None
    reference: Optional[ReferenceBlock] = None
    controller: Optional[ControllerBlock] = None
    sensor: SensorBlock = Field(default_factory=SensorBlock)
    regulator: RegulatorBlock = Field(default_factory=RegulatorBlock)
    clock: Optional[ClockBlock] = None
    initial_state: InitialStateBlock = Field(default_factory=InitialStateBlock)
    identification: Optional[IdentificationBlock] = None

    @field_validator("name")
    @classmethod
    def _name_is_stem(cls, value: str) -> str:
        if not _NAME_PATTERN.match(value):
            raise ValueError(f"'{value}' is not a valid filename stem")
        return value


@dataclass(frozen=True)
class MeasurementSettings:
    """Number of emulated recordings and their position noise (m)."""

    runs: int
    noise_std: float


@dataclass(frozen=True)
class IdentificationSettings:
    """Identification options resolved from a scenario."""

    recorded: tuple[Path, ...]
    bounds: dict[str, tuple[float, float]]
    n_starts: int = 20
    sim_dt: Optional[float] = None
    max_iterations: int = 500
    cost_tolerance: float = 1.0e-7
    refine_rounds: int = 3
    workers: int = 1
    initial_guess: Optional[dict[str, float]] = None


@dataclass(frozen=True, eq=False)
class Scenario:  # pylint: disable=too-many-instance-attributes
    """
    A validated scenario with its blocks converted to domain types.

    Attributes:
        name (str): Filename stem of every artifact.
        rng_seed (int): Seed of every random draw in the run.
        plant (PlantParams): Simulated (true) plant.
        document (ScenarioDocument): The resolved schema object, defaults included.
        source (str): Scenario text as read.
        path (Optional[Path]): Scenario file, used to resolve relative paths.
    """

    name: str
    rng_seed: int
    plant: PlantParams
    document: ScenarioDocument
    source: str
    path: Optional[Path] = None
    output_dir: Optional[str] = None
    trajectory: Optional[str] = None
    model: Optional[PlantParams] = None
    signal: Optional[PressureSignal] = None
    measurement: Optional[MeasurementSettings] = None
    reference: Optional[ReferenceSignal] = None
    controller: Optional[ControllerConfig] = None
    sensor: SensorModel = field(default_factory=SensorModel)
    regulator: RegulatorModel = field(default_factory=RegulatorModel)
    clock: Optional[SimClock] = None
    initial_state: PlantState = PlantState()
    identification: Optional[IdentificationSettings] = None

    @property
    def model_hat(self) -> PlantParams:
        """Model given to the controller; the true plant unless a model block is set."""
        return self.model if self.model is not None else self.plant

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.source.encode("utf-8")).hexdigest()

    def resolved(self) -> dict[str, Any]:
        """Returns the scenario document with every default filled in."""
        return self.document.model_dump(mode="json")

    def with_seed(self, seed: Optional[int]) -> Scenario:
        """Returns a copy whose seed is overridden, or ``self`` when ``seed`` is None."""
        if seed is None:
            return self
        if seed < 0:
            raise ValidationError(f"seed must be >= 0, got {seed}")
        document = self.document.model_copy(update={"rng_seed": seed})
        return dataclasses.replace(self, rng_seed=seed, document=document)

    def require(self, *blocks: str) -> None:
        """Checks that the workflow blocks are present.

        Raises:
            ScenarioError: Naming every missing block.
        """
        missing = [block for block in blocks if getattr(self, block) is None]
        if missing:
            raise ScenarioError(
                f"scenario '{self.name}' is missing required blocks",
                [f"{block}: block is required for this workflow" for block in missing],
            )

    def resolve_path(self, relative: str) -> Path:
        """Resolves a path written in the scenario against the scenario's directory."""
        candidate = Path(relative)
        if candidate.is_absolute() or self.path is None:
            return candidate
        return self.path.parent / candidate

    def mismatched_blocks(self, other: Scenario) -> list[str]:
        """Names the blocks a controller comparison requires to be identical."""
        shared = ("plant", "reference", "sensor", "regulator", "clock", "initial_state")
        return [block for block in shared if getattr(self, block) != getattr(other, block)]


def _line_map(text: str) -> dict[tuple[Union[str, int], ...], int]:
    """Maps key paths of a YAML document to 1-based line numbers."""
    lines: dict[tuple[Union[str, int], ...], int] = {}
    root = yaml.compose(text, Loader=yaml.SafeLoader)

    def walk(node: yaml.Node, path: tuple[Union[str, int], ...]) -> None:
        lines[path] = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                key_path = path + (key_node.value,)
                walk(value_node, key_path)
                lines[key_path] = key_node.start_mark.line + 1
        elif isinstance(node, yaml.SequenceNode):
            for index, item in enumerate(node.value):
                walk(item, path + (index,))

    if root is not None:
        walk(root, ())
    return lines


def _locate(loc: tuple[Union[str, int], ...], lines: dict) -> tuple[int, str]:
    """Finds the line and dotted label of a pydantic error location."""
    found: tuple[Union[str, int], ...] = ()
    for index, item in enumerate(loc):
        candidate = found + (item,)
        if candidate in lines or index == len(loc) - 1:
            found = candidate
    line = lines.get(found) or lines.get(found[:-1]) or lines.get((), 1)
    return line, ".".join(str(item) for item in found) or "<root>"


def _block_line(lines: dict, *path: str) -> int:
    return lines.get(tuple(path)) or lines.get((), 1)


def _plant(block: PlantBlock) -> PlantParams:
    return PlantParams(**{PLANT_KEYS[key]: value for key, value in block.model_dump().items()})


def _signal(block: SignalBlock) -> PressureSignal:
    return PressureSignal(
        kind=SignalKind(block.kind),
        offset=block.offset_Pa,
        amplitude=block.amplitude_Pa,
        f0=block.f0_Hz,
        f1=block.f1_Hz,
        duration=block.duration_s,
        step_time=block.step_time_s,
        phase=block.phase_rad,
        sweep=SweepMode(block.sweep or SweepMode.LINEAR.value),
    )


def _controller(block: Union[PidBlock, ComputedTorqueBlock]) -> ControllerConfig:
    if isinstance(block, PidBlock):
        gains = (block.kp_Pa_per_m, block.ki_Pa_per_m_s, block.kd_Pa_s_per_m)
    else:
        gains = (block.kp_per_s2, block.ki_per_s3, block.kd_per_s)
    return ControllerConfig(
        mode=ControlMode(block.mode),
        kp=gains[0],
        ki=gains[1],
        kd=gains[2],
        inner_rate=block.inner_rate_Hz,
        command_rate=block.command_rate_Hz,
        integral_limit=block.integral_limit_m_s,
        velocity_cutoff=block.velocity_cutoff_Hz,
    )


def _free_values(block: BaseModel) -> dict[str, Any]:
    return {FREE_PARAMETER_KEYS[key]: value for key, value in block.model_dump().items()}


def _identification(block: IdentificationBlock, path: Optional[Path]) -> IdentificationSettings:
    base = path.parent if path is not None else Path(".")
    recorded = tuple(
        Path(item) if Path(item).is_absolute() else base / item for item in block.recorded
    )
    return IdentificationSettings(
        recorded=recorded,
        bounds={
            name: (float(lo), float(hi)) for name, (lo, hi) in _free_values(block.bounds).items()
        },
        n_starts=block.n_starts,
        sim_dt=block.sim_dt_s,
        max_iterations=block.max_iterations,
        cost_tolerance=block.cost_tolerance_m,
        refine_rounds=block.refine_rounds,
        workers=block.workers,
        initial_guess=(
            _free_values(block.initial_guess) if block.initial_guess is not None else None
        ),
    )


def _convert(
    document: ScenarioDocument, lines: dict, source: str, path: Optional[Path]
) -> Scenario:
    """Builds the domain objects, collecting invariant failures per block."""
    diagnostics: list[str] = []
    values: dict[str, Any] = {}

    def build(block: str, factory, *args) -> None:
        try:
            values[block] = factory(*args)
        except ValidationError as err:
            diagnostics.append(f"line {_block_line(lines, block)}: {block}: {err}")

    build("plant", _plant, document.plant)
    if document.model is not None:
        build("model", _plant, document.model)
    if document.signal is not None:
        build("signal", _signal, document.signal)
    if document.measurement is not None:
        values["measurement"] = MeasurementSettings(
            document.measurement.runs, document.measurement.noise_std_m
        )
    if document.reference is not None:
        ref = document.reference
        build(
            "reference", ReferenceSignal, ref.f_Hz, ref.bias_m, ref.amplitude_m, ref.origin_m
        )
    if document.controller is not None:
        build("controller", _controller, document.controller)
    sensor = document.sensor
    build(
        "sensor",
        SensorModel,
        sensor.resolution_m,
        sensor.latency_steps,
        VelocitySource(sensor.velocity_source),
    )
    reg = document.regulator
    build(
        "regulator", RegulatorModel, reg.tau_s, reg.p_min_Pa, reg.p_max_Pa, reg.p_initial_Pa
    )
    if document.clock is not None:
        build("clock", SimClock, document.clock.t_end_s, document.clock.dt_s)
    state = document.initial_state
    values["initial_state"] = PlantState(state.x_m, state.v_m_per_s, state.z_N)
    if document.identification is not None:
        build("identification", _identification, document.identification, path)

    signal = document.signal
    if signal is not None and signal.kind == "chirp" and document.clock is not None:
        if document.clock.t_end_s > signal.duration_s + 1e-9:
            diagnostics.append(
                f"line {_block_line(lines, 'clock', 't_end_s')}: clock.t_end_s: "
                f"exceeds the chirp duration of {signal.duration_s} s"
            )

    if diagnostics:
        raise ScenarioError(f"scenario '{document.name}' failed validation", diagnostics)

    return Scenario(
        name=document.name,
        rng_seed=document.rng_seed,
        document=document,
        source=source,
        path=path,
        output_dir=document.output_dir,
        trajectory=document.trajectory,
        **values,
    )


def loads_scenario(text: str, path: Optional[Path] = None) -> Scenario:
    """Parses and validates a scenario document.

    Args:
        text: YAML scenario text.
        path: File the text came from, used to resolve relative paths.

    Raises:
        ScenarioError: With ``line N: block.field: message`` diagnostics.

    Returns:
        Scenario: The validated scenario.
    """
    try:
        raw = yaml.safe_load(text)
        lines = _line_map(text)
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        problem = getattr(err, "problem", None) or str(err)
        raise_pypma_error(
            message=f"line {line}: malformed scenario: {problem}",
            err_type=ScenarioError,
            line=line,
            raised_from=err,
        )
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a mapping", ["line 1: <root>: expected a mapping"])

    try:
        document = ScenarioDocument.model_validate(raw)
    except PydanticValidationError as err:
        diagnostics = []
        for error in err.errors():
            line, label = _locate(tuple(error["loc"]), lines)
            diagnostics.append(f"line {line}: {label}: {error['msg']}")
        logger.debug("Scenario failed schema validation with %s errors", len(diagnostics))
        raise ScenarioError("scenario failed validation", diagnostics) from err

    scenario = _convert(document, lines, text, path)
    logger.debug("Loaded scenario '%s' (seed %s)", scenario.name, scenario.rng_seed)
    return scenario


def load_scenario(filename: Union[str, Path]) -> Scenario:
    """Reads and validates a scenario file; see :func:`loads_scenario`."""
    path = Path(filename)
    if not path.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    return loads_scenario(path.read_text(encoding="utf-8"), path)
