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
Module containing utility functions for unit tests.

"""
import os

import numpy as np

from pypma.elements import (
    ClosedLoopTrajectory,
    PlantParams,
    PlantState,
    PressureSignal,
    ReferenceSignal,
    RegulatorModel,
    SignalKind,
    SweepMode,
)
from pypma.maps import (
    CARRIAGE_MASS_KG,
    CHIRP_AMPLITUDE_PA,
    CHIRP_DURATION_S,
    CHIRP_F0_HZ,
    CHIRP_F1_HZ,
    CHIRP_OFFSET_PA,
    REFERENCE_AMPLITUDE_M,
    REFERENCE_BIAS_M,
    TRACKING_LOAD_KG,
    TRACKING_ORIGIN_M,
)
from pypma.model import holding_pressure

TESTS_DIR = os.path.dirname(os.path.abspath(__file__))
SCENARIO_DIR = os.path.join(os.path.dirname(TESTS_DIR), "scenarios")

BIAS = REFERENCE_BIAS_M
AMPLITUDE = REFERENCE_AMPLITUDE_M


def shipped_scenario(name: str) -> str:
    """Path of a scenario file shipped in the repository."""
    return os.path.join(SCENARIO_DIR, f"{name}.scenario")


def carriage_plant(**overrides) -> PlantParams:
    """Identified actuator carrying the bare carriage, gravity aiding extension."""
    return PlantParams.identified(**overrides)


def loaded_plant(**overrides) -> PlantParams:
    """Identified actuator with the 0.5 kg tracking load attached."""
    return PlantParams.identified(M=CARRIAGE_MASS_KG + TRACKING_LOAD_KG, **overrides)


def rig_reference(f: float) -> ReferenceSignal:
    """Tracking reference measured from the rig's tracking origin."""
    return ReferenceSignal(f=f, origin=TRACKING_ORIGIN_M)


def held_start(
    plant: PlantParams, ref: ReferenceSignal, tau: float = 0.05
) -> tuple[PlantState, RegulatorModel]:
    """Rest state on ``x_d(0)`` and a regulator already holding it there."""
    start = PlantState(ref.center, 0.0, 0.0)
    return start, RegulatorModel(tau=tau, p_initial=holding_pressure(start.x, start.z, plant))


def characterization_chirp(duration: float = CHIRP_DURATION_S) -> PressureSignal:
    """0.1 -> 3 Hz linear chirp sweeping 0 -> 0.5 MPa."""
    return PressureSignal(
        kind=SignalKind.CHIRP,
        offset=CHIRP_OFFSET_PA,
        amplitude=CHIRP_AMPLITUDE_PA,
        f0=CHIRP_F0_HZ,
        f1=CHIRP_F1_HZ,
        duration=duration,
        sweep=SweepMode.LINEAR,
    )


def closed_loop_from(t, x, x_d) -> ClosedLoopTrajectory:
    """Builds a closed-loop trajectory from position columns only."""
    t = np.asarray(t, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    x_d = np.asarray(x_d, dtype=np.float64)
    zeros = np.zeros_like(t)
    return ClosedLoopTrajectory(
        t=t, p_cmd=zeros, p_eff=zeros, x=x, v=zeros, z=zeros, x_d=x_d, v_d=zeros, e=x_d - x
    )


def sinusoid(t, f, bias=BIAS, amplitude=AMPLITUDE, phase=0.0):
    """``bias + amplitude * sin(2 pi f t - phase)``."""
    return bias + amplitude * np.sin(2.0 * np.pi * f * np.asarray(t) - phase)
