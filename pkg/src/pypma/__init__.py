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
Top level module containing the main PyPMA functionality.

.. currentmodule:: pypma

Functions
----------

.. autosummary::
   :toctree: ../stubs/

   load
   loads
   dump
   dumps
   load_scenario
   loads_scenario
   simulate
   integrate
   identify
   calibrate_area
   run_closed_loop
   compute_metrics

Classes
---------

.. autosummary::
   :toctree: ../stubs/

   PlantParams
   PlantState
   SimClock
   PressureSignal
   ReferenceSignal
   Trajectory
   ClosedLoopTrajectory
   ControllerConfig
   SensorModel
   RegulatorModel
   IdentificationProblem
   IdentificationResult
   MetricsReport
   Scenario

Exceptions
-----------

.. autosummary::
   :toctree: ../stubs/

   PyPmaError
   ValidationError
   ScenarioError
   IntegrationDivergedError
   IdentificationError
   CalibrationError

"""
import warnings

try:
    # Injected in _version.py during the build process.
    from ._version import __version__  # type: ignore
except ImportError:  # pragma: no cover
    warnings.warn("Importing 'pypma' outside a proper installation.")
    __version__ = "dev"

from .elements import (
    ClosedLoopTrajectory,
    ControllerConfig,
    IdentificationProblem,
    IdentificationResult,
    MetricsReport,
    PlantParams,
    PlantState,
    PressureSignal,
    ReferenceSignal,
    RegulatorModel,
    SensorModel,
    SimClock,
    Trajectory,
)
from .entrypoint import dump, dumps, load, loads
from .exceptions import (
    CalibrationError,
    IdentificationError,
    IntegrationDivergedError,
    PyPmaError,
    ScenarioError,
    ValidationError,
)
from .identification import calibrate_area, identify
from .integrator import integrate, simulate
from .loop import run_closed_loop
from .metrics import compute_metrics
from .scenario import Scenario, load_scenario, loads_scenario

__all__ = [
    "PyPmaError",
    "ValidationError",
    "ScenarioError",
    "IntegrationDivergedError",
    "IdentificationError",
    "CalibrationError",
    "load",
    "loads",
    "dump",
    "dumps",
    "load_scenario",
    "loads_scenario",
    "simulate",
    "integrate",
    "identify",
    "calibrate_area",
    "run_closed_loop",
    "compute_metrics",
    "PlantParams",
    "PlantState",
    "SimClock",
    "PressureSignal",
    "ReferenceSignal",
    "Trajectory",
    "ClosedLoopTrajectory",
    "ControllerConfig",
    "SensorModel",
    "RegulatorModel",
    "IdentificationProblem",
    "IdentificationResult",
    "MetricsReport",
    "Scenario",
    "__version__",
]
