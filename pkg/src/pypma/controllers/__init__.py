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
Sub modules implementing the position controllers.

.. currentmodule:: pypma.controllers

Classes
---------

.. autosummary::
   :toctree: ../stubs/

   Controller
   ControlSample
   PidController
   PidState
   ComputedTorqueController

Functions
---------

.. autosummary::
   :toctree: ../stubs/

   pid_step
   computed_torque_step

"""

from .base import Controller, ControlSample
from .computed_torque import ComputedTorqueController, computed_torque_step
from .pid import PidController, PidState, pid_step

__all__ = [
    "Controller",
    "ControlSample",
    "PidController",
    "PidState",
    "ComputedTorqueController",
    "pid_step",
    "computed_torque_step",
]
