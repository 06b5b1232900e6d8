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
Module defining base PyPMA exceptions.

"""

import logging
from typing import NoReturn, Optional, Sequence, Type


class PyPmaError(Exception):
    """Base exception for all PyPMA exceptions."""


class ValidationError(PyPmaError):
    """Exception raised when a parameter set, signal or configuration violates its invariants."""


class ScenarioError(ValidationError):
    """Exception raised when a scenario file cannot be parsed or fails schema validation.

    Args:
        message: Summary of the failure.
        diagnostics: One ``line N: field: message`` entry per problem found.
    """

    def __init__(self, message: str, diagnostics: Optional[Sequence[str]] = None):
        self.diagnostics: list[str] = list(diagnostics or [])
        details = "\n".join(self.diagnostics)
        super().__init__(f"{message}\n{details}" if details else message)


class IntegrationDivergedError(PyPmaError):
    """Exception raised when the plant integration produces a non-finite state.

    Args:
        t: Simulation time (s) of the first non-finite sample.
    """

    def __init__(self, t: float, message: Optional[str] = None):
        self.t = t
        super().__init__(message or f"integration diverged at t = {t:.6f} s")


class IdentificationError(PyPmaError):
    """Exception raised when parameter identification cannot produce a usable result."""


class CalibrationError(PyPmaError):
    """Exception raised when calibration inputs are physically inconsistent."""


def raise_pypma_error(
    message: Optional[str] = None,
    err_type: Type[Exception] = ValidationError,
    line: Optional[int] = None,
    raised_from: Optional[Exception] = None,
) -> NoReturn:
    """Raises a PyPMA error with optional chaining from another exception.

    Args:
        message: The error message. If not provided, a default message will be used.
        err_type: The type of error to raise.
        line: The line in the scenario file where the error occurred.
        raised_from: Optional exception from which this error was raised (chaining).

    Raises:
        err_type: The error type initialized with the specified message and chained exception.
    """
    if line:
        logging.error("Error at line %s in scenario file", line)

    message = message or "invalid scenario"
    if raised_from:
        raise err_type(message) from raised_from
    raise err_type(message)
