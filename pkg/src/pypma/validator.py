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
Module with validation functions for plant, signal and controller parameters

"""
import math
from typing import Mapping, Optional

import numpy as np

from pypma.exceptions import ValidationError


class ParameterValidator:
    """Class with validation functions shared by the domain types"""

    @staticmethod
    def validate_finite(name: str, value: float) -> None:
        """Validate that a scalar is finite.

        Args:
            name (str): Field name used in the error message.
            value (float): The value to check.

        Raises:
            ValidationError: If the value is NaN or infinite.
        """
        if not math.isfinite(value):
            raise ValidationError(f"{name} must be finite, got {value}")

    @staticmethod
    def validate_positive(name: str, value: float, allow_zero: bool = False) -> None:
        """Validate that a scalar is finite and positive (or non-negative).

        Args:
            name (str): Field name used in the error message.
            value (float): The value to check.
            allow_zero (bool): Accept zero when True.

        Raises:
            ValidationError: If the value is not finite or violates the sign constraint.
        """
        ParameterValidator.validate_finite(name, value)
        if value < 0 or (value == 0 and not allow_zero):
            relation = ">= 0" if allow_zero else "> 0"
            raise ValidationError(f"{name} must be {relation}, got {value}")

    @staticmethod
    def validate_interval(name: str, lo: float, hi: float) -> None:
        """Validate a bound pair ``lo < hi`` with finite ends."""
        ParameterValidator.validate_finite(f"{name} lower bound", lo)
        ParameterValidator.validate_finite(f"{name} upper bound", hi)
        if not lo < hi:
            raise ValidationError(f"{name} bounds must satisfy lo < hi, got [{lo}, {hi}]")

    @staticmethod
    def validate_bounds(
        bounds: Mapping[str, tuple[float, float]],
        names: tuple[str, ...],
        strictly_positive: tuple[str, ...] = (),
        non_negative: tuple[str, ...] = (),
    ) -> None:
        """Validate a per-parameter bound box.

        Args:
            bounds: Mapping of parameter name to ``(lo, hi)``.
            names: Parameter names that must all be present.
            strictly_positive: Names whose lower bound must be > 0.
            non_negative: Names whose lower bound must be >= 0.

        Raises:
            ValidationError: If a bound is missing, unordered or violates a sign constraint.
        """
        missing = [name for name in names if name not in bounds]
        if missing:
            raise ValidationError(f"Missing bounds for parameters: {', '.join(missing)}")
        unknown = [name for name in bounds if name not in names]
        if unknown:
            raise ValidationError(f"Unknown bounded parameters: {', '.join(unknown)}")

        for name in names:
            lo, hi = bounds[name]
            ParameterValidator.validate_interval(name, lo, hi)
            if name in strictly_positive and lo <= 0:
                raise ValidationError(f"{name} lower bound must be > 0, got {lo}")
            if name in non_negative and lo < 0:
                raise ValidationError(f"{name} lower bound must be >= 0, got {lo}")

    @staticmethod
    def validate_divisible_rate(name: str, rate: float, sim_rate: float) -> int:
        """Validate that ``rate`` divides the simulation rate evenly.

        Returns:
            int: Number of simulation steps per tick of ``rate``.

        Raises:
            ValidationError: If the ratio is not a positive integer.
        """
        ParameterValidator.validate_positive(name, rate)
        ratio = sim_rate / rate
        steps = int(round(ratio))
        if steps < 1 or not math.isclose(ratio, steps, rel_tol=1e-9, abs_tol=1e-9):
            raise ValidationError(
                f"{name} = {rate} Hz does not divide the simulation rate {sim_rate} Hz evenly"
            )
        return steps

    @staticmethod
    def validate_uniform_grid(t: np.ndarray, dt: Optional[float] = None) -> float:
        """Validate a uniform, strictly increasing time grid.

        Returns:
            float: The grid step.

        Raises:
            ValidationError: If the grid has fewer than two samples or is not uniform.
        """
        if t.ndim != 1 or t.size < 2:
            raise ValidationError("time grid must be one-dimensional with at least two samples")
        steps = np.diff(t)
        step = float(dt) if dt is not None else float(steps[0])
        if step <= 0 or not np.allclose(steps, step, rtol=1e-6, atol=1e-12):
            raise ValidationError("time grid must be uniform and strictly increasing")
        return step
