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
Definition of the base position controller
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

from pypma.elements import ControllerConfig, RegulatorModel


@dataclass(frozen=True)
class ControlSample:
    """
    Everything a controller sees at one inner-loop tick.

    Attributes:
        t (float): Tick time, s.
        x_m (float): Quantized, possibly delayed, measured extension, m.
        v_hat (float): Velocity estimate, m/s.
        z_hat (float): Hysteresis force estimate, N.
        x_d (float): Reference position, m.
        v_d (float): Reference velocity, m/s.
        a_d (float): Reference acceleration, m/s^2.
        ahead (Optional[tuple]): ``(x_d, v_d, a_d)`` one controller preview later.
    """

    t: float
    x_m: float
    v_hat: float
    z_hat: float
    x_d: float
    v_d: float
    a_d: float
    ahead: Optional[tuple[float, float, float]] = None

    @property
    def error(self) -> float:
        """Position error ``x_d - x_m``, m."""
        return self.x_d - self.x_m

    @property
    def error_rate(self) -> float:
        """Velocity error ``v_d - v_hat``, m/s."""
        return self.v_d - self.v_hat


class Controller(ABC):
    """Abstract class for a pressure-commanding position controller

    Args:
        config (ControllerConfig): Gains and loop timing.
        regulator (RegulatorModel): Supplies the admissible command range.
    """

    def __init__(self, config: ControllerConfig, regulator: RegulatorModel):
        self._config = config
        self._regulator = regulator
        self._last_output = 0.0

    @property
    def config(self) -> ControllerConfig:
        """Returns the controller configuration."""
        return self._config

    @property
    def regulator(self) -> RegulatorModel:
        return self._regulator

    @property
    def last_output(self) -> float:
        """Returns the most recent pressure command, Pa."""
        return self._last_output

    @property
    def preview(self) -> float:
        """How far ahead the loop must sample the reference for this controller, s."""
        return 0.0

    def prime(self, p_hold: float) -> None:
        """Aligns the internal state with a regulator already holding ``p_hold``."""
        self._last_output = self.clamp(p_hold)

    def clamp(self, p_cmd: float) -> float:
        """Saturates a command to the regulator range."""
        return min(max(p_cmd, self._regulator.p_min), self._regulator.p_max)

    def update(self, sample: ControlSample, dt: float) -> float:
        """Computes the pressure command for one inner-loop tick.

        Args:
            sample (ControlSample): Measurement, estimates and reference at the tick.
            dt (float): Inner-loop period, s.

        Returns:
            float: Command within ``[p_min, p_max]``, Pa.
        """
        self._last_output = self._compute(sample, dt)
        return self._last_output

    @abstractmethod
    def _compute(self, sample: ControlSample, dt: float) -> float:
        """Controller law; must return a saturated command."""

    @abstractmethod
    def reset(self) -> None:
        """Clears the internal state."""
