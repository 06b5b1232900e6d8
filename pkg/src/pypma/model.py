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
Module containing the actuator equation of motion with Bouc-Wen hysteresis.

The plant is

    (M + m) x'' + (M + m) g_signed + K_e x + d x' + z = A p_eff
    z' = x' [alpha - (beta sgn(x' z) + gamma) |z|]

where ``p_eff`` is the commanded pressure after regulator saturation and dead zone.

"""
from __future__ import annotations

import math
from typing import TYPE_CHECKING, Union, overload

import numpy as np
from scipy.optimize import brentq

from pypma.exceptions import IntegrationDivergedError, ValidationError
from pypma.maps import UNACTUATED_LENGTH_M

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from pypma.elements import PlantParams, PlantState


def sgn(value: float) -> float:
    """Sign function with ``sgn(0) = 0``."""
    if value > 0.0:
        return 1.0
    if value < 0.0:
        return -1.0
    return 0.0


@overload
def effective_pressure(p_cmd: float, params: PlantParams) -> float: ...


@overload
def effective_pressure(p_cmd: NDArray[np.float64], params: PlantParams) -> NDArray[np.float64]: ...


def effective_pressure(
    p_cmd: Union[float, ArrayLike], params: PlantParams
) -> Union[float, NDArray[np.float64]]:
    """Maps a commanded pressure to the pressure that produces force.

    The command is clamped to ``[0, p_max]``, the dead zone is subtracted and the
    result floored at zero.

    Args:
        p_cmd: Commanded pressure(s), Pa.
        params: Plant parameters supplying ``p_max`` and ``p_dz``.

    Returns:
        Effective pressure(s), Pa; a float for scalar input.
    """
    if np.ndim(p_cmd) == 0:
        clamped = min(max(float(p_cmd), 0.0), params.p_max)  # type: ignore[arg-type]
        return max(clamped - params.p_dz, 0.0)
    clamped_arr = np.clip(np.asarray(p_cmd, dtype=np.float64), 0.0, params.p_max)
    return np.maximum(clamped_arr - params.p_dz, 0.0)


def bouc_wen_rate(v: float, z: float, params: PlantParams) -> float:
    """Rate of change of the hysteresis force, N/s.

    Args:
        v: Velocity, m/s.
        z: Hysteresis force, N.
        params: Plant parameters supplying alpha, beta and gamma.

    Returns:
        float: ``v * (alpha - (beta * sgn(v * z) + gamma) * |z|)``.
    """
    return v * (params.alpha - (params.beta * sgn(v * z) + params.gamma) * abs(z))


def dynamics_rhs(
    state: PlantState, p_eff: float, params: PlantParams
) -> tuple[float, float, float]:
    """Right-hand side of the plant ODE.

    Args:
        state: Current state.
        p_eff: Effective pressure, Pa (>= 0).
        params: Plant parameters.

    Raises:
        IntegrationDivergedError: If the state is not finite.

    Returns:
        tuple[float, float, float]: ``(dx, dv, dz)`` in m/s, m/s^2 and N/s.
    """
    x, v, z = state.x, state.v, state.z
    if not (math.isfinite(x) and math.isfinite(v) and math.isfinite(z)):
        raise IntegrationDivergedError(math.nan, f"non-finite plant state {state}")
    total_mass = params.total_mass
    dv = (
        params.A * p_eff - total_mass * params.g_signed - params.K_e * x - params.d * v - z
    ) / total_mass
    return v, dv, bouc_wen_rate(v, z, params)


def _path_rate(z: float, params: PlantParams) -> float:
    return bouc_wen_rate(1.0, z, params)


def hysteresis_along_path(
    x_path: ArrayLike, params: PlantParams, z0: float = 0.0, substeps: int = 4
) -> NDArray[np.float64]:
    """Integrates ``dz/dx`` along a strictly increasing extension path.

    Along a monotone loading path the Bouc-Wen equation does not depend on speed, so
    ``z`` is a function of ``x`` alone. Each path interval is split into ``substeps``
    classical Runge-Kutta steps.

    Raises:
        ValidationError: If the path is not one-dimensional and strictly increasing.

    Returns:
        np.ndarray: ``z`` at every path sample, N.
    """
    path = np.asarray(x_path, dtype=np.float64)
    if path.ndim != 1 or path.size == 0:
        raise ValidationError("x_path must be a non-empty one-dimensional array")
    if not np.all(np.isfinite(path)):
        raise ValidationError("x_path must be finite")
    if path.size > 1 and not np.all(np.diff(path) > 0):
        raise ValidationError("x_path must be strictly monotone increasing")
    if substeps < 1:
        raise ValidationError(f"substeps must be >= 1, got {substeps}")

    z_values = np.empty_like(path)
    z = float(z0)
    z_values[0] = z
    for i in range(1, path.size):
        h = (path[i] - path[i - 1]) / substeps
        for _ in range(substeps):
            k1 = _path_rate(z, params)
            k2 = _path_rate(z + 0.5 * h * k1, params)
            k3 = _path_rate(z + 0.5 * h * k2, params)
            k4 = _path_rate(z + h * k3, params)
            z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        z_values[i] = z
    return z_values


def quasi_static_z(x_path: ArrayLike, params: PlantParams, substeps: int = 4) -> float:
    """Hysteresis force at the end of a loading path starting from ``x = 0``, ``z = 0``.

    Args:
        x_path: Strictly increasing extensions starting at 0, m.
        params: Plant parameters.
        substeps: Runge-Kutta steps per path interval.

    Raises:
        ValidationError: If the path does not start at 0 or is not strictly increasing.

    Returns:
        float: ``z`` at the last path sample, N.
    """
    path = np.asarray(x_path, dtype=np.float64)
    if path.ndim != 1 or path.size == 0 or path[0] != 0.0:
        raise ValidationError("x_path must start at 0")
    return float(hysteresis_along_path(path, params, 0.0, substeps)[-1])


def steady_state_residual(x: float, p_cmd: float, params: PlantParams, samples: int = 2001):
    """Force balance ``(M+m) g_signed + K_e x + z_qs(x) - A p_eff`` at extension ``x``, N."""
    z_qs = quasi_static_z(np.linspace(0.0, x, samples), params) if x > 0 else 0.0
    return (
        params.total_mass * params.g_signed
        + params.K_e * x
        + z_qs
        - params.A * effective_pressure(p_cmd, params)
    )


def steady_state_extension(p_cmd: float, params: PlantParams, samples: int = 2001) -> float:
    """Solves the static balance for the extension reached by loading from rest.

    Raises:
        ValidationError: If the balance has no root on ``[0, l0]``.

    Returns:
        float: Settled extension, m.
    """
    lower = steady_state_residual(0.0, p_cmd, params, samples)
    if lower > 0:
        raise ValidationError("the applied pressure cannot extend the actuator from rest")
    if lower == 0:
        return 0.0
    upper = steady_state_residual(UNACTUATED_LENGTH_M, p_cmd, params, samples)
    if upper < 0:
        raise ValidationError("the static balance has no root within the unactuated length")
    return float(
        brentq(
            steady_state_residual,
            0.0,
            UNACTUATED_LENGTH_M,
            args=(p_cmd, params, samples),
            xtol=1e-12,
        )
    )


def holding_pressure(x: float, z: float, params: PlantParams) -> float:
    """Command that keeps the actuator at rest at extension ``x`` with hysteresis force ``z``.

    Raises:
        ValidationError: If the rest point needs a negative effective pressure or a command
            above ``p_max``.

    Returns:
        float: Pressure command, Pa.
    """
    force = params.total_mass * params.g_signed + params.K_e * x + z
    if force < 0:
        raise ValidationError(f"the actuator cannot be held at {x} m without pulling")
    p_cmd = force / params.A + params.p_dz
    if p_cmd > params.p_max:
        raise ValidationError(f"holding {x} m needs {p_cmd} Pa, above p_max")
    return p_cmd
