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
Module mapping artifact schemas and process exit codes.

"""

TRAJECTORY_COLUMNS: tuple[str, ...] = ("t", "p_cmd", "p_eff", "x", "v", "z")
CLOSED_LOOP_COLUMNS: tuple[str, ...] = TRAJECTORY_COLUMNS + ("x_d", "v_d", "e")
COMPARISON_COLUMNS: tuple[str, ...] = ("t", "x_d", "x_FB", "x_CT", "e_FB", "e_CT")
START_TABLE_COLUMNS: tuple[str, ...] = (
    "start_index",
    "cost",
    "iterations",
    "alpha",
    "beta",
    "gamma",
    "d",
    "K_e",
    "p_dz",
)

# 17 significant digits round-trips any IEEE double
FLOAT_FORMAT = "%.17g"

EXIT_SUCCESS = 0
EXIT_VALIDATION_ERROR = 2
EXIT_DIVERGENCE = 3
