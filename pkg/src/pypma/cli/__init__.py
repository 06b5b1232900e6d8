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
Module containing the PyPMA command-line interface.

"""
