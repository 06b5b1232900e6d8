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
Module containing unit tests for tracking and hysteresis-loop metrics.

"""
import math

import numpy as np
import pytest

from pypma.exceptions import ValidationError
from pypma.metrics import branch_separation, compute_metrics, loop_integral, wrap_degrees
from tests.utils import AMPLITUDE, BIAS, closed_loop_from, sinusoid

DT = 0.001


def _grid(duration: float) -> np.ndarray:
    return np.arange(int(round(duration / DT)) + 1) * DT


def test_identical_signals_have_no_error():
    """Test that perfect tracking gives zero error, lag and overshoot."""
    t = _grid(10.0)
    x_d = sinusoid(t, 1.0)
    report = compute_metrics(closed_loop_from(t, x_d, x_d), 1.0)

    assert report.rms_error == 0.0
    assert report.peak_error == 0.0
    assert report.phase_lag == pytest.approx(0.0, abs=1e-6)
    assert report.overshoot == pytest.approx(0.0, abs=1e-9)


def test_quarter_period_delay_is_ninety_degrees():
    """Test that a response delayed by a quarter period lags by 90 degrees."""
    t = _grid(10.0)
    x_d = sinusoid(t, 0.5)
    x = sinusoid(t, 0.5, phase=0.5 * math.pi)
    assert compute_metrics(closed_loop_from(t, x, x_d), 0.5).phase_lag == pytest.approx(
        90.0, abs=1e-6
    )


def test_leading_response_has_negative_lag():
    """Test that a response ahead of the reference reports a negative lag."""
    t = _grid(10.0)
    x_d = sinusoid(t, 1.0)
    x = sinusoid(t, 1.0, phase=-0.25 * math.pi)
    assert compute_metrics(closed_loop_from(t, x, x_d), 1.0).phase_lag == pytest.approx(
        -45.0, abs=0.5
    )


def test_amplified_delayed_response():
    """Test overshoot and lag of a 1.1x amplitude response lagging by 30 degrees."""
    t = _grid(10.0)
    x_d = sinusoid(t, 1.0)
    x = BIAS + 1.1 * AMPLITUDE * np.sin(2.0 * np.pi * t - math.pi / 6.0)
    report = compute_metrics(closed_loop_from(t, x, x_d), 1.0)

    window = slice(1000, 10000)
    expected_rms = math.sqrt(np.mean((x_d[window] - x[window]) ** 2))
    assert report.overshoot == pytest.approx(10.0, abs=0.5)
    assert report.phase_lag == pytest.approx(30.0, abs=1.0)
    assert report.rms_error == pytest.approx(expected_rms, rel=1e-12)
    assert report.peak_error == pytest.approx(np.max(np.abs(x_d[window] - x[window])))


def test_explicit_reference_shape():
    """Test that a given bias and amplitude override the inferred ones."""
    t = _grid(5.0)
    x_d = sinusoid(t, 1.0)
    report = compute_metrics(closed_loop_from(t, x_d, x_d), 1.0, bias=BIAS, amplitude=0.02)
    assert report.overshoot == pytest.approx(12.5, rel=1e-4)


def test_short_trajectory_is_rejected():
    """Test that fewer than three reference periods are refused."""
    t = _grid(2.5)
    x_d = sinusoid(t, 1.0)
    with pytest.raises(ValidationError, match="at least three periods"):
        compute_metrics(closed_loop_from(t, x_d, x_d), 1.0)


def test_unresolved_frequency_is_rejected():
    """Test that the reference period must span several samples."""
    t = _grid(1.0)
    with pytest.raises(ValidationError):
        compute_metrics(closed_loop_from(t, t, t), 800.0)


def test_metrics_are_time_shift_invariant():
    """Test that shifting both signals by a common phase keeps the metrics."""
    t = _grid(10.0)
    base = compute_metrics(
        closed_loop_from(t, sinusoid(t, 1.0, phase=0.3), sinusoid(t, 1.0)), 1.0
    )
    shifted = compute_metrics(
        closed_loop_from(t, sinusoid(t, 1.0, phase=1.3), sinusoid(t, 1.0, phase=1.0)), 1.0
    )
    assert shifted.rms_error == pytest.approx(base.rms_error, rel=1e-3)
    assert shifted.phase_lag == pytest.approx(base.phase_lag, abs=0.05)


def test_noisy_response_gives_finite_metrics():
    """Test that measurement noise does not break the lag estimate."""
    t = _grid(10.0)
    x_d = sinusoid(t, 2.0)
    rng = np.random.default_rng(4)
    x = sinusoid(t, 2.0, phase=0.2) + rng.normal(0.0, 1.0e-4, t.size)
    report = compute_metrics(closed_loop_from(t, x, x_d), 2.0)

    assert all(
        math.isfinite(value)
        for value in (report.rms_error, report.phase_lag, report.overshoot, report.peak_error)
    )
    assert report.phase_lag == pytest.approx(math.degrees(0.2), abs=1.0)


def test_cycle_breakdown():
    """Test that the breakdown covers every whole period after the first."""
    t = _grid(10.0)
    x_d = sinusoid(t, 1.0)
    x = sinusoid(t, 1.0, phase=0.1)
    report = compute_metrics(closed_loop_from(t, x, x_d), 1.0)

    assert [cycle.index for cycle in report.cycles] == list(range(9))
    assert max(cycle.peak_error for cycle in report.cycles) == pytest.approx(report.peak_error)
    mean_square = np.mean([cycle.rms_error**2 for cycle in report.cycles])
    assert math.sqrt(mean_square) == pytest.approx(report.rms_error, rel=1e-9)


@pytest.mark.parametrize(
    "angle, expected",
    [(0.0, 0.0), (190.0, -170.0), (-190.0, 170.0), (180.0, 180.0), (-180.0, 180.0), (540.0, 180.0)],
)
def test_wrap_degrees(angle, expected):
    """Test wrapping to the half-open interval (-180, 180]."""
    assert wrap_degrees(angle) == pytest.approx(expected)


def test_loop_integral_of_square_cycle():
    """Test the input work around a unit square path."""
    assert loop_integral([0.0, 1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0, 0.0], 1.0) == 1.0


def test_loop_integral_scales_with_area():
    """Test that the work is proportional to the piston area."""
    p = [0.0, 1.0e5, 1.0e5, 0.0, 0.0]
    x = [0.0, 0.0, 0.01, 0.01, 0.0]
    assert loop_integral(p, x, 2.0e-4) == pytest.approx(0.2)


def test_loop_integral_rejects_mismatched_series():
    """Test that both series must have equal length."""
    with pytest.raises(ValidationError):
        loop_integral([0.0, 1.0], [0.0, 1.0, 2.0], 1.0)


def test_branch_separation_interpolates_crossings():
    """Test the gap between the falling and rising crossings."""
    p = [0.0, 1.0, 2.0, 1.0, 0.0]
    x = [0.0, 1.0, 2.0, 3.0, 2.0]
    assert branch_separation(p, x, 0.5) == pytest.approx(2.0)


def test_branch_separation_requires_a_cycle():
    """Test that a monotone pressure has no branches."""
    with pytest.raises(ValidationError, match="never cycles"):
        branch_separation([0.0, 1.0, 2.0], [0.0, 1.0, 2.0], 0.5)
