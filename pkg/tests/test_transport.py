import numpy as np
import pytest

from polariton_wire.transport import (
    ballistic_fit,
    classify_shape,
    dominant_period,
    linear_fit,
    period_average,
    piecewise_linear_fit,
    rabi_period,
)


def test_rabi_period():
    assert rabi_period(0.1) == pytest.approx(41.357, abs=1e-3)


def test_dominant_period_of_sine():
    t = np.arange(0, 5000, 10.0)
    assert dominant_period(t, np.cos(2 * np.pi * t / 41.36)) == pytest.approx(41.36, rel=0.01)
    assert dominant_period(t, 0.3 + np.sin(2 * np.pi * t / 400.0)) == pytest.approx(400.0, rel=0.01)


def test_period_average_removes_oscillation():
    t = np.arange(0, 1000, 1.0)
    ts, ys = period_average(t, 2 + np.sin(2 * np.pi * t / 50), 50.0)
    assert np.allclose(ys, 2.0, atol=1e-12)
    assert len(ts) == len(ys)


def test_linear_fit_exact():
    slope, intercept, r2 = linear_fit([0, 1, 2, 3], [1, 3, 5, 7])
    assert (slope, intercept, r2) == (pytest.approx(2), pytest.approx(1), pytest.approx(1))


def ramp_plateau(t, slope=0.2, knee=400.0, wobble=0.0):
    return 5 + slope * np.minimum(t, knee) + wobble * np.sin(2 * np.pi * t / rabi_period(0.1))


def test_ballistic_fit_sees_the_ramp():
    t = np.arange(0, 2000, 1.0)
    fit = ballistic_fit(t, ramp_plateau(t, wobble=3.0), 0.1)
    assert fit["r_squared"] > 0.99
    assert fit["slope_per_fs"] == pytest.approx(0.2, rel=0.05)
    assert fit["plateau"] == pytest.approx(85.0, rel=0.01)


def test_piecewise_fit_recovers_knee():
    t = np.arange(0, 2000, 10.0)
    fit = piecewise_linear_fit(t, ramp_plateau(t))
    assert fit["breakpoint_fs"] == pytest.approx(400.0, abs=10)
    assert fit["slope_after"] == pytest.approx(0.0, abs=1e-9)


def test_classify_shape():
    t = np.arange(0, 2000, 10.0)
    assert classify_shape(t, ramp_plateau(t))["shape"] == "ballistic-plateau"
    assert classify_shape(t, 5 + 0.1 * t)["shape"] == "rising"
