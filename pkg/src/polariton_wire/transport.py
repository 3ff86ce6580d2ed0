"""Shape analysis of d(t) trajectories: ballistic window, plateau, oscillation period."""

from __future__ import annotations

import math

import numpy as np

from polariton_wire.units import HBAR


def rabi_period(omega_r: float) -> float:
    """Period 2*pi*hbar/Omega_R in fs."""
    return 2 * math.pi * HBAR / omega_r


def dominant_period(times, signal) -> float:
    """Period (fs) of the strongest non-zero frequency in a uniformly sampled signal."""
    times = np.asarray(times, dtype=float)
    x = np.asarray(signal, dtype=float)
    x = x - x.mean()
    dt = times[1] - times[0]
    power = np.abs(np.fft.rfft(x)) ** 2
    freqs = np.fft.rfftfreq(len(x), dt)
    k = int(np.argmax(power[1:])) + 1
    if 1 <= k < len(power) - 1:
        # parabolic refinement of the peak on log power
        a, b, c = np.log(power[k - 1:k + 2] + 1e-300)
        denom = a - 2 * b + c
        shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
    else:
        shift = 0.0
    return 1.0 / ((k + shift) * (freqs[1] - freqs[0]))


def period_average(times, values, period: float):
    """Running mean over one oscillation period; returns (centred times, averaged values)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    dt = times[1] - times[0]
    w = max(int(round(period / dt)), 1)
    if w == 1 or w > len(values):
        return times, values
    avg = np.convolve(values, np.ones(w) / w, mode="valid")
    centred = times[: len(avg)] + 0.5 * (w - 1) * dt
    return centred, avg


def linear_fit(t, y):
    """Least-squares line; returns (slope, intercept, r_squared)."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), float(r2)


def plateau_value(times, d) -> float:
    """Mean width over the second half of the trajectory."""
    times = np.asarray(times, dtype=float)
    return float(np.mean(np.asarray(d)[times >= 0.5 * times[-1]]))


def ballistic_fit(times, d, omega_r: float, plateau_fraction: float = 0.7) -> dict:
    """Linear fit of the Rabi-period-averaged width before it reaches the plateau.

    The pre-plateau window runs from t = 0 to the first time the averaged
    width reaches ``plateau_fraction`` of the plateau value.
    """
    plateau = plateau_value(times, d)
    ts, ds = period_average(times, d, rabi_period(omega_r))
    hit = np.flatnonzero(ds >= plateau_fraction * plateau)
    end = int(hit[0]) if hit.size else len(ds) - 1
    end = max(end, 2)
    slope, intercept, r2 = linear_fit(ts[: end + 1], ds[: end + 1])
    return {
        "slope_per_fs": slope,
        "intercept": intercept,
        "r_squared": r2,
        "window_end_fs": float(ts[end]),
        "plateau": plateau,
    }


def piecewise_linear_fit(times, d, min_points: int = 3) -> dict:
    """Continuous two-segment least-squares fit with a scanned breakpoint."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(d, dtype=float)
    best = None
    for k in range(min_points, len(t) - min_points):
        tb = t[k]
        basis = np.column_stack([np.ones_like(t), t, np.maximum(t - tb, 0.0)])
        coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
        sse = float(np.sum((basis @ coef - y) ** 2))
        if best is None or sse < best[0]:
            best = (sse, tb, coef)
    sse, tb, coef = best
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return {
        "breakpoint_fs": float(tb),
        "slope_before": float(coef[1]),
        "slope_after": float(coef[1] + coef[2]),
        "r_squared": 1.0 - sse / ss_tot if ss_tot > 0 else 1.0,
    }


def classify_shape(times, d, omega_r: float | None = None) -> dict:
    """Label a trajectory 'ballistic-plateau' when a rising segment gives way to a flat one.

    The second slope must be below a fifth of the first; ``omega_r`` (if
    given) removes the Rabi oscillation before fitting.
    """
    t, y = (period_average(times, d, rabi_period(omega_r)) if omega_r else (np.asarray(times), np.asarray(d)))
    fit = piecewise_linear_fit(t, y)
    rising = fit["slope_before"] > 0
    flat = abs(fit["slope_after"]) < 0.2 * abs(fit["slope_before"])
    fit["shape"] = "ballistic-plateau" if rising and flat else ("rising" if rising else "other")
    return fit
