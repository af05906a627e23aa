"""Small numerical helpers shared by the solver and the inverse engine."""

from __future__ import annotations

import numpy as np


def cumulative_simpson(y: np.ndarray, h: float) -> np.ndarray:
    """Cumulative integral of uniformly sampled y, O(h^4) at every prefix.

    Even prefixes follow composite Simpson panels; odd prefixes chain the same
    panels from a half-panel seed I[1] = h/12 (5 y0 + 8 y1 - y2).  Hand-rolled
    (rather than scipy's) so output bytes do not depend on the scipy version.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    out = np.zeros(n)
    if n < 2:
        return out
    if n == 2:  # single interval: trapezoid is all there is
        out[1] = 0.5 * h * (y[0] + y[1])
        return out
    out[1] = h / 12.0 * (5.0 * y[0] + 8.0 * y[1] - y[2])
    panels = h / 3.0 * (y[:-2] + 4.0 * y[1:-1] + y[2:])  # panel ending at i+2
    out[2::2] = np.cumsum(panels[0::2])
    if n > 3:
        out[3::2] = out[1] + np.cumsum(panels[1::2])
    return out


def neville(xs, ys, x0: float) -> float:
    """Value at x0 of the polynomial through (xs, ys)."""
    p = [float(v) for v in ys]
    xs = [float(v) for v in xs]
    n = len(p)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = ((x0 - xs[i + m]) * p[i] + (xs[i] - x0) * p[i + 1]) / (xs[i] - xs[i + m])
    return p[0]


def extrapolate_to_zero(ns, values, depth: int) -> tuple[float, float]:
    """Richardson-extrapolate a sequence of 1/n-convergent estimates.

    Treats values as samples of a polynomial in t = 1/n and evaluates at t=0.
    Level k uses the k+1 largest n; returns (level-`depth` extrapolant,
    |difference of the last two levels|) as the error estimate.
    """
    order = np.argsort(ns)
    ns = [float(ns[i]) for i in order]
    values = [float(values[i]) for i in order]
    ts = [1.0 / n for n in ns]
    levels = [neville(ts[-(k + 1):], values[-(k + 1):], 0.0) for k in range(depth + 1)]
    return levels[-1], abs(levels[-1] - levels[-2])


def moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average with the half-width shrunk near the ends."""
    if window <= 1:
        return np.asarray(values, dtype=float).copy()
    half = window // 2
    values = np.asarray(values, dtype=float)
    n = len(values)
    out = np.empty(n)
    csum = np.concatenate(([0.0], np.cumsum(values)))
    for i in range(n):
        k = min(half, i, n - 1 - i)
        out[i] = (csum[i + k + 1] - csum[i - k]) / (2 * k + 1)
    return out


def central_difference(values: np.ndarray, h: float) -> np.ndarray:
    """First derivative on a uniform grid: central interior, one-sided O(h^2) ends."""
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    out[1:-1] = (values[2:] - values[:-2]) / (2.0 * h)
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
    out[-1] = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * h)
    return out
