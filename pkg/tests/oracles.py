"""Independent oracles used by the test suite.

Everything here deliberately avoids the production integration path: the
Picard oracle iterates the equivalent integral equations with plain
trapezoid cumulative sums, the phase oracle solves the scalar phase equation
of the decoupled case by bisection.
"""

from __future__ import annotations

import math

import numpy as np

from dirac_nodal.model import ProblemSpec, evaluate_array, omega


def picard_trajectory(p: ProblemSpec, lam: float, npts: int = 8001,
                      max_iter: int = 80, tol: float = 1e-13):
    """Fixed point of the integral-equation form of the problem.

    Returns (xs, phi1, phi2, iterations).  Accuracy is limited by trapezoid
    quadrature, O(h^2 lam^2).
    """
    xs = np.linspace(0.0, math.pi, npts)
    h = xs[1] - xs[0]
    v = evaluate_array(p.v, xs)
    pg, rg = v + p.m, v - p.m
    sl, cl = np.sin(lam * xs), np.cos(lam * xs)

    def cum(y):
        out = np.zeros_like(y)
        out[1:] = np.cumsum(0.5 * h * (y[1:] + y[:-1]))
        return out

    def sconv(g):
        return sl * cum(cl * g) - cl * cum(sl * g)

    def cconv(g):
        return cl * cum(cl * g) + sl * cum(sl * g)

    pairs = []
    for name, target, src in (("m11", 0, 0), ("m12", 0, 1), ("m21", 1, 0), ("m22", 1, 1)):
        for pr in getattr(p.kernel, name):
            pairs.append((evaluate_array(pr.x_factor, xs),
                          evaluate_array(pr.t_factor, xs), target, src))

    phi1 = np.cos(lam * xs - p.alpha)
    phi2 = np.sin(lam * xs - p.alpha)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        g1 = np.zeros_like(xs)
        g2 = np.zeros_like(xs)
        for ux, vt, target, src in pairs:
            inner = ux * cum(vt * (phi1 if src == 0 else phi2))
            if target == 0:
                g1 += inner
            else:
                g2 += inner
        new1 = (np.cos(lam * xs - p.alpha) + sconv(pg * phi1) + cconv(rg * phi2)
                + sconv(g1) + cconv(g2))
        new2 = (np.sin(lam * xs - p.alpha) - cconv(pg * phi1) + sconv(rg * phi2)
                - cconv(g1) + sconv(g2))
        delta = max(np.abs(new1 - phi1).max(), np.abs(new2 - phi2).max())
        phi1, phi2 = new1, new2
        if delta < tol:
            break
    return xs, phi1, phi2, iterations


def picard_characteristic(p: ProblemSpec, lam: float, npts: int = 8001) -> float:
    _, phi1, phi2, _ = picard_trajectory(p, lam, npts)
    return float(phi1[-1] * math.sin(p.beta) + phi2[-1] * math.cos(p.beta))


def exact_phase_solution(p: ProblemSpec, lam: float, xs: np.ndarray):
    """Closed form for the decoupled case (m = 0, kernel = 0)."""
    assert p.m == 0.0 and p.kernel.is_zero
    theta = lam * xs - np.array([omega(p.v, float(x)) for x in xs]) - p.alpha
    return np.cos(theta), np.sin(theta)


def phase_equation_node(p: ProblemSpec, lam: float, j: int, tol: float = 1e-13) -> float:
    """Node of the decoupled case: solves lam*x - omega(x) - alpha = (j+1/2)pi.

    Bisection on the strictly increasing phase (requires lam > sup|V|).
    """
    assert p.m == 0.0 and p.kernel.is_zero
    target = (j + 0.5) * math.pi

    def f(x):
        return lam * x - omega(p.v, x) - p.alpha - target

    lo, hi = 0.0, math.pi
    assert f(lo) < 0.0 < f(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
