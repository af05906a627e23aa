"""Closed-form large-parameter expansions of the solution, the boundary
function, the eigenvalues and the nodal points.

All formulas drop their o(1/lambda) (resp. o(1/n^2)) remainders; comparisons
against the solver are therefore trend checks, not absolute-constant checks.
Used for eigenvalue seeding, convergence validation, and synthetic
nodal-data generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidValue, NoConvergence
from .model import ProblemSpec, kernel_traces, omega

#: fixed-point controls for the implicit nodal formula
NODE_FP_TOL = 1e-12
NODE_FP_MAX_ITER = 20


@dataclass(frozen=True)
class AsymptoticNode:
    n: int
    j: int
    x: float
    iterations: int


def phi_asymptotic(p: ProblemSpec, x: float, lam: float) -> tuple[float, float]:
    """First-order-in-1/lambda solution pair at (x, lam)."""
    if lam == 0:
        raise InvalidValue("lambda", "asymptotic expansion is singular at lambda=0")
    w = omega(p.v, x)
    k_val, l_val = kernel_traces(p.kernel, x)
    theta = lam * x - w - p.alpha
    bare = lam * x - w
    m = p.m
    phi1 = (math.cos(theta)
            + (m * math.sin(p.alpha) / lam) * math.sin(bare)
            + (m * m * x / (2.0 * lam)) * math.sin(theta)
            - (k_val / (2.0 * lam)) * math.cos(theta)
            - (l_val / (2.0 * lam)) * math.sin(theta))
    phi2 = (math.sin(theta)
            - (m * math.cos(p.alpha) / lam) * math.sin(bare)
            - (m * m * x / (2.0 * lam)) * math.cos(theta)
            - (k_val / (2.0 * lam)) * math.sin(theta)
            + (l_val / (2.0 * lam)) * math.cos(theta))
    return phi1, phi2


def delta_asymptotic(p: ProblemSpec, lam: float) -> float:
    """First-order expansion of the characteristic function."""
    if lam == 0:
        raise InvalidValue("lambda", "asymptotic expansion is singular at lambda=0")
    w_pi = omega(p.v, math.pi)
    k_pi, l_pi = kernel_traces(p.kernel, math.pi)
    theta = lam * math.pi - w_pi + p.beta - p.alpha
    m = p.m
    return (math.sin(theta)
            - (m * m * math.pi / (2.0 * lam)) * math.cos(theta)
            - (k_pi / (2.0 * lam)) * math.sin(theta)
            + (l_pi / (2.0 * lam)) * math.cos(theta)
            - (m / lam) * math.sin(lam * math.pi - w_pi) * math.cos(p.beta + p.alpha))


def eigenvalue_asymptotic(p: ProblemSpec, n: int) -> float:
    """Eigenvalue expansion through the 1/n term (undefined at n=0)."""
    if n == 0:
        raise InvalidValue("n", "the 1/(2 n pi) correction is singular at n=0")
    w_pi = omega(p.v, math.pi)
    _, l_pi = kernel_traces(p.kernel, math.pi)
    m = p.m
    correction = (m * m * math.pi - l_pi
                  + 2.0 * m * math.cos(p.beta + p.alpha) * math.sin(p.alpha - p.beta))
    return (n + w_pi / math.pi + (p.alpha - p.beta) / math.pi
            + correction / (2.0 * n * math.pi))


def node_asymptotic(p: ProblemSpec, n: int, j: int) -> AsymptoticNode:
    """Nodal point x_n^j from the second-order expansion.

    The formula is implicit (omega and L are evaluated at the node), so it is
    solved by fixed-point iteration from the leading term (j+1/2)pi/n; the
    iteration map contracts like O(1/n).
    """
    if n < 1:
        raise InvalidValue("n", f"need n >= 1, got {n}")
    if not 0 <= j <= n:
        raise InvalidValue("j", f"need 0 <= j <= n, got j={j}")
    w_pi = omega(p.v, math.pi)
    gauge = (w_pi + p.alpha - p.beta) / math.pi
    m = p.m
    lead = (j + 0.5) * math.pi / n
    x = lead
    for it in range(1, NODE_FP_MAX_ITER + 1):
        w = omega(p.v, x)
        _, l_val = kernel_traces(p.kernel, x)
        x_next = (lead
                  + (w + p.alpha) / n
                  - lead * gauge / n
                  - gauge * (w + p.alpha) / (n * n)
                  + (m * m * x - l_val + m * math.sin(2.0 * p.alpha)) / (2.0 * n * n))
        if abs(x_next - x) <= NODE_FP_TOL:
            return AsymptoticNode(n=n, j=j, x=x_next, iterations=it)
        x = x_next
    raise NoConvergence(f"nodal fixed point for (n={n}, j={j}) did not converge in "
                        f"{NODE_FP_MAX_ITER} iterations; n too small for the asymptotic regime")
