"""Forward solver: trajectories, the characteristic function, eigenvalues, nodes.

The first-order system is marched with classic fixed-step RK4 after rewriting
it as an explicit ODE for (phi1, phi2) plus one quadrature accumulator per
separable kernel pair.  Coefficient tables are precomputed on the stage grid
once per problem/resolution, so they are reused across the many marches a
root search performs (the tables do not depend on the spectral parameter).

The march subdivides each reported grid interval into substeps_for(lam)
substeps.  Plain RK4 carries a phase error ~ lam^5 h^4, which at 2000 grid
points and lam=20 already exceeds 1e-7; scaling the substep count with lam
keeps trajectories at the 1e-9 level across the working range while the
reported grid, and the O(h^4) refinement behaviour in the grid step, stay
unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import backend
from .errors import BracketFailure, InvalidValue
from .model import (FunctionSpec, ProblemSpec, SampledFunction, evaluate_array)
from .numerics import cumulative_simpson

#: |characteristic| accepted at a root.
ROOT_TOL = 1e-10
#: final bisection bracket width for eigenvalues.
BRACKET_TOL = 1e-10
#: bracket half-width around the asymptotic seed, and the one-shot expansion.
BRACKET_HALF_WIDTH = 0.45
BRACKET_EXPANSION = 0.5
#: bisection width for nodal points.
NODE_TOL = 1e-10
#: minimum trajectory samples per expected node when extracting nodes.
SAMPLES_PER_NODE = 40

_KIND_CODE = {"power": 0, "cos": 1, "sin": 2}


def substeps_for(lam: float) -> int:
    """March substeps per grid interval; grows linearly with |lam|."""
    return max(1, math.ceil((abs(lam) + 1.0) / 5.0))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution pair at a fixed spectral parameter."""

    lam: float
    grid: SampledFunction  # x-coordinate carrier
    phi1: np.ndarray
    phi2: np.ndarray
    substeps: int
    acc: np.ndarray | None = None  # accumulator snapshots, used for dense output


@dataclass(frozen=True)
class Eigenvalue:
    index: int
    lam: float
    residual: float
    seed: float


@dataclass(frozen=True, eq=False)
class NodalSet:
    """Sorted zeros of phi1(., lam_n) strictly inside (0, pi)."""

    index: int
    lam: float
    nodes: np.ndarray


def _flatten_series(specs) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    kinds, coeffs, freqs, off = [], [], [], [0]
    for spec in specs:
        for t in spec.terms:
            kinds.append(_KIND_CODE[t.kind])
            coeffs.append(t.coeff)
            freqs.append(float(t.k))
        off.append(len(kinds))
    return (np.asarray(kinds, dtype=np.int32), np.asarray(coeffs, dtype=float),
            np.asarray(freqs, dtype=float), np.asarray(off, dtype=np.int32))


@dataclass(frozen=True, eq=False)
class _Tables:
    """Everything a march needs except the spectral parameter."""

    n_out: int
    substeps: int
    h_out: float
    h_sub: float
    n_steps: int
    p_tab: np.ndarray
    r_tab: np.ndarray
    ux_tab: np.ndarray
    vt_tab: np.ndarray
    w_comp: np.ndarray
    src_comp: np.ndarray
    # analytic term arrays for dense-output segments
    vk: np.ndarray
    vc: np.ndarray
    vf: np.ndarray
    uk: np.ndarray
    uc: np.ndarray
    uf: np.ndarray
    uo: np.ndarray
    tk: np.ndarray
    tc: np.ndarray
    tf: np.ndarray
    to: np.ndarray


def _kernel_pair_lists(p: ProblemSpec):
    """Separable pairs in entry order (1,1),(1,2),(2,1),(2,2).

    w_comp is the memory-integral component the pair feeds (0 for W1, 1 for
    W2); src_comp is the phi component its accumulator integrates.
    """
    xspecs, tspecs, w_comp, src_comp = [], [], [], []
    for (w, s), pairs in (((0, 0), p.kernel.m11), ((0, 1), p.kernel.m12),
                          ((1, 0), p.kernel.m21), ((1, 1), p.kernel.m22)):
        for pair in pairs:
            xspecs.append(pair.x_factor)
            tspecs.append(pair.t_factor)
            w_comp.append(w)
            src_comp.append(s)
    return xspecs, tspecs, np.asarray(w_comp, dtype=np.int32), np.asarray(src_comp, dtype=np.int32)


@lru_cache(maxsize=16)
def _tables(p: ProblemSpec, n_out: int, substeps: int) -> _Tables:
    h_out = math.pi / (n_out - 1)
    h_sub = h_out / substeps
    n_steps = (n_out - 1) * substeps
    xs = 0.5 * h_sub * np.arange(2 * n_steps + 1)
    v_vals = evaluate_array(p.v, xs)
    xspecs, tspecs, w_comp, src_comp = _kernel_pair_lists(p)
    n_pairs = len(xspecs)
    ux_tab = np.empty((n_pairs, len(xs)))
    vt_tab = np.empty((n_pairs, len(xs)))
    for k in range(n_pairs):
        ux_tab[k] = evaluate_array(xspecs[k], xs)
        vt_tab[k] = evaluate_array(tspecs[k], xs)
    vk, vc, vf, _ = _flatten_series([p.v])
    uk, uc, uf, uo = _flatten_series(xspecs)
    tk, tc, tf, to = _flatten_series(tspecs)
    return _Tables(n_out=n_out, substeps=substeps, h_out=h_out, h_sub=h_sub,
                   n_steps=n_steps, p_tab=v_vals + p.m, r_tab=v_vals - p.m,
                   ux_tab=ux_tab, vt_tab=vt_tab, w_comp=w_comp, src_comp=src_comp,
                   vk=vk, vc=vc, vf=vf, uk=uk, uc=uc, uf=uf, uo=uo,
                   tk=tk, tc=tc, tf=tf, to=to)


def _run_march(p: ProblemSpec, tab: _Tables, lam: float):
    y1_0 = math.cos(p.alpha)
    y2_0 = -math.sin(p.alpha)
    phi1 = np.empty(tab.n_out)
    phi2 = np.empty(tab.n_out)
    acc = np.empty((tab.n_out, len(tab.w_comp)))
    backend.march(float(lam), tab.h_sub, tab.n_steps, tab.substeps, y1_0, y2_0,
                  tab.p_tab, tab.r_tab, tab.ux_tab, tab.vt_tab,
                  tab.w_comp, tab.src_comp, phi1, phi2, acc)
    return phi1, phi2, acc


def solve(p: ProblemSpec, lam: float, *, grid_points: int | None = None,
          substeps: int | None = None) -> Trajectory:
    """Integrate the system at fixed lam; samples reported on the uniform grid."""
    n_out = grid_points if grid_points is not None else p.grid_points
    if n_out < 2:
        raise InvalidValue("gridPoints", f"need at least 2 output points, got {n_out}")
    s = substeps if substeps is not None else substeps_for(lam)
    tab = _tables(p, n_out, s)
    phi1, phi2, acc = _run_march(p, tab, lam)
    grid = SampledFunction(0.0, tab.h_out, np.linspace(0.0, math.pi, n_out))
    return Trajectory(lam=float(lam), grid=grid, phi1=phi1, phi2=phi2, substeps=s, acc=acc)


def characteristic(p: ProblemSpec, lam: float, *, grid_points: int | None = None,
                   substeps: int | None = None) -> float:
    """Boundary form phi1(pi) sin(beta) + phi2(pi) cos(beta)."""
    n_out = grid_points if grid_points is not None else p.grid_points
    s = substeps if substeps is not None else substeps_for(lam)
    tab = _tables(p, n_out, s)
    return _characteristic_from_tables(p, tab, lam)


def _characteristic_from_tables(p: ProblemSpec, tab: _Tables, lam: float) -> float:
    phi1, phi2, _ = _run_march(p, tab, lam)
    return float(phi1[-1] * math.sin(p.beta) + phi2[-1] * math.cos(p.beta))


def _bisect_root(f, lo: float, hi: float, f_lo: float, f_hi: float,
                 width_tol: float, value_tol: float, max_iter: int = 300):
    """Bisection to the requested bracket width, then down to the value tol.

    Returns (root, |f(root)|) where root is the bracket endpoint with the
    smaller absolute value.
    """
    for _ in range(max_iter):
        if hi - lo <= width_tol and min(abs(f_lo), abs(f_hi)) <= value_tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # float resolution exhausted
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid, 0.0
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    if abs(f_lo) <= abs(f_hi):
        return lo, abs(f_lo)
    return hi, abs(f_hi)


def find_eigenvalues(p: ProblemSpec, n_min: int, n_max: int) -> list[Eigenvalue]:
    """Eigenvalues for indices n_min..n_max, seeded from the asymptotic formula.

    Each seed gets a bracket of half-width 0.45 (expanded once to 0.95 if the
    characteristic does not change sign), then bisection to BRACKET_TOL width
    and ROOT_TOL residual.  n=0 has no asymptotic seed: use scan_eigenvalues.
    """
    from .asymptotics import eigenvalue_asymptotic

    if n_min > n_max:
        raise InvalidValue("nMin", f"nMin={n_min} exceeds nMax={n_max}")
    if n_min <= 0 <= n_max:
        raise InvalidValue("nMin", "index 0 has no asymptotic seed; use the scan mode")
    out: list[Eigenvalue] = []
    for n in range(n_min, n_max + 1):
        seed = eigenvalue_asymptotic(p, n)
        tab = _tables(p, p.grid_points, substeps_for(seed))

        def delta(lam: float) -> float:
            return _characteristic_from_tables(p, tab, lam)

        lo, hi = seed - BRACKET_HALF_WIDTH, seed + BRACKET_HALF_WIDTH
        f_lo, f_hi = delta(lo), delta(hi)
        if (f_lo < 0.0) == (f_hi < 0.0) and f_lo != 0.0 and f_hi != 0.0:
            lo, hi = seed - BRACKET_HALF_WIDTH - BRACKET_EXPANSION, seed + BRACKET_HALF_WIDTH + BRACKET_EXPANSION
            f_lo, f_hi = delta(lo), delta(hi)
            if (f_lo < 0.0) == (f_hi < 0.0) and f_lo != 0.0 and f_hi != 0.0:
                raise BracketFailure(n, "no sign change of the characteristic around the seed")
        root, residual = _bisect_root(delta, lo, hi, f_lo, f_hi, BRACKET_TOL, ROOT_TOL)
        if out and root <= out[-1].lam:
            raise BracketFailure(n, "eigenvalue sequence not strictly increasing; "
                                    "seeding unreliable at this index")
        out.append(Eigenvalue(index=n, lam=root, residual=residual, seed=seed))
    return out


def scan_eigenvalues(p: ProblemSpec, lam_min: float, lam_max: float,
                     step: float = 0.1) -> list[Eigenvalue]:
    """Dense characteristic scan over [lam_min, lam_max]; brackets every sign change.

    Completeness fallback for small or zero indices where asymptotic seeding
    is unreliable.  Indices number the roots found, starting at 0.
    """
    if lam_max <= lam_min:
        raise InvalidValue("scan", "empty scan interval")
    n_samples = max(2, math.ceil((lam_max - lam_min) / step) + 1)
    grid = np.linspace(lam_min, lam_max, n_samples)
    tab = _tables(p, p.grid_points, substeps_for(max(abs(lam_min), abs(lam_max))))

    def delta(lam: float) -> float:
        return _characteristic_from_tables(p, tab, lam)

    values = [delta(g) for g in grid]
    out: list[Eigenvalue] = []
    for i in range(len(grid) - 1):
        f_lo, f_hi = values[i], values[i + 1]
        if f_lo == 0.0:
            out.append(Eigenvalue(index=len(out), lam=float(grid[i]), residual=0.0,
                                  seed=float(grid[i])))
            continue
        if (f_lo < 0.0) != (f_hi < 0.0):
            seed = 0.5 * (grid[i] + grid[i + 1])
            root, residual = _bisect_root(delta, float(grid[i]), float(grid[i + 1]),
                                          f_lo, f_hi, BRACKET_TOL, ROOT_TOL)
            out.append(Eigenvalue(index=len(out), lam=root, residual=residual, seed=seed))
    if values[-1] == 0.0:
        out.append(Eigenvalue(index=len(out), lam=float(grid[-1]), residual=0.0,
                              seed=float(grid[-1])))
    return out


def find_nodes(p: ProblemSpec, ev: Eigenvalue) -> NodalSet:
    """Zeros of phi1(., lam_n) in (0, pi).

    phi1 is sampled on a grid of max(gridPoints, 40n) points; each sign change
    is polished by bisection on a dense-output evaluation that re-integrates
    within the cell from the stored augmented state (so refinement accuracy
    matches the march itself).  Exact-zero samples count as nodes.
    """
    n_fine = max(p.grid_points, SAMPLES_PER_NODE * abs(ev.index))
    s = substeps_for(ev.lam)
    tab = _tables(p, n_fine, s)
    phi1, phi2, acc = _run_march(p, tab, ev.lam)
    h = tab.h_out
    lam = float(ev.lam)

    def phi1_at(i_cell: int, x: float) -> float:
        return backend.segment_phi1(lam, p.m, i_cell * h,
                                    float(phi1[i_cell]), float(phi2[i_cell]),
                                    acc[i_cell], x, s,
                                    tab.vk, tab.vc, tab.vf,
                                    tab.uk, tab.uc, tab.uf, tab.uo,
                                    tab.tk, tab.tc, tab.tf, tab.to,
                                    tab.w_comp, tab.src_comp)

    nodes: list[float] = []
    for i in range(n_fine - 1):
        f_lo, f_hi = phi1[i], phi1[i + 1]
        if f_lo == 0.0:
            if i > 0:  # endpoints are not interior nodes
                nodes.append(i * h)
            continue
        if f_hi == 0.0 or (f_lo < 0.0) == (f_hi < 0.0):
            continue
        lo, hi = i * h, (i + 1) * h
        while hi - lo > NODE_TOL:
            mid = 0.5 * (lo + hi)
            f_mid = phi1_at(i, mid)
            if f_mid == 0.0:
                lo = hi = mid
                break
            if (f_mid < 0.0) == (f_lo < 0.0):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        nodes.append(0.5 * (lo + hi))
    kept = [x for x in nodes if 0.0 < x < math.pi]
    return NodalSet(index=ev.index, lam=lam, nodes=np.asarray(kept))


def _sin_convolution(sl: np.ndarray, cl: np.ndarray, g: np.ndarray, h: float) -> np.ndarray:
    """Integral of sin(lam (x-t)) g(t) over [0, x], at every grid point."""
    return sl * cumulative_simpson(cl * g, h) - cl * cumulative_simpson(sl * g, h)


def _cos_convolution(sl: np.ndarray, cl: np.ndarray, g: np.ndarray, h: float) -> np.ndarray:
    """Integral of cos(lam (x-t)) g(t) over [0, x], at every grid point."""
    return cl * cumulative_simpson(cl * g, h) + sl * cumulative_simpson(sl * g, h)


def integral_residual(p: ProblemSpec, t: Trajectory) -> float:
    """Sup-norm defect of the stored trajectory in the equivalent integral equations.

    The right-hand sides are rebuilt from the trajectory by composite
    quadrature (cumulative Simpson after splitting the oscillatory factors),
    which shares nothing with the RK march, so this serves as an independent
    correctness oracle.
    """
    xs = t.grid.values
    h = t.grid.grid_step
    lam = t.lam
    phi1, phi2 = t.phi1, t.phi2
    v_vals = evaluate_array(p.v, xs)
    p_g = v_vals + p.m
    r_g = v_vals - p.m
    sl = np.sin(lam * xs)
    cl = np.cos(lam * xs)

    # inner memory integrals: G1 collects the row feeding phi1's equation
    g1 = np.zeros_like(xs)
    g2 = np.zeros_like(xs)
    for pairs, target, src in ((p.kernel.m11, 0, phi1), (p.kernel.m12, 0, phi2),
                               (p.kernel.m21, 1, phi1), (p.kernel.m22, 1, phi2)):
        for pair in pairs:
            inner = evaluate_array(pair.x_factor, xs) * cumulative_simpson(
                evaluate_array(pair.t_factor, xs) * src, h)
            if target == 0:
                g1 += inner
            else:
                g2 += inner

    rhs1 = (np.cos(lam * xs - p.alpha)
            + _sin_convolution(sl, cl, p_g * phi1, h)
            + _cos_convolution(sl, cl, r_g * phi2, h)
            + _sin_convolution(sl, cl, g1, h)
            + _cos_convolution(sl, cl, g2, h))
    rhs2 = (np.sin(lam * xs - p.alpha)
            - _cos_convolution(sl, cl, p_g * phi1, h)
            + _sin_convolution(sl, cl, r_g * phi2, h)
            - _cos_convolution(sl, cl, g1, h)
            + _sin_convolution(sl, cl, g2, h))
    return float(max(np.abs(rhs1 - phi1).max(), np.abs(rhs2 - phi2).max()))
