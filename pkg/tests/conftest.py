"""Shared fixtures: reference problems and the (expensive) forward-generated
nodal data for the built-in example, computed once per session."""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

import dirac_nodal as dn
from dirac_nodal.cli import paper_example_problem


@pytest.fixture(scope="session")
def zero_problem():
    return dn.ProblemSpec(v=dn.FunctionSpec(), m=0.0, kernel=dn.SeparableKernelSpec(),
                          alpha=0.0, beta=0.0, grid_points=2000)


@pytest.fixture(scope="session")
def exact_case():
    """Decoupled family: m=0, kernel=0, V=cos x, alpha=pi/4, beta=pi/6."""
    return dn.ProblemSpec(v=dn.FunctionSpec((dn.Term("cos", 1.0, 1),)), m=0.0,
                          kernel=dn.SeparableKernelSpec(),
                          alpha=math.pi / 4, beta=math.pi / 6, grid_points=2000)


@pytest.fixture(scope="session")
def example1():
    return paper_example_problem()


@pytest.fixture(scope="session")
def degenerate_problem():
    """Mean-zero test problem with alpha=0 (mass recovery is degenerate)."""
    return dn.ProblemSpec(
        v=dn.FunctionSpec((dn.Term("cos", 1.0, 1),)),
        m=0.5,
        kernel=dn.SeparableKernelSpec(
            m12=(dn.KernelPair(dn.FunctionSpec((dn.Term("cos", -1.0, 1),)),
                               dn.FunctionSpec((dn.Term("power", 1.0, 0),))),)),
        alpha=0.0, beta=math.pi / 3, grid_points=2000)


LEVELS = (25, 50, 100, 200)


@pytest.fixture(scope="session")
def example1_forward(example1):
    """Eigenvalues and nodal sets for the geometric level ladder, plus timing."""
    t0 = time.perf_counter()
    eigen = {}
    nodal = {}
    for n in LEVELS:
        ev = dn.find_eigenvalues(example1, n, n)[0]
        eigen[n] = ev
        nodal[n] = dn.find_nodes(example1, ev)
    elapsed = time.perf_counter() - t0
    data = dn.NodalData.from_nodal_sets(nodal.values())
    return {"eigen": eigen, "nodal": nodal, "data": data, "forward_seconds": elapsed}


@pytest.fixture(scope="session")
def example1_recon(example1_forward):
    t0 = time.perf_counter()
    opts = dn.InverseOptions(n_values=LEVELS)
    recon = dn.reconstruct(example1_forward["data"], opts)
    return {"recon": recon, "opts": opts,
            "seconds": example1_forward["forward_seconds"] + time.perf_counter() - t0}


@pytest.fixture(scope="session")
def example1_counts(example1):
    """Node counts for n = 10..50 (acceptance criterion on count consistency)."""
    counts = {}
    for ev in dn.find_eigenvalues(example1, 10, 50):
        counts[ev.index] = len(dn.find_nodes(example1, ev).nodes)
    return counts


@pytest.fixture(scope="session")
def synthetic_example1_nodes(example1):
    """Nodal data from the closed-form nodal expansion at n in {1000, 2000, 4000}."""
    entries = {}
    for n in (1000, 2000, 4000):
        entries[n] = np.array([dn.node_asymptotic(example1, n, j).x for j in range(n)])
    return dn.NodalData(entries)


def make_zero_nodal_data(levels=(8, 16, 32)):
    """Ideal zero-problem data; power-of-two levels keep n*(x - (j+1/2)pi/n)
    exactly zero in floating point."""
    return dn.NodalData({n: (np.arange(n) + 0.5) * (math.pi / n) for n in levels})
