"""Forward and inverse nodal computations for a 2x2 first-order system with a
Volterra memory term: trajectories, eigenvalues, nodal points, closed-form
asymptotics, and reconstruction of the coefficients from dense nodal data.
"""

from .backend import ACTIVE as active_backend
from .backend import HAVE_COMPILED as have_compiled_backend
from .errors import (BracketFailure, DegenerateAlpha, DiracNodalError, EmptyLevel,
                     InvalidValue, MalformedConfig, NoConvergence, WindowTooLarge)
from .model import (FunctionSpec, KernelPair, ProblemSpec, SampledFunction,
                    SeparableKernelSpec, Term, evaluate, evaluate_array,
                    kernel_traces, omega, parse_problem, serialize_problem)
from .forward import (Eigenvalue, NodalSet, Trajectory, characteristic,
                      find_eigenvalues, find_nodes, integral_residual,
                      scan_eigenvalues, solve, substeps_for)
from .asymptotics import (AsymptoticNode, delta_asymptotic, eigenvalue_asymptotic,
                          node_asymptotic, phi_asymptotic)
from .inverse import (Frame, InverseOptions, NodalData, Reconstruction,
                      differentiate, estimate_f, estimate_g, extract_frame,
                      load_nodal_csv, recover_m_and_L, reconstruct, select_node)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticNode", "BracketFailure", "DegenerateAlpha", "DiracNodalError",
    "Eigenvalue", "EmptyLevel", "Frame", "FunctionSpec", "InvalidValue",
    "InverseOptions", "KernelPair", "MalformedConfig", "NoConvergence",
    "NodalData", "NodalSet", "ProblemSpec", "Reconstruction", "SampledFunction",
    "SeparableKernelSpec", "Term", "Trajectory", "WindowTooLarge",
    "active_backend", "characteristic", "delta_asymptotic", "differentiate",
    "eigenvalue_asymptotic", "estimate_f", "estimate_g", "evaluate",
    "evaluate_array", "extract_frame", "find_eigenvalues", "find_nodes",
    "have_compiled_backend", "integral_residual", "kernel_traces",
    "load_nodal_csv", "node_asymptotic", "omega", "parse_problem",
    "phi_asymptotic", "reconstruct", "recover_m_and_L", "scan_eigenvalues",
    "select_node", "serialize_problem", "solve", "substeps_for",
]
