"""Problem data types, closed-form integrals, and config parsing.

Functions on [0, pi] are finite series of power / cosine / sine terms, and
integral kernels are finite separable sums of such factors.  This restriction
buys exact term-by-term antiderivatives and an O(N) incremental treatment of
the memory integral in the forward solver.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import InvalidValue, MalformedConfig

TERM_KINDS = ("power", "cos", "sin")

#: Absolute tolerance requested from the kernel-trace quadrature.
TRACE_QUAD_TOL = 1e-12


def _require_finite(value: float, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidValue(path, f"expected a finite number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise InvalidValue(path, f"expected a finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class Term:
    """One series term: c*x^k, c*cos(k x) or c*sin(k x)."""

    kind: str
    coeff: float
    k: int

    def __post_init__(self):
        if self.kind not in TERM_KINDS:
            raise InvalidValue("kind", f"unknown term kind {self.kind!r}")
        _require_finite(self.coeff, "coeff")
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 0:
            raise InvalidValue("k", f"degree/frequency must be a non-negative integer, got {self.k!r}")


@dataclass(frozen=True)
class FunctionSpec:
    """Closed-form real function on [0, pi]: a finite sum of terms.

    An empty term tuple denotes the zero function.
    """

    terms: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def is_zero(self) -> bool:
        return not self.terms


ZERO_FUNCTION = FunctionSpec()


def evaluate(f: FunctionSpec, x: float) -> float:
    """Evaluate the series at a single point."""
    acc = 0.0
    for t in f.terms:
        if t.kind == "power":
            acc += t.coeff * x**t.k
        elif t.kind == "cos":
            acc += t.coeff * math.cos(t.k * x)
        else:
            acc += t.coeff * math.sin(t.k * x)
    return acc


def evaluate_array(f: FunctionSpec, xs: np.ndarray) -> np.ndarray:
    """Evaluate the series on an array of points."""
    out = np.zeros_like(xs, dtype=float)
    for t in f.terms:
        if t.kind == "power":
            out += t.coeff * xs**t.k
        elif t.kind == "cos":
            out += t.coeff * np.cos(t.k * xs)
        else:
            out += t.coeff * np.sin(t.k * xs)
    return out


def _antiderivative(t: Term, x) :
    """Term antiderivative vanishing at 0 (scalar or array argument)."""
    if t.kind == "power":
        return t.coeff * x ** (t.k + 1) / (t.k + 1)
    if t.kind == "cos":
        if t.k == 0:
            return t.coeff * x  # cos(0 x) is the constant 1
        return t.coeff * np.sin(t.k * x) / t.k
    if t.k == 0:
        return np.zeros_like(x) if isinstance(x, np.ndarray) else 0.0  # sin(0 x) is 0
    return t.coeff * (1.0 - np.cos(t.k * x)) / t.k


def omega(v: FunctionSpec, x: float) -> float:
    """Integral of the potential from 0 to x, term by term in closed form."""
    return float(sum(_antiderivative(t, float(x)) for t in v.terms))


def omega_array(v: FunctionSpec, xs: np.ndarray) -> np.ndarray:
    """Vectorized :func:`omega`."""
    out = np.zeros_like(xs, dtype=float)
    for t in v.terms:
        out += _antiderivative(t, xs)
    return out


@dataclass(frozen=True)
class KernelPair:
    """One separable summand u(x)*v(t) of a kernel entry."""

    x_factor: FunctionSpec
    t_factor: FunctionSpec


@dataclass(frozen=True)
class SeparableKernelSpec:
    """2x2 integral kernel; each entry is a finite sum of separable pairs."""

    m11: tuple[KernelPair, ...] = ()
    m12: tuple[KernelPair, ...] = ()
    m21: tuple[KernelPair, ...] = ()
    m22: tuple[KernelPair, ...] = ()

    def __post_init__(self):
        for name in ("m11", "m12", "m21", "m22"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def entries(self) -> tuple[tuple[tuple[KernelPair, ...], ...], ...]:
        return ((self.m11, self.m12), (self.m21, self.m22))

    @property
    def is_zero(self) -> bool:
        return not (self.m11 or self.m12 or self.m21 or self.m22)


ZERO_KERNEL = SeparableKernelSpec()


def _diagonal_trace(pairs: tuple[KernelPair, ...], t: float) -> float:
    return sum(evaluate(p.x_factor, t) * evaluate(p.t_factor, t) for p in pairs)


def kernel_traces(kernel: SeparableKernelSpec, x: float) -> tuple[float, float]:
    """Integrals of the diagonal trace sum and antisymmetric difference.

    Returns (K, L) where K integrates M11(t,t)+M22(t,t) and L integrates
    M12(t,t)-M21(t,t) from 0 to x.  Diagonal products of two series are not
    series in the supported basis, so these go through adaptive quadrature
    (absolute error well under 1e-10).
    """
    if kernel.is_zero or x == 0.0:
        return 0.0, 0.0
    x = float(x)

    def k_integrand(t):
        return _diagonal_trace(kernel.m11, t) + _diagonal_trace(kernel.m22, t)

    def l_integrand(t):
        return _diagonal_trace(kernel.m12, t) - _diagonal_trace(kernel.m21, t)

    k_val = 0.0
    if kernel.m11 or kernel.m22:
        k_val, _ = quad(k_integrand, 0.0, x, epsabs=TRACE_QUAD_TOL, epsrel=TRACE_QUAD_TOL, limit=200)
    l_val = 0.0
    if kernel.m12 or kernel.m21:
        l_val, _ = quad(l_integrand, 0.0, x, epsabs=TRACE_QUAD_TOL, epsrel=TRACE_QUAD_TOL, limit=200)
    return float(k_val), float(l_val)


def kernel_diagonal_difference(kernel: SeparableKernelSpec, xs: np.ndarray) -> np.ndarray:
    """M12(x,x) - M21(x,x) on an array of points (the derivative of L)."""
    out = np.zeros_like(xs, dtype=float)
    for p in kernel.m12:
        out += evaluate_array(p.x_factor, xs) * evaluate_array(p.t_factor, xs)
    for p in kernel.m21:
        out -= evaluate_array(p.x_factor, xs) * evaluate_array(p.t_factor, xs)
    return out


MIN_GRID_POINTS = 64


@dataclass(frozen=True)
class ProblemSpec:
    """Full boundary value problem on [0, pi]."""

    v: FunctionSpec
    m: float
    kernel: SeparableKernelSpec
    alpha: float
    beta: float
    grid_points: int

    def __post_init__(self):
        _require_finite(self.m, "m")
        _require_finite(self.alpha, "alpha")
        _require_finite(self.beta, "beta")
        if isinstance(self.grid_points, bool) or not isinstance(self.grid_points, int):
            raise InvalidValue("gridPoints", f"expected an integer, got {self.grid_points!r}")
        if self.grid_points < MIN_GRID_POINTS:
            raise InvalidValue("gridPoints", f"must be >= {MIN_GRID_POINTS}, got {self.grid_points}")


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values on a uniform grid: x_i = grid_start + i*grid_step."""

    grid_start: float
    grid_step: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if self.grid_step <= 0:
            raise InvalidValue("gridStep", f"must be positive, got {self.grid_step}")
        if values.ndim != 1 or len(values) < 2:
            raise InvalidValue("values", "need at least two samples")
        if not np.all(np.isfinite(values)):
            raise InvalidValue("values", "samples must be finite")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def x(self) -> np.ndarray:
        return self.grid_start + self.grid_step * np.arange(len(self.values))


# ---------------------------------------------------------------------------
# Config parsing (JSON schema described in the README)
# ---------------------------------------------------------------------------

_TOP_KEYS = {"V", "m", "kernel", "alpha", "beta", "gridPoints"}
_TERM_KEYS = {"kind", "coeff", "k"}
_KERNEL_KEYS = {"M11", "M12", "M21", "M22"}
_PAIR_KEYS = {"x", "t"}
_KIND_ALIASES = {"power": "power", "cos": "cos", "sin": "sin"}


def _parse_term(obj, path: str) -> Term:
    if not isinstance(obj, dict):
        raise InvalidValue(path, "term must be an object")
    unknown = set(obj) - _TERM_KEYS
    if unknown:
        raise InvalidValue(f"{path}.{sorted(unknown)[0]}", "unknown field")
    for key in _TERM_KEYS:
        if key not in obj:
            raise InvalidValue(f"{path}.{key}", "missing field")
    kind = obj["kind"]
    if kind not in _KIND_ALIASES:
        raise InvalidValue(f"{path}.kind", f"must be one of {sorted(_KIND_ALIASES)}, got {kind!r}")
    coeff = _require_finite(obj["coeff"], f"{path}.coeff")
    k = obj["k"]
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise InvalidValue(f"{path}.k", f"must be a non-negative integer, got {k!r}")
    return Term(_KIND_ALIASES[kind], coeff, k)


def _parse_series(obj, path: str) -> FunctionSpec:
    if not isinstance(obj, list):
        raise InvalidValue(path, "series must be a list of terms")
    return FunctionSpec(tuple(_parse_term(t, f"{path}[{i}]") for i, t in enumerate(obj)))


def _parse_pairs(obj, path: str) -> tuple[KernelPair, ...]:
    if not isinstance(obj, list):
        raise InvalidValue(path, "kernel entry must be a list of separable pairs")
    pairs = []
    for i, p in enumerate(obj):
        ppath = f"{path}[{i}]"
        if not isinstance(p, dict):
            raise InvalidValue(ppath, "separable pair must be an object")
        unknown = set(p) - _PAIR_KEYS
        if unknown:
            raise InvalidValue(f"{ppath}.{sorted(unknown)[0]}", "unknown field")
        for key in _PAIR_KEYS:
            if key not in p:
                raise InvalidValue(f"{ppath}.{key}", "missing field")
        pairs.append(KernelPair(_parse_series(p["x"], f"{ppath}.x"),
                                _parse_series(p["t"], f"{ppath}.t")))
    return tuple(pairs)


def parse_problem(config_text: bytes | str) -> ProblemSpec:
    """Parse and validate a problem config document.

    Raises MalformedConfig on JSON syntax errors and InvalidValue (with the
    offending field path) on schema or invariant violations.  V and kernel
    default to zero when omitted; m, alpha, beta, gridPoints are required.
    """
    if isinstance(config_text, bytes):
        config_text = config_text.decode("utf-8", errors="strict")
    try:
        doc = json.loads(config_text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedConfig(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidValue("$", "top-level config must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise InvalidValue(sorted(unknown)[0], "unknown field")
    for key in ("m", "alpha", "beta", "gridPoints"):
        if key not in doc:
            raise InvalidValue(key, "missing field")

    v = _parse_series(doc["V"], "V") if "V" in doc else ZERO_FUNCTION
    kernel = ZERO_KERNEL
    if "kernel" in doc:
        kobj = doc["kernel"]
        if not isinstance(kobj, dict):
            raise InvalidValue("kernel", "must be an object")
        unknown = set(kobj) - _KERNEL_KEYS
        if unknown:
            raise InvalidValue(f"kernel.{sorted(unknown)[0]}", "unknown field")
        kernel = SeparableKernelSpec(
            m11=_parse_pairs(kobj.get("M11", []), "kernel.M11"),
            m12=_parse_pairs(kobj.get("M12", []), "kernel.M12"),
            m21=_parse_pairs(kobj.get("M21", []), "kernel.M21"),
            m22=_parse_pairs(kobj.get("M22", []), "kernel.M22"),
        )

    m = _require_finite(doc["m"], "m")
    alpha = _require_finite(doc["alpha"], "alpha")
    beta = _require_finite(doc["beta"], "beta")
    grid_points = doc["gridPoints"]
    if isinstance(grid_points, bool) or not isinstance(grid_points, int):
        raise InvalidValue("gridPoints", f"expected an integer, got {grid_points!r}")
    return ProblemSpec(v=v, m=m, kernel=kernel, alpha=alpha, beta=beta, grid_points=grid_points)


def _term_doc(t: Term) -> dict:
    return {"kind": t.kind, "coeff": t.coeff, "k": t.k}


def _series_doc(f: FunctionSpec) -> list:
    return [_term_doc(t) for t in f.terms]


def _pairs_doc(pairs: tuple[KernelPair, ...]) -> list:
    return [{"x": _series_doc(p.x_factor), "t": _series_doc(p.t_factor)} for p in pairs]


def serialize_problem(p: ProblemSpec) -> str:
    """Inverse of :func:`parse_problem`; floats round-trip exactly."""
    doc = {
        "V": _series_doc(p.v),
        "m": p.m,
        "kernel": {
            "M11": _pairs_doc(p.kernel.m11),
            "M12": _pairs_doc(p.kernel.m12),
            "M21": _pairs_doc(p.kernel.m21),
            "M22": _pairs_doc(p.kernel.m22),
        },
        "alpha": p.alpha,
        "beta": p.beta,
        "gridPoints": p.grid_points,
    }
    return json.dumps(doc, indent=2, sort_keys=True)
