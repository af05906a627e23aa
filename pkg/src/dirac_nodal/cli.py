"""Command-line front end: reproducible forward solves, spectral tables,
inversion, round trips, and the built-in worked example.

Every command writes its data files atomically (temp + rename) plus a
RunReport JSON sibling (<out stem>.report.json) echoing resolved inputs, the
list of written files, and named metrics.  CSV cells carry shortest
round-trip float representations, fixed column order and LF line endings, so
reruns are byte-identical.

Exit codes: 0 success, 2 config/IO error, 3 forward-numerics failure,
4 inverse degeneracy, 5 acceptance failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import asymptotics, forward, inverse
from .errors import (BracketFailure, DegenerateAlpha, DiracNodalError, InvalidValue,
                     MalformedConfig, NoConvergence)
from .model import (FunctionSpec, KernelPair, ProblemSpec, SeparableKernelSpec, Term,
                    evaluate_array, kernel_diagonal_difference, parse_problem,
                    serialize_problem)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3
EXIT_DEGENERATE = 4
EXIT_ACCEPTANCE = 5

#: published targets and budgets for the built-in example (see README)
PAPER_EXAMPLE_TOLERANCES = {
    "v_sup_error": 0.05,
    "alpha_error": 0.01,
    "beta_error": 0.01,
    "m_error": 0.1,
    "lprime_sup_error": 0.15,
}


def paper_example_problem(grid_points: int = 2000) -> ProblemSpec:
    """The built-in worked example: V=cos x, m=1, M12=-cos x, alpha=beta=pi/4.

    Embedded as code rather than a config file so the fixture cannot drift.
    """
    return ProblemSpec(
        v=FunctionSpec((Term("cos", 1.0, 1),)),
        m=1.0,
        kernel=SeparableKernelSpec(
            m12=(KernelPair(x_factor=FunctionSpec((Term("cos", -1.0, 1),)),
                            t_factor=FunctionSpec((Term("power", 1.0, 0),))),)),
        alpha=math.pi / 4,
        beta=math.pi / 4,
        grid_points=grid_points,
    )


@dataclass
class RunReport:
    command: str
    inputs: dict
    outputs: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    def as_json(self) -> str:
        doc = {"command": self.command, "inputs": self.inputs,
               "outputs": self.outputs, "metrics": self.metrics}
        return json.dumps(doc, indent=2, sort_keys=True)


def _fmt(x) -> str:
    return repr(float(x))


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header: str, rows) -> str:
    lines = [header]
    lines.extend(",".join(str(c) for c in row) for row in rows)
    return "\n".join(lines) + "\n"


def _report_path(out: Path) -> Path:
    return out.with_suffix(".report.json")


def _finish(report: RunReport, out: Path) -> None:
    rpath = _report_path(out)
    report.outputs.append(str(rpath))
    _atomic_write(rpath, report.as_json() + "\n")


def _load_config(path: str) -> ProblemSpec:
    return parse_problem(Path(path).read_bytes())


def _config_echo(p: ProblemSpec) -> dict:
    return json.loads(serialize_problem(p))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_forward(config_path: str, lam: float, out_path: str) -> RunReport:
    p = _load_config(config_path)
    out = Path(out_path)
    t0 = time.perf_counter()
    traj = forward.solve(p, lam)
    residual = forward.integral_residual(p, traj)
    elapsed = time.perf_counter() - t0
    rows = [( _fmt(x), _fmt(y1), _fmt(y2))
            for x, y1, y2 in zip(traj.grid.values, traj.phi1, traj.phi2)]
    _atomic_write(out, _csv("x,phi1,phi2", rows))
    report = RunReport("forward",
                       {"config": _config_echo(p), "lambda": lam},
                       [str(out)],
                       {"integral_residual": residual, "runtime_s": elapsed})
    _finish(report, out)
    return report


def cmd_eig(config_path: str, n_min: int, n_max: int, out_path: str,
            scan_min: float | None = None, scan_max: float | None = None) -> RunReport:
    p = _load_config(config_path)
    out = Path(out_path)
    t0 = time.perf_counter()
    if scan_min is not None or scan_max is not None:
        if scan_min is None or scan_max is None:
            raise InvalidValue("scan", "both --scan-min and --scan-max are required")
        evs = forward.scan_eigenvalues(p, scan_min, scan_max)
        rows = [(ev.index, _fmt(ev.lam), _fmt(ev.residual), _fmt(ev.seed)) for ev in evs]
        _atomic_write(out, _csv("n,lambda,residual,seed", rows))
        inputs = {"config": _config_echo(p), "scanMin": scan_min, "scanMax": scan_max}
    else:
        evs = forward.find_eigenvalues(p, n_min, n_max)
        rows = []
        for ev in evs:
            asym = asymptotics.eigenvalue_asymptotic(p, ev.index)
            rows.append((ev.index, _fmt(ev.lam), _fmt(ev.residual), _fmt(ev.seed),
                         _fmt(asym), _fmt(ev.lam - asym)))
        _atomic_write(out, _csv("n,lambda,residual,seed,lambda_asym,diff", rows))
        inputs = {"config": _config_echo(p), "nMin": n_min, "nMax": n_max}
    elapsed = time.perf_counter() - t0
    metrics = {"count": float(len(evs)), "runtime_s": elapsed}
    if evs:
        metrics["max_residual"] = max(ev.residual for ev in evs)
    report = RunReport("eig", inputs, [str(out)], metrics)
    _finish(report, out)
    return report


def cmd_nodes(config_path: str, n_min: int, n_max: int, out_path: str) -> RunReport:
    p = _load_config(config_path)
    out = Path(out_path)
    t0 = time.perf_counter()
    evs = forward.find_eigenvalues(p, n_min, n_max)
    rows = []
    metrics = {}
    for ev in evs:
        ns = forward.find_nodes(p, ev)
        for j, x in enumerate(ns.nodes):
            rows.append((ns.index, j, _fmt(x)))
        metrics[f"count_{ns.index}"] = float(len(ns.nodes))
        if len(ns.nodes) > 1:
            spacing_dev = float(np.abs(np.diff(ns.nodes) - math.pi / ns.index).max())
            metrics[f"max_spacing_dev_{ns.index}"] = spacing_dev
    metrics["runtime_s"] = time.perf_counter() - t0
    _atomic_write(out, _csv("n,j,x", rows))
    report = RunReport("nodes", {"config": _config_echo(p), "nMin": n_min, "nMax": n_max},
                       [str(out)], metrics)
    _finish(report, out)
    return report


def _write_reconstruction(out: Path, recon: inverse.Reconstruction) -> list[str]:
    xs = recon.f.x
    rows = [(_fmt(x), _fmt(fv), _fmt(gv), _fmt(vv), _fmt(lp), _fmt(om))
            for x, fv, gv, vv, lp, om in zip(xs, recon.f.values, recon.g.values,
                                             recon.v.values, recon.lprime.values,
                                             recon.omega_hat.values)]
    csv_path = out.with_suffix(".csv")
    _atomic_write(csv_path, _csv("x,f,g,V,Lprime,omega", rows))
    summary = {
        "alpha": recon.alpha_hat,
        "beta": recon.beta_hat,
        "m": recon.m_hat,
        "diagnostics": {"f_error_max": recon.diagnostics["f_error_max"],
                        "g_error_max": recon.diagnostics["g_error_max"]},
    }
    _atomic_write(out, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return [str(out), str(csv_path)]


def cmd_invert(nodal_csv_path: str, options_path: str | None, out_path: str) -> RunReport:
    data = inverse.load_nodal_csv(Path(nodal_csv_path).read_text())
    opts = _load_options(options_path, data)
    out = Path(out_path)
    t0 = time.perf_counter()
    recon = inverse.reconstruct(data, opts)
    elapsed = time.perf_counter() - t0
    outputs = _write_reconstruction(out, recon)
    report = RunReport("invert",
                       {"nodalCsv": str(nodal_csv_path), "options": _options_echo(opts)},
                       outputs,
                       {"alpha": recon.alpha_hat, "beta": recon.beta_hat,
                        "m": recon.m_hat,
                        "f_error_max": recon.diagnostics["f_error_max"],
                        "g_error_max": recon.diagnostics["g_error_max"],
                        "runtime_s": elapsed})
    _finish(report, out)
    return report


def _options_echo(opts: inverse.InverseOptions) -> dict:
    return {"targetGridPoints": opts.target_grid_points,
            "nValues": list(opts.n_values),
            "extrapolationDepth": opts.extrapolation_depth,
            "smoothingWindow": opts.smoothing_window,
            "mKnown": opts.m_known,
            "degeneracyThreshold": opts.degeneracy_threshold}


_OPTION_KEYS = {"targetGridPoints", "nValues", "extrapolationDepth",
                "smoothingWindow", "mKnown", "degeneracyThreshold"}


def _load_options(path: str | None, data: inverse.NodalData,
                  **extra) -> inverse.InverseOptions:
    doc = {}
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise MalformedConfig(f"options file is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise InvalidValue("$", "options document must be a JSON object")
        unknown = set(doc) - _OPTION_KEYS
        if unknown:
            raise InvalidValue(sorted(unknown)[0], "unknown field")
    kwargs = dict(extra)
    if "targetGridPoints" in doc:
        kwargs["target_grid_points"] = doc["targetGridPoints"]
    if "nValues" in doc:
        kwargs["n_values"] = tuple(doc["nValues"])
    if "extrapolationDepth" in doc:
        kwargs["extrapolation_depth"] = doc["extrapolationDepth"]
    if "smoothingWindow" in doc:
        kwargs["smoothing_window"] = doc["smoothingWindow"]
    if doc.get("mKnown") is not None:
        kwargs["m_known"] = float(doc["mKnown"])
    if "degeneracyThreshold" in doc:
        kwargs["degeneracy_threshold"] = doc["degeneracyThreshold"]
    opts = inverse.InverseOptions.defaults_for(data, **kwargs)
    opts.check_against(data)
    return opts


def roundtrip_levels(n_max: int) -> list[int]:
    """Geometric level ladder n_max, n/2, n/4, n/8 (floored at 5)."""
    if n_max < 20:
        raise InvalidValue("nMax", "round trips need nMax >= 20 for three usable levels")
    levels = sorted({n_max, max(5, n_max // 2), max(5, n_max // 4), max(5, n_max // 8)})
    return levels


def _forward_nodal_data(p: ProblemSpec, levels: list[int]) -> inverse.NodalData:
    sets = []
    for n in levels:
        ev = forward.find_eigenvalues(p, n, n)[0]
        sets.append(forward.find_nodes(p, ev))
    return inverse.NodalData.from_nodal_sets(sets)


def _roundtrip_metrics(p: ProblemSpec, recon: inverse.Reconstruction) -> dict:
    xs = recon.v.x
    window = (xs >= 0.1 * math.pi) & (xs <= 0.9 * math.pi)
    v_true = evaluate_array(p.v, xs)
    lp_true = kernel_diagonal_difference(p.kernel, xs)
    return {
        "v_sup_error": float(np.abs(recon.v.values - v_true)[window].max()),
        "lprime_sup_error": float(np.abs(recon.lprime.values - lp_true)[window].max()),
        "alpha_error": abs(recon.alpha_hat - p.alpha),
        "beta_error": abs(recon.beta_hat - p.beta),
        "m_error": abs(recon.m_hat - p.m),
    }


def cmd_roundtrip(config_path: str, n_max: int, options_path: str | None,
                  out_path: str) -> RunReport:
    p = _load_config(config_path)
    out = Path(out_path)
    t0 = time.perf_counter()
    levels = roundtrip_levels(n_max)
    data = _forward_nodal_data(p, levels)
    opts = _load_options(options_path, data, n_values=tuple(levels))
    recon = inverse.reconstruct(data, opts)
    metrics = _roundtrip_metrics(p, recon)
    metrics["runtime_s"] = time.perf_counter() - t0
    outputs = _write_reconstruction(out, recon)
    report = RunReport("roundtrip",
                       {"config": _config_echo(p), "nMax": n_max,
                        "options": _options_echo(opts)},
                       outputs, metrics)
    _finish(report, out)
    return report


def cmd_paper_example(out_path: str, n_max: int = 200) -> tuple[RunReport, bool]:
    """Built-in example end to end; returns (report, all_within_tolerance)."""
    p = paper_example_problem()
    out = Path(out_path)
    t0 = time.perf_counter()
    levels = roundtrip_levels(n_max)
    data = _forward_nodal_data(p, levels)
    opts = inverse.InverseOptions(n_values=tuple(levels))
    recon = inverse.reconstruct(data, opts)
    metrics = _roundtrip_metrics(p, recon)
    metrics["runtime_s"] = time.perf_counter() - t0
    outputs = _write_reconstruction(out, recon)

    ok = True
    lines = [f"{'quantity':<12}{'published':>12}{'estimate':>16}{'error':>12}{'budget':>10}  verdict"]
    published = {"alpha": math.pi / 4, "beta": math.pi / 4, "m": 1.0}
    estimates = {"alpha": recon.alpha_hat, "beta": recon.beta_hat, "m": recon.m_hat}
    for name in ("alpha", "beta", "m"):
        err = metrics[f"{name}_error"]
        budget = PAPER_EXAMPLE_TOLERANCES[f"{name}_error"]
        good = err <= budget
        ok &= good
        lines.append(f"{name:<12}{published[name]:>12.7f}{estimates[name]:>16.7f}"
                     f"{err:>12.2e}{budget:>10.2g}  {'PASS' if good else 'FAIL'}")
    for name, label in (("v_sup_error", "V (sup)"), ("lprime_sup_error", "L' (sup)")):
        err = metrics[name]
        budget = PAPER_EXAMPLE_TOLERANCES[name]
        good = err <= budget
        ok &= good
        lines.append(f"{label:<12}{'--':>12}{'--':>16}{err:>12.2e}{budget:>10.2g}"
                     f"  {'PASS' if good else 'FAIL'}")
    print("\n".join(lines))
    metrics["all_within_tolerance"] = float(ok)
    report = RunReport("paper-example", {"nMax": n_max, "config": _config_echo(p)},
                       outputs, metrics)
    _finish(report, out)
    return report, ok


def cmd_asym_check(config_path: str | None, n_min: int, n_max: int,
                   out_path: str) -> RunReport:
    p = _load_config(config_path) if config_path else paper_example_problem()
    out = Path(out_path)
    t0 = time.perf_counter()
    evs = forward.find_eigenvalues(p, n_min, n_max)
    eig_rows = []
    for ev in evs:
        asym = asymptotics.eigenvalue_asymptotic(p, ev.index)
        diff = ev.lam - asym
        eig_rows.append((ev.index, _fmt(ev.lam), _fmt(asym), _fmt(diff),
                         _fmt(ev.index * diff)))
    _atomic_write(out, _csv("n,lambda_solver,lambda_asym,diff,n_times_diff", eig_rows))

    node_rows = []
    top = evs[-1]
    ns = forward.find_nodes(p, top)
    for j, x in enumerate(ns.nodes):
        an = asymptotics.node_asymptotic(p, top.index, j)
        node_rows.append((top.index, j, _fmt(x), _fmt(an.x),
                          _fmt(top.index**2 * abs(x - an.x))))
    nodes_path = out.with_name(out.stem + "_nodes" + (out.suffix or ".csv"))
    _atomic_write(nodes_path, _csv("n,j,x_solver,x_asym,n2_times_diff", node_rows))

    metrics = {"runtime_s": time.perf_counter() - t0,
               "max_n_times_diff": max((abs(ev.index * (ev.lam - asymptotics.eigenvalue_asymptotic(p, ev.index)))
                                        for ev in evs), default=0.0)}
    report = RunReport("asym-check",
                       {"config": _config_echo(p), "nMin": n_min, "nMax": n_max},
                       [str(out), str(nodes_path)], metrics)
    _finish(report, out)
    return report


# ---------------------------------------------------------------------------
# argument parsing / dispatch
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dirac-nodal",
                                 description="Forward and inverse nodal computations "
                                             "for a Dirac system with a memory term.")
    sub = ap.add_subparsers(dest="command", required=True)

    fw = sub.add_parser("forward", help="integrate a trajectory at fixed lambda")
    fw.add_argument("--config", required=True)
    fw.add_argument("--lambda", dest="lam", type=float, required=True)
    fw.add_argument("--out", required=True)

    eig = sub.add_parser("eig", help="eigenvalue table with asymptotic comparison")
    eig.add_argument("--config", required=True)
    eig.add_argument("--n-min", type=int, default=1)
    eig.add_argument("--n-max", type=int, default=10)
    eig.add_argument("--scan-min", type=float, default=None,
                     help="dense-scan mode: lower end of the lambda interval")
    eig.add_argument("--scan-max", type=float, default=None)
    eig.add_argument("--out", required=True)

    nd = sub.add_parser("nodes", help="nodal points for a range of indices")
    nd.add_argument("--config", required=True)
    nd.add_argument("--n-min", type=int, default=1)
    nd.add_argument("--n-max", type=int, default=10)
    nd.add_argument("--out", required=True)

    inv = sub.add_parser("invert", help="reconstruct coefficients from a nodal CSV")
    inv.add_argument("--nodes", required=True, help="nodal CSV (n,j,x)")
    inv.add_argument("--options", default=None)
    inv.add_argument("--out", required=True)

    rt = sub.add_parser("roundtrip", help="forward -> nodes -> invert -> compare")
    rt.add_argument("--config", required=True)
    rt.add_argument("--n-max", type=int, default=200)
    rt.add_argument("--options", default=None)
    rt.add_argument("--out", required=True)

    ac = sub.add_parser("asym-check", help="solver vs asymptotics comparison tables")
    ac.add_argument("--config", default=None, help="defaults to the built-in example")
    ac.add_argument("--n-min", type=int, default=10)
    ac.add_argument("--n-max", type=int, default=50)
    ac.add_argument("--out", required=True)

    pe = sub.add_parser("paper-example", help="built-in example vs published values")
    pe.add_argument("--n-max", type=int, default=200)
    pe.add_argument("--out", required=True)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "forward":
            cmd_forward(args.config, args.lam, args.out)
        elif args.command == "eig":
            cmd_eig(args.config, args.n_min, args.n_max, args.out,
                    args.scan_min, args.scan_max)
        elif args.command == "nodes":
            cmd_nodes(args.config, args.n_min, args.n_max, args.out)
        elif args.command == "invert":
            cmd_invert(args.nodes, args.options, args.out)
        elif args.command == "roundtrip":
            cmd_roundtrip(args.config, args.n_max, args.options, args.out)
        elif args.command == "asym-check":
            cmd_asym_check(args.config, args.n_min, args.n_max, args.out)
        elif args.command == "paper-example":
            _, ok = cmd_paper_example(args.out, args.n_max)
            if not ok:
                return EXIT_ACCEPTANCE
    except (MalformedConfig, InvalidValue, OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BracketFailure, NoConvergence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except DegenerateAlpha as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except DiracNodalError as exc:  # any other package error is a numerics failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
