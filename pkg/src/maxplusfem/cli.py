"""Command-line front end.

Subcommands ``solve``, ``compare-fm``, ``convergence``, ``project`` and
``bench-all``.  Parameters come from an optional flat ``key = value`` config
file (``--config``) and from flags; flags win.  A ``report.json`` written by
a previous run is also accepted as config, which replays that run.

Errors are reported as one JSON object on stderr, for example
``{"error": "unknown_case", "message": "..."}``, with a nonzero exit status.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time

import numpy as np

from . import bench, projections, solver
from .assembly import VARIANTS
from .bench import CaseParams, UnknownCase
from .problem import sample_lattice
from .tropical import default_workers, format_float

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3

# keys shared by config files and flags, with their parsers
_PARAM_KEYS = {
    "T": float, "delta": float, "dx": float, "a": float, "c": float, "c_test": float,
    "test_dx": float, "variant": str, "cutoff": float, "eval_step": float, "init_step": float,
}
_RUN_KEYS = {
    "case": str, "scale": str, "out": str, "history": None, "workers": int,
    "deltas": str, "dx_exponent": float, "t": float, "grid_step": float, "cases": str,
}


class CliError(Exception):
    def __init__(self, kind: str, message: str, status: int = EXIT_USAGE):
        super().__init__(message)
        self.kind = kind
        self.status = status


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def load_config(path) -> dict:
    """Parse a ``key = value`` file (``#`` comments) or a JSON report/config."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError("config_unreadable", str(exc)) from None
    if text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CliError("config_invalid", f"{path}: {exc}") from None
        obj = obj.get("config", obj)
        return {k.replace("-", "_"): v for k, v in obj.items() if v is not None}
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError("config_invalid", f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def _coerce(raw: dict) -> dict:
    out = {}
    for k, v in raw.items():
        if k in _PARAM_KEYS:
            parse = _PARAM_KEYS[k]
        elif k in _RUN_KEYS:
            parse = _RUN_KEYS[k]
        else:
            raise CliError("invalid_parameter", f"unknown key {k!r}")
        if k == "history":
            parse = _bool
        if v is None:
            continue
        try:
            out[k] = parse(v) if parse is not str else str(v)
        except (TypeError, ValueError):
            raise CliError("invalid_parameter", f"{k}={v!r} is not a valid value") from None
    return out


def _add_common(p: argparse.ArgumentParser, case_required=True):
    p.add_argument("--config", help="key = value file or a previous report.json")
    p.add_argument("--case", help="benchmark name, see bench-all for the list")
    p.add_argument("--scale", choices=("full", "desk"), help="parameter set (default full)")
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--workers", type=int, help="worker threads (default MFEM_THREADS or CPU count)")
    for k in _PARAM_KEYS:
        flag = "--" + k.replace("_", "-")
        if k == "variant":
            p.add_argument(flag, dest=k, choices=VARIANTS)
        elif k == "T":
            p.add_argument("--T", dest="T", type=float, help="horizon")
        else:
            p.add_argument(flag, dest=k, type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maxplusfem", description="Max-plus finite element solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one benchmark and write report.json, values_T.csv")
    _add_common(p)
    p.add_argument("--history", action="store_const", const=True,
                   help="also write coeffs_tNNNN.csv for every time step")

    p = sub.add_parser("compare-fm", help="Fleming-McEneaney vs limit-case recursion")
    _add_common(p)

    p = sub.add_parser("convergence", help="errors over a list of time steps")
    _add_common(p)
    p.add_argument("--deltas", help="comma-separated time steps")
    p.add_argument("--dx-exponent", dest="dx_exponent", type=float,
                   help="use dx = delta**e (default 2 for k_h/k_dual, 1.5 otherwise)")

    p = sub.add_parser("project", help="dump P_W v, P^-Z v and their composition")
    _add_common(p)
    p.add_argument("--t", type=float, help="time of the reference value function (default T)")
    p.add_argument("--grid-step", dest="grid_step", type=float,
                   help="sampling step of the projection grid (default dx/4)")

    p = sub.add_parser("bench-all", help="run every benchmark and write results.csv")
    _add_common(p)
    p.add_argument("--cases", help="comma-separated subset")
    return parser


def _settings(args: argparse.Namespace) -> dict:
    raw = load_config(args.config) if args.config else {}
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "command") and v is not None}
    merged = _coerce(raw)
    merged.update(_coerce(flags))
    return merged


def _case(settings):
    name = settings.get("case")
    if not name:
        raise CliError("invalid_parameter", "--case is required")
    try:
        return bench.get_case(name)
    except UnknownCase:
        raise CliError("unknown_case", f"unknown case {name!r}; known: {', '.join(sorted(bench.CASES))}") from None


def _params(settings) -> CaseParams:
    p = CaseParams(**{k: settings[k] for k in _PARAM_KEYS if k in settings})
    for k in ("T", "delta", "dx", "a", "c", "c_test", "test_dx", "cutoff", "eval_step", "init_step"):
        v = getattr(p, k)
        if v is not None and not v > 0:
            raise CliError("invalid_parameter", f"{k} must be positive")
    return p


def _outdir(settings) -> str:
    out = settings.get("out", ".")
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as exc:
        raise CliError("output_unwritable", str(exc), EXIT_IO) from None
    if not os.access(out, os.W_OK):
        raise CliError("output_unwritable", f"cannot write to {out}", EXIT_IO)
    return out


def _workers(settings):
    return settings.get("workers") or default_workers()


def _echo(case, settings, resolved: CaseParams) -> dict:
    """Config dict that replays the run."""
    cfg = {"case": case.name, "scale": settings.get("scale", "full")}
    cfg.update({k: v for k, v in resolved.__dict__.items() if v is not None})
    if isinstance(cfg.get("cutoff"), float) and math.isinf(cfg["cutoff"]):
        cfg.pop("cutoff")
    return cfg


def _dump(path, obj):
    with open(path, "w") as fh:
        json.dump(solver._jsonable(obj), fh, indent=2, sort_keys=True)


def _setup(case, settings):
    params = _params(settings)
    try:
        return case.setup(params, scale=settings.get("scale", "full"), workers=_workers(settings))
    except (ValueError, solver.ConfigurationError) as exc:
        raise CliError("invalid_parameter", str(exc)) from None


def cmd_solve(settings) -> int:
    case = _case(settings)
    out = _outdir(settings)
    s = _setup(case, settings)
    history = settings.get("history", False)
    t0 = time.perf_counter()
    try:
        rep = solver.run(s.problem, s.W, s.Z, s.cfg, s.grids, s.reference, keep_history=history)
    except solver.ConfigurationError as exc:
        raise CliError("invalid_parameter", str(exc)) from None
    rep.timings["total"] = time.perf_counter() - t0
    body = rep.to_dict()
    body["config"] = _echo(case, settings, s.params)
    body["command"] = "solve"
    _dump(os.path.join(out, "report.json"), body)
    rep.write_values_csv(os.path.join(out, "values_T.csv"))
    if history:
        for n, lam in enumerate(rep.history):
            with open(os.path.join(out, f"coeffs_t{n:04d}.csv"), "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["i", "value"])
                for i, v in enumerate(lam):
                    w.writerow([i, format_float(v)])
    print(json.dumps({"case": case.name, "linf_error": rep.linf_error,
                      "seconds": rep.timings["total"]}))
    return EXIT_OK


def cmd_compare(settings) -> int:
    case = _case(settings)
    out = _outdir(settings)
    s = _setup(case, settings)
    cmp = solver.compare_methods(s.problem, s.W, s.cfg, s.grids, s.reference)
    cols = ["t", "fm_linf_error", "mfem_linf_error", "ordering_violations", "max_violation"]
    with open(os.path.join(out, "comparison.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in cmp.rows():
            w.writerow([format_float(row[k]) if isinstance(row[k], float) else row[k] for k in cols])
    body = {
        "command": "compare-fm",
        "config": _echo(case, settings, s.params),
        "total_violations": cmp.total_violations,
        "fm_linf_error": cmp.fm_errors[-1],
        "mfem_linf_error": cmp.limit_errors[-1],
    }
    _dump(os.path.join(out, "report.json"), body)
    print(json.dumps({"case": case.name, "total_violations": cmp.total_violations}))
    return EXIT_OK


def _floats(text, name):
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise CliError("invalid_parameter", f"{name} must be comma-separated numbers") from None
    if not vals or any(not v > 0 for v in vals):
        raise CliError("invalid_parameter", f"{name} must list positive numbers")
    return vals


def cmd_convergence(settings) -> int:
    case = _case(settings)
    out = _outdir(settings)
    deltas = _floats(settings.get("deltas", "0.4,0.2,0.1,0.05"), "deltas")
    params = _params(settings)
    variant = params.variant or "k_tilde"
    rule = None
    if "dx_exponent" in settings:
        e = settings["dx_exponent"]
        rule = lambda d: d ** e  # noqa: E731
    extra = {k: v for k, v in params.__dict__.items()
             if v is not None and k not in ("delta", "dx", "variant", "T")}
    try:
        table = bench.convergence_study(case, deltas, rule, variant, T=params.T,
                                        workers=_workers(settings), **extra)
    except (ValueError, solver.ConfigurationError) as exc:
        raise CliError("invalid_parameter", str(exc)) from None
    table.write_csv(os.path.join(out, "convergence.csv"))
    cfg = {"case": case.name, "deltas": ",".join(repr(d) for d in deltas)}
    cfg.update({k: v for k, v in params.__dict__.items() if v is not None})
    if rule is not None:
        cfg["dx_exponent"] = settings["dx_exponent"]
    _dump(os.path.join(out, "report.json"), {"command": "convergence", "config": cfg,
                                              "slope": table.slope, "rows": table.rows})
    print(json.dumps({"case": case.name, "slope": table.slope}))
    return EXIT_OK


def cmd_project(settings) -> int:
    case = _case(settings)
    out = _outdir(settings)
    s = _setup(case, settings)
    t = settings.get("t", s.params.T)
    step = settings.get("grid_step", s.params.dx / 4)
    box = case.domain if case.domain.bounded else case.error_window
    pts = sample_lattice(box, step)
    v = projections.GridFunction.sample(lambda x: case.reference(x, t), pts)
    w = _workers(settings)
    pw = projections.project_primal(s.W, v, w)
    pz = projections.project_dual(s.Z, v, w)
    pi = projections.project_primal(s.W, pz, w)
    with open(os.path.join(out, "projections.csv"), "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow([f"x{k + 1}" for k in range(pts.shape[1])] + ["v", "P_W", "P_minus_Z", "Pi"])
        for m in range(pts.shape[0]):
            wr.writerow([format_float(c) for c in pts[m]]
                        + [format_float(a[m]) for a in (v.values, pw.values, pz.values, pi.values)])
    errs = {
        "primal_error": float(np.max(v.values - pw.values)),
        "dual_error": float(np.max(pz.values - v.values)),
        "combined_error": float(np.max(np.abs(pi.values - v.values))),
    }
    cfg = _echo(case, settings, s.params)
    cfg.update(t=t, grid_step=step)
    _dump(os.path.join(out, "report.json"), {"command": "project", "config": cfg, **errs})
    print(json.dumps({"case": case.name, **errs}))
    return EXIT_OK


def cmd_bench_all(settings) -> int:
    out = _outdir(settings)
    scale = settings.get("scale", "desk")
    names = [n.strip() for n in settings["cases"].split(",")] if "cases" in settings else list(bench.CASES)
    for n in names:
        _case({"case": n})
    rows = []
    for n in names:
        t0 = time.perf_counter()
        rep = bench.run_case(n, scale=scale, workers=_workers(settings))
        p = rep.parameters
        rows.append({"case": n, "delta": p["delta"], "dx": p["dx"], "a": p["a"], "c": p["c"],
                     "variant": p["variant"], "linf_error": rep.linf_error,
                     "seconds": time.perf_counter() - t0})
        print(json.dumps({"case": n, "linf_error": rep.linf_error}), flush=True)
    bench.write_results_csv(os.path.join(out, "results.csv"), rows)
    _dump(os.path.join(out, "report.json"), {"command": "bench-all", "config": {"scale": scale},
                                              "rows": rows})
    return EXIT_OK


_COMMANDS = {
    "solve": cmd_solve,
    "compare-fm": cmd_compare,
    "convergence": cmd_convergence,
    "project": cmd_project,
    "bench-all": cmd_bench_all,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = _settings(args)
        return _COMMANDS[args.command](settings)
    except CliError as exc:
        print(json.dumps({"error": exc.kind, "message": str(exc)}), file=sys.stderr)
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
