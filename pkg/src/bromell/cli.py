"""Command-line front end.

Subcommands:
    solve        place a contour, run the quadrature, write solution + report
    pseudo       emit the pseudospectral grid, level curves and contours as CSV
    convergence  error-vs-N table for a doubling node schedule
    window       one contour for [t0, t1], evaluated at sample times

Configuration is a flat key=value text file (--config); command-line flags
override file values. Exit codes: 0 when the target accuracy was reached,
2 when the feasibility check rejects the tolerance, 1 on any error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import problems, pseudospectra
from .errors import BromellError
from .solver import (
    SolveOptions,
    plan_window,
    prepare_contour,
    solve,
    solve_at,
    write_errors_csv,
    write_report,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


def _parse_kv_params(text: str) -> dict:
    out = {}
    if not text:
        return out
    for piece in text.split(","):
        key, sep, value = piece.partition("=")
        if not sep or not key:
            raise ValueError(f"bad parameter '{piece}' (expected key=value)")
        out[key.strip()] = value.strip()
    return out


def build_problem(args) -> problems.LaplaceProblem:
    selector, _, param_text = (args.problem or "").partition(":")
    params = _parse_kv_params(param_text)
    if selector == "cd":
        return problems.canonical_cd_problem(
            d=float(params.get("d", 400.0)), n=int(params.get("n", 64))
        )
    if selector == "bs":
        return problems.black_scholes_problem(
            L=float(params.get("L", 0.0)),
            S=float(params.get("S", 200.0)),
            K=float(params.get("K", 80.0)),
            r=float(params.get("r", 0.06)),
            sigma=float(params.get("sigma", 0.05)),
            n=int(params.get("n", 200)),
        )
    if selector == "file":
        if not args.matrix:
            raise ValueError("--problem file requires --matrix")
        return problems.load_problem(args.matrix, args.u0)
    raise ValueError(
        f"unknown problem '{args.problem}' (use cd[:d=..,n=..], bs[:n=..,...] or file)"
    )


def build_options(args) -> SolveOptions:
    return SolveOptions(
        z_l=args.zl,
        z_r=args.zr,
        eps1=args.eps1,
        eps2=args.eps2,
        grid_pts=args.grid,
        n_max=args.nmax,
        validate=args.validate,
    )


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ValueError(f"missing required option(s): {', '.join('--' + n for n in missing)}")


def cmd_solve(args) -> int:
    _require(args, "t", "tol")
    problem = build_problem(args)
    report = solve(problem, args.t, args.tol, build_options(args))
    out = _out_dir(args)
    write_report(report, out / "report.txt")
    if not report.feasibility.passed:
        print(f"feasibility check failed: {report.feasibility}", file=sys.stderr)
        print("increase --tol or override the contour placement", file=sys.stderr)
        return EXIT_INFEASIBLE
    problems.save_vector(out / "solution.txt", np.real_if_close(report.solution))
    write_errors_csv(report, out / "errors.csv")
    print(
        f"N = {report.result.N}, model error = {report.result.est_error:.3e}"
        + (
            f", measured error = {report.reference_error:.3e}"
            if report.reference_error is not None
            else ""
        )
    )
    if not report.reached_tol:
        print(f"target accuracy {args.tol} not reached within --nmax", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_pseudo(args) -> int:
    _require(args, "t", "tol")
    problem = build_problem(args)
    prep = prepare_contour(problem, args.t, args.t, args.tol, build_options(args))
    out = _out_dir(args)
    pseudospectra.grid_to_csv(prep.grid, out / "grid.csv")
    pseudospectra.curve_to_csv(prep.c1, out / "curve_c1.csv")
    pseudospectra.curve_to_csv(prep.c2, out / "curve_c2.csv")
    pseudospectra.curve_to_csv(prep.critical, out / "curve_critical.csv")
    _points_to_csv(prep.inner.boundary_points(361), out / "gamma_plus.csv")
    _points_to_csv(prep.contour.arc_points(361), out / "gamma.csv")
    print(f"wrote grid and curves for box [{prep.z_l}, {prep.z_r}] to {out}")
    return EXIT_OK


def _points_to_csv(points, path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y"])
        for p in points:
            writer.writerow([f"{p.real:.16e}", f"{p.imag:.16e}"])


def cmd_convergence(args) -> int:
    _require(args, "t", "tol")
    problem = build_problem(args)
    report = solve(problem, args.t, args.tol, build_options(args))
    out = _out_dir(args)
    write_report(report, out / "report.txt")
    if not report.feasibility.passed:
        print(f"feasibility check failed: {report.feasibility}", file=sys.stderr)
        return EXIT_INFEASIBLE
    write_errors_csv(report, out / "errors.csv")
    for N, measured, model, b in report.errors_table:
        shown = "-" if measured is None else f"{measured:.3e}"
        print(f"N = {N:5d}  measured = {shown:>10}  model = {model:.3e}  B = {b:.3e}")
    return EXIT_OK if report.reached_tol else EXIT_ERROR


def cmd_window(args) -> int:
    _require(args, "t0", "t1", "tol")
    if not args.t0 < args.t1:
        raise ValueError("--t0 must be strictly smaller than --t1")
    problem = build_problem(args)
    plan = plan_window(problem, args.t0, args.t1, args.tol, build_options(args))
    if args.times:
        times = [float(v) for v in args.times.split(",")]
    else:
        times = list(np.geomspace(args.t0, args.t1, 5))
    out = _out_dir(args)
    rows = []
    all_reached = True
    for t in times:
        before = plan.cache.reuse_count
        rep = solve_at(plan, problem, t, args.tol, validate=args.validate, n_max=args.nmax)
        reused = plan.cache.reuse_count - before
        err = rep.reference_error if rep.reference_error is not None else rep.result.est_error
        rows.append((t, rep.truncation.c, rep.truncation.K, rep.result.N, err, reused))
        all_reached = all_reached and rep.reached_tol
    with open(out / "window.csv", "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "c_t", "K_t", "N_used", "error", "reused_solves"])
        for t, c_t, k_t, n_used, err, reused in rows:
            writer.writerow(
                [f"{t:.16e}", f"{c_t:.16e}", f"{k_t:.16e}", n_used, f"{err:.16e}", reused]
            )
    print(
        f"plan: a = {plan.contour.a:.4f}, grid width c = {plan.c_grid:.4f}, "
        f"{plan.n_nodes} nodes"
    )
    print(
        f"solves = {plan.cache.solve_count}, reused = {plan.cache.reuse_count} "
        f"(nodes x (times - 1) = {(plan.n_nodes - 1) * (len(times) - 1)})"
    )
    return EXIT_OK if all_reached else EXIT_ERROR


def _load_config(path) -> dict:
    values = {}
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            key, sep, value = text.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            values[key.strip()] = value.strip()
    return values


_CONFIG_TYPES = {
    "problem": str,
    "matrix": str,
    "u0": str,
    "t": float,
    "t0": float,
    "t1": float,
    "tol": float,
    "zl": float,
    "zr": float,
    "eps1": float,
    "eps2": float,
    "grid": int,
    "nmax": int,
    "validate": lambda v: v.lower() in ("1", "true", "yes"),
    "out": str,
    "times": str,
}


# Hard defaults, applied after the config file so that explicit flags win.
_DEFAULTS = {"eps1": 1e-9, "eps2": 1e-13, "grid": 100, "nmax": 1024, "validate": False}


def _apply_config(args, parser):
    if args.config:
        for key, raw in _load_config(args.config).items():
            if key not in _CONFIG_TYPES:
                parser.error(f"unknown config key '{key}'")
            # Flags win: only fill values the command line left unset.
            if getattr(args, key, None) is None:
                setattr(args, key, _CONFIG_TYPES[key](raw))
    for key, value in _DEFAULTS.items():
        if getattr(args, key) is None:
            setattr(args, key, value)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--problem", default=None, help="cd[:d=..,n=..], bs[:n=..,...] or file")
    p.add_argument("--matrix", default=None, help="operator file (coordinate text format)")
    p.add_argument("--u0", default=None, help="initial-state file, one value per line")
    p.add_argument("--t", type=float, default=None, help="evolution time")
    p.add_argument("--t0", type=float, default=None, help="window start time")
    p.add_argument("--t1", type=float, default=None, help="window end time")
    p.add_argument("--tol", type=float, default=None, help="target accuracy")
    p.add_argument("--zl", type=float, default=None, help="strip left edge / ellipse center")
    p.add_argument("--zr", type=float, default=None, help="strip right edge / right vertex")
    p.add_argument("--eps1", type=float, default=None, help="weighted level (default 1e-9)")
    p.add_argument("--eps2", type=float, default=None, help="plain level (default 1e-13)")
    p.add_argument("--grid", type=int, default=None, help="grid points per axis (default 100)")
    p.add_argument("--nmax", type=int, default=None, help="node-count cap (default 1024)")
    p.add_argument("--validate", action="store_true", default=None,
                   help="measure errors against the matrix-exponential reference")
    p.add_argument("--out", default=None, help="output directory (default: current)")
    p.add_argument("--times", default=None, help="comma-separated sample times (window)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bromell",
        description="Evolve u' = Au + b(t) by contour-quadrature Laplace inversion",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "solve": cmd_solve,
        "pseudo": cmd_pseudo,
        "convergence": cmd_convergence,
        "window": cmd_window,
    }
    for name in handlers:
        _add_common(sub.add_parser(name))
    args = parser.parse_args(argv)
    try:
        _apply_config(args, parser)
        if args.problem is None:
            raise ValueError("missing required option: --problem")
        return handlers[args.command](args)
    except BromellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
