"""Command-line front end.

    friable compute --fn psi --x 30 --y 5
    friable table   --fn v,w --x 10:1000:20log --y 7,13
    friable verify  --suite thm1eq1_star --x 10:100000:40log --y 5,13,101 --tol 1e-6
    friable audit   --bound rh --y 100000 --x 10:1000000:50log

Exit codes: 0 pass, 1 identity or bound failure, 2 usage, 3 domain error,
4 inconclusive (errored points or a budget above the tolerance).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import fields

import numpy as np

from . import __version__, approx, bounds, error_terms as et, identities
from .config import Limits, load_config_file
from .context import Context
from .exceptions import DomainError, FriableError
from .grids import Grid, parse_ints, parse_values

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4

U_FUNCTIONS = ("rho", "rho_prime", "omega")
FUNCTIONS = ("psi", "phi", "rho", "rho_prime", "omega", "mu", "lambda", "v", "v_star", "w",
             "delta", "q", "q_star", "r", "r_star", "pi_product")
DEFAULT_TOL = {"thm1eq1": 1e-6, "thm1eq1_star": 1e-6, "eqvar2": 1e-6, "thm1eq2": 1e-5,
               "thm1eq2_star": 1e-5, "lemma_sum": 1e-7, "lemma_integral": 1e-6,
               "factorization": 0.0, "mobius": 1e-8, "convolution297": 1e-9,
               "beta_integral": 1e-5, "all": 1e-5}
BOUND_KINDS = ("unconditional", "rh", "trivial", "corexact", "corexact2")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

def fmt(value) -> str:
    """Shortest round-trip text, capped at 15 significant digits."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if not math.isfinite(v):
        return str(v)
    short = repr(v)
    mantissa = short.split("e")[0].replace("-", "").replace(".", "").lstrip("0")
    return short if len(mantissa) <= 15 else f"{v:.15g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _metadata(args) -> dict:
    meta = {"version": __version__}
    if not args.no_timestamp:
        meta["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return meta


def _write(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, int, np.number)) and not isinstance(v, bool)
                    else ("" if v is None else v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

def _context(args) -> Context:
    overrides = {}
    if args.config:
        try:
            raw = load_config_file(args.config)
        except (OSError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
        known = {f.name: f for f in fields(Limits)}
        for key, val in raw.items():
            if key in known:
                kind = int if isinstance(getattr(Limits(), key), int) else float
                overrides[key] = kind(float(val))
            elif key == "tol":
                if getattr(args, "tol", None) is None:
                    args.tol = float(val)
            else:
                raise UsageError(f"unknown config key {key!r}")
    return Context(Limits.from_env(**overrides))


def _xs(args, name="x") -> list[float]:
    spec = getattr(args, name, None)
    if spec is None:
        raise UsageError(f"--{name} is required")
    try:
        return parse_values(spec)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _ys(args) -> list[int]:
    if args.y is None:
        raise UsageError("--y is required")
    try:
        return parse_ints(args.y)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# compute / table
# ---------------------------------------------------------------------------

def evaluate(fn: str, x: float | None, y: int | None, ctx: Context):
    """Value of ``fn`` at (x, y); u-only functions take their argument in ``x``."""
    if fn in U_FUNCTIONS:
        return float(getattr(ctx.tables, fn)(x))
    if fn == "pi_product":
        return ctx.mertens(y).pi_y
    if fn == "mu":
        return float(ctx.mu_table(y)(x))
    if y is None:
        raise UsageError(f"--y is required for {fn}")
    table = {
        "psi": lambda: et.psi(x, y, ctx),
        "phi": lambda: et.phi(x, y, ctx),
        "lambda": lambda: approx.lambda_approx(x, y, ctx),
        "v": lambda: approx.v_approx(x, y, ctx),
        "v_star": lambda: approx.v_star_approx(x, y, ctx),
        "w": lambda: approx.w_approx(x, y, ctx),
        "delta": lambda: et.delta(x, y, ctx),
        "q": lambda: et.q_error(x, y, ctx),
        "q_star": lambda: et.q_star_error(x, y, ctx),
        "r": lambda: et.r_error(x, y, ctx),
        "r_star": lambda: et.r_star_error(x, y, ctx),
    }
    return table[fn]()


def _table_rows(fns, args, ctx):
    u_only = all(f in U_FUNCTIONS for f in fns)
    if u_only:
        us = _xs(args, "u") if args.u is not None else _xs(args)
        return [(None, None, u, *[evaluate(f, u, None, ctx) for f in fns]) for u in us]
    if any(f in U_FUNCTIONS for f in fns):
        raise UsageError("u-only functions cannot share a table with (x, y) functions")
    ys = _ys(args)
    if all(f == "pi_product" for f in fns):
        return [(None, y, None, ctx.mertens(y).pi_y) for y in ys]
    xs = _xs(args, "u") if all(f == "mu" for f in fns) and args.u is not None else _xs(args)
    rows = []
    for x in xs:
        for y in ys:
            u = x if fns == ["mu"] else (math.log(x) / math.log(y) if x > 0 else None)
            rows.append((x, y, u, *[evaluate(f, x, y, ctx) for f in fns]))
    return rows


def _parse_fns(spec: str) -> list[str]:
    fns = [f.strip() for f in spec.split(",") if f.strip()]
    bad = [f for f in fns if f not in FUNCTIONS]
    if not fns or bad:
        raise UsageError(f"unknown function(s) {bad or spec!r}; choose from {', '.join(FUNCTIONS)}")
    return fns


def cmd_compute(args) -> int:
    fns = _parse_fns(args.fn)
    ctx = _context(args)
    single_u = args.u is not None and "," not in args.u and ":" not in args.u
    single_x = args.x is not None and "," not in args.x and ":" not in args.x
    single_y = args.y is None or ("," not in args.y and ":" not in args.y)
    if len(fns) == 1 and single_y and (single_u or single_x or fns[0] == "pi_product"):
        fn = fns[0]
        y = _ys(args)[0] if args.y is not None else None
        if fn in U_FUNCTIONS or fn == "mu":
            arg = float(args.u) if args.u is not None else (float(args.x) if args.x else None)
            if arg is None:
                raise UsageError(f"--u is required for {fn}")
        else:
            arg = float(args.x) if args.x is not None else None
            if arg is None and fn != "pi_product":
                raise UsageError(f"--x is required for {fn}")
        if fn not in U_FUNCTIONS and y is None:
            raise UsageError(f"--y is required for {fn}")
        _write(fmt(evaluate(fn, arg, y, ctx)) + "\n", args.out)
        return EXIT_PASS
    return cmd_table(args, fns, ctx)


def cmd_table(args, fns=None, ctx=None) -> int:
    fns = fns or _parse_fns(args.fn)
    ctx = ctx or _context(args)
    rows = _table_rows(fns, args, ctx)
    if not rows:
        raise UsageError("empty grid")
    header = ["x", "y", "u"] + (["value"] if len(fns) == 1 else fns)
    _write(_csv(header, rows), args.out)
    return EXIT_PASS


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _suite_grid(args) -> Grid:
    suite = args.suite
    if suite == "beta_integral":
        return Grid.make((), _ys(args), "")
    if suite == "convolution297":
        spec = args.u or args.x or identities.DEFAULT_U_SPEC
        vals = parse_values(spec)
        return Grid.make(vals, (), spec)
    if args.x_max is not None:
        if args.x is not None:
            raise UsageError("give either --x or --x-max")
        x_max = int(args.x_max)
        if suite == "factorization":
            return Grid.make([x_max], _ys(args), f"1..{x_max}")
        return Grid.make(range(1, x_max + 1), _ys(args), f"1:{x_max}:{x_max}lin")
    return Grid.make(_xs(args), _ys(args), args.x)


def cmd_verify(args) -> int:
    ctx = _context(args)
    tol = args.tol if args.tol is not None else DEFAULT_TOL[args.suite]
    grid = _suite_grid(args)
    options = {}
    if args.suite == "thm1eq2":
        options = {"x_cap": args.x_cap, "tail": args.tail}
    if args.suite == "beta_integral" and args.v_max is not None:
        options = {"v_max": args.v_max}
    report = identities.run_suite(args.suite, grid, tol, ctx, workers=args.workers, **options)
    out = report.summary()
    out["errors"] = report.errors[:20]
    out["trivial_bounds"] = {"checked": ctx.monitor.checked,
                             "violations": len(ctx.monitor.violations)}
    out["metadata"] = _metadata(args)
    _write(json.dumps(_jsonable(out), indent=2) + "\n", args.out)
    if ctx.monitor.violations:
        return EXIT_FAIL
    return {"pass": EXIT_PASS, "fail": EXIT_FAIL}.get(report.status, EXIT_INCONCLUSIVE)


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------

def _audit_rows_csv(rows) -> str:
    return _csv(["x", "y", "observed", "bound", "margin", "trivial_flag"],
                [(r.x, r.y, r.observed, r.bound, r.margin, "1" if r.trivial else "0")
                 for r in rows])


def cmd_audit(args) -> int:
    ctx = _context(args)
    ys = _ys(args)
    kind = args.bound
    rows, summary, code = [], {"bound": kind, "y_list": ys}, EXIT_PASS
    if kind in ("unconditional", "rh", "trivial"):
        for y in ys:
            xs = _xs(args)
            if kind == "trivial":
                for x in xs:
                    flags = bounds.trivial_bounds_check(x, y, ctx)
                    if not flags.all_hold:
                        code = EXIT_FAIL
                rows += bounds.audit_delta("trivial", y, xs, ctx)
            else:
                rows += bounds.audit_delta(kind, y, xs, ctx)
        summary["label"] = ("observation (conditional bound)" if kind == "rh"
                            else "arithmetic bound" if kind == "unconditional"
                            else "trivial bounds")
        summary["all_within_bound"] = all(r.holds() for r in rows)
        if kind == "trivial" and not summary["all_within_bound"]:
            code = EXIT_FAIL
    else:
        if args.X is None:
            raise UsageError("--X is required for implication audits")
        statuses = []
        for y in ys:
            if kind == "corexact":
                rep = bounds.propagate_corexact(args.f, args.X, y, args.starred, ctx)
            else:
                rep = bounds.propagate_corexact2(args.f, args.X, y, ctx)
            rows += rep.rows
            statuses.append(rep.status)
            summary.setdefault("reports", []).append(
                {"y": y, "kind": rep.kind, "f": rep.f, "self_calibrated": rep.self_calibrated,
                 "status": rep.status, "min_conclusion_margin": rep.min_margin, **rep.extra})
        if "fail" in statuses:
            code = EXIT_FAIL
        elif "hypothesis-violated" in statuses:
            code = EXIT_INCONCLUSIVE
    summary["n_rows"] = len(rows)
    summary["min_margin"] = min((r.margin for r in rows), default=None)
    summary["metadata"] = _metadata(args)
    _write(_audit_rows_csv(rows), args.out)
    text = json.dumps(_jsonable(summary), indent=2) + "\n"
    if args.summary:
        _write(text, args.summary)
    else:
        sys.stderr.write(text)
    return code


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file with resource caps and 'tol'")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp from JSON metadata")
    common.add_argument("--workers", type=int, default=1, help="threads for grid evaluation")

    p = argparse.ArgumentParser(prog="friable", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    for name in ("compute", "table"):
        c = sub.add_parser(name, parents=[common])
        c.add_argument("--fn", required=True, help=f"one or more of {', '.join(FUNCTIONS)}")
        c.add_argument("--x", help="value, list a,b,c or range a:b:Nlin|Nlog")
        c.add_argument("--u", help="argument of rho, rho_prime, omega, mu")
        c.add_argument("--y", help="integer or list of integers")

    v = sub.add_parser("verify", parents=[common])
    v.add_argument("--suite", required=True, choices=identities.SUITES + ("all",))
    v.add_argument("--x")
    v.add_argument("--x-max", type=float)
    v.add_argument("--u", help="u grid for convolution297")
    v.add_argument("--y")
    v.add_argument("--tol", type=float)
    v.add_argument("--x-cap", type=float, default=identities.DEFAULT_X_CAP)
    v.add_argument("--tail", choices=("closed", "truncate"), default="closed")
    v.add_argument("--v-max", type=float)

    a = sub.add_parser("audit", parents=[common])
    a.add_argument("--bound", required=True, choices=BOUND_KINDS)
    a.add_argument("--y", required=True)
    a.add_argument("--x")
    a.add_argument("--X", type=float, help="upper end of the implication grid")
    a.add_argument("--f", type=float, help="f(y); default: self-calibrated")
    a.add_argument("--starred", action="store_true")
    a.add_argument("--summary", help="file for the JSON summary (default: stderr)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"compute": cmd_compute, "table": cmd_table, "verify": cmd_verify,
               "audit": cmd_audit}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"friable: error: {exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"friable: domain error: {exc}\n")
        return EXIT_DOMAIN
    except FriableError as exc:
        sys.stderr.write(f"friable: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
