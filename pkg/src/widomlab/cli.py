"""Command line entry point: compute, sweep, verify, zeros, report."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import verify as V
from .errors import SetError, SolverError, UnsupportedFamily, WidomLabError
from .sets import (
    CircularArc,
    DiscretizationConfig,
    IntervalUnion,
    describe,
    discretize,
    from_json,
    to_json,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3

SUITE_DEGREES = {"bounds": "1..15", "asymptotics": "8,16,32", "zeros": "10,20,30"}


class InputError(Exception):
    pass


def _load_sets(path) -> list:
    try:
        obj = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    items = obj.get("sets", [obj]) if isinstance(obj, dict) else obj
    return [from_json(o) for o in items]


def _one_set(path):
    sets = _load_sets(path)
    if len(sets) != 1:
        raise InputError(f"{path} must describe exactly one set")
    return sets[0]


def _opts(args, suites=()) -> dict:
    return {"grid": args.grid, "quad_pts": None, "remez_tol": args.remez_tol,
            "complex_tol": args.tol, "weights": [], "suites": list(suites)}


def _write(text: str, out: str | None):
    if out:
        p = Path(out)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text)
    sys.stdout.write(text)


# ----------------------------------------------------------------------------
# subcommands


def cmd_compute(args) -> int:
    if args.degree < 1:
        raise InputError("degree must be >= 1")
    desc = _one_set(args.set)
    weight = V.weight_by_name(args.weight) if args.weight else None
    sol = V._solve(desc, args.degree, _opts(args), weight=weight)
    out = sol.to_json()
    out["set"] = to_json(desc)
    if weight is None:
        try:
            from .potential import potential_data

            cap = potential_data(desc).capacity
            out["capacity"] = cap
            out["widom_factor"] = sol.norm / cap ** args.degree
        except UnsupportedFamily:
            out["widom_factor"] = None
    _write(json.dumps(out, indent=1, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    desc = _one_set(args.set)
    degrees = V.parse_degrees(args.degrees)
    opts = _opts(args)
    jobs = [(0, to_json(desc), n, opts) for n in degrees]
    workers = V.CampaignConfig([desc], degrees, workers=args.workers).effective_workers()
    recs = V._run_jobs(jobs, workers)
    failed = [r for r in recs if r["error"]]
    if failed:
        for r in failed:
            print(f"n={r['n']}: {r['error']}", file=sys.stderr)
        return EXIT_SOLVER if any(r["error_kind"] == "solver" for r in failed) else EXIT_INPUT
    sid = describe(desc)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(V.CSV_COLUMNS)
    ok = True
    prev = None
    for r in recs:
        check, margin, flag = "widom", "", ""
        if isinstance(desc, CircularArc) and prev is not None and r["widom"] is not None:
            m = r["widom"] - prev + V.DEFAULT_TOLERANCES["arc_monotone"]
            check, margin, flag = "arc_monotone", repr(m), "true" if m >= 0 else "false"
            ok &= m >= 0
        prev = r["widom"]
        w.writerow([sid, r["n"], repr(r["norm"]), "" if r["capacity"] is None else repr(r["capacity"]),
                    "" if r["widom"] is None else repr(r["widom"]), check, margin, flag])
    _write(buf.getvalue(), args.out)
    if args.plot and all(r["widom"] is not None for r in recs):
        from .plotting import plot_widom

        limits = {"1 + cos(alpha/2)": 1 + math.cos(desc.alpha / 2)} if isinstance(desc, CircularArc) else None
        plot_widom({sid: ([r["n"] for r in recs], [r["widom"] for r in recs])}, args.plot, limits)
    return EXIT_OK if ok else EXIT_FAIL


def _campaign_for(args, suite: str) -> V.CampaignConfig:
    over = {"seed": args.seed, "workers": args.workers}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise InputError(f"no such file: {path}")
        cfg = V.CampaignConfig.load(path, **over)
    else:
        sets = []
        for p in args.set or []:
            sets.extend(_load_sets(p))
        obj = {"sets": [to_json(s) for s in sets], "seed": args.seed or 0}
        if args.family or not sets:
            obj["family"] = {"count": args.family or 10, "seed": args.seed or 0}
        cfg = V.CampaignConfig.from_dict(obj, workers=args.workers)
    degrees = args.degrees or (None if args.config else SUITE_DEGREES[suite])
    return replace(cfg, suites=(suite,), degrees=degrees or cfg.degrees, grid_points=args.grid,
                   complex_tol=args.tol, remez_tol=args.remez_tol,
                   weights=tuple(args.weight or cfg.weights), timings=args.timings or cfg.timings)


def cmd_verify(args) -> int:
    suites = V.SUITES if args.suite == "all" else (args.suite,)
    out_dir = Path(args.out) if args.out else None
    passed, solver_failed = True, False
    for suite in suites:
        cfg = _campaign_for(args, suite)
        rep = V.run_campaign(cfg)
        problems = V.audit(rep.results)
        if problems:
            raise RuntimeError("margin audit failed: " + "; ".join(problems[:3]))
        if out_dir is not None:
            rep.write(out_dir, suite, timings=cfg.timings)
        sys.stdout.write(rep.to_csv())
        counts = ", ".join(f"{k}={v}" for k, v in rep.counts().items())
        print(f"# suite {suite}: {counts}; solver calls {rep.solver_calls}", file=sys.stderr)
        passed &= rep.passed
        solver_failed |= rep.solver_failed
    if solver_failed:
        return EXIT_SOLVER
    return EXIT_OK if passed else EXIT_FAIL


def _boundary_curves(desc):
    if isinstance(desc, IntervalUnion):
        return [np.array([a, b], dtype=complex) for a, b in desc.intervals]
    grid = discretize(desc, DiscretizationConfig(1024))
    curves = []
    for k in range(grid.n_components):
        pts = grid.points[grid.component == k]
        if grid.is_closed(k):
            pts = np.append(pts, pts[:1])
        curves.append(pts)
    return curves


def cmd_zeros(args) -> int:
    from .zeros import zeros_of

    if args.degree < 1:
        raise InputError("degree must be >= 1")
    desc = _one_set(args.set)
    sol = V._solve(desc, args.degree, _opts(args))
    zm = zeros_of(sol)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im"])
    for re_, im_ in zm.to_csv_rows():
        w.writerow([repr(re_), repr(im_)])
    _write(buf.getvalue(), args.out)
    if args.svg:
        from .plotting import plot_zeros

        plot_zeros(zm.zeros, args.svg, _boundary_curves(desc), f"{describe(desc)}, n={args.degree}")
    return EXIT_OK


def cmd_report(args) -> int:
    from .plotting import plot_margins, plot_widom

    results = []
    for p in args.inputs:
        try:
            results.extend(V.load_results(p))
        except FileNotFoundError:
            raise InputError(f"no such file: {p}") from None
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputError(f"{p}: not a campaign report ({exc})") from None
    if not results:
        raise InputError("no results to report")
    problems = V.audit(results)
    rows = []
    for check in sorted({r.check for r in results}):
        mine = [r for r in results if r.check == check]
        margins = [r.margin for r in mine if not math.isnan(r.margin)]
        count = {s: sum(r.status == s for r in mine) for s in ("PASS", "FAIL", "UNSUPPORTED", "ERROR")}
        rows.append([check, len(mine), count["PASS"], count["FAIL"], count["UNSUPPORTED"],
                     count["ERROR"], repr(min(margins)) if margins else ""])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "results", "pass", "fail", "unsupported", "error", "min_margin"])
    w.writerows(rows)
    out = Path(args.out or "report")
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.csv").write_text(buf.getvalue())
    sys.stdout.write(buf.getvalue())
    fmt = args.format
    plot_margins(results, out / f"margins.{fmt}")
    series: dict = {}
    seen = set()
    for r in results:
        if r.widom is not None and (r.set_id, r.n) not in seen:
            seen.add((r.set_id, r.n))
            series.setdefault(r.set_id, ([], []))
            series[r.set_id][0].append(r.n)
            series[r.set_id][1].append(r.widom)
    if series:
        plot_widom(series, out / f"widom.{fmt}")
    for p in problems:
        print(f"audit: {p}", file=sys.stderr)
    if problems:
        return EXIT_FAIL
    return EXIT_OK if all(r.status in ("PASS", "UNSUPPORTED") for r in results) else EXIT_FAIL


# ----------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser):
    p.add_argument("--tol", type=float, default=1e-8, help="complex solver duality-gap tolerance")
    p.add_argument("--remez-tol", type=float, default=1e-10, help="Remez leveling tolerance")
    p.add_argument("--grid", type=int, default=512, help="boundary points per component")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output file (directory for verify/report)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="widomlab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="Chebyshev polynomial of one degree, as JSON")
    p.add_argument("--set", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--weight", choices=sorted(V.WEIGHTS), default=None)
    _common(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", help="norms and Widom factors over a degree range, as CSV")
    p.add_argument("--set", required=True)
    p.add_argument("--degrees", required=True, help="e.g. 1..40 or 2,4,8")
    p.add_argument("--plot", default=None, help="figure path (.svg or .png)")
    _common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run a verification campaign")
    p.add_argument("--suite", choices=(*V.SUITES, "all"), default="bounds")
    p.add_argument("--set", action="append", help="set JSON (repeatable)")
    p.add_argument("--config", default=None, help="campaign TOML or JSON")
    p.add_argument("--degrees", default=None)
    p.add_argument("--family", type=int, default=None, help="add this many random interval unions")
    p.add_argument("--weight", action="append", choices=sorted(V.WEIGHTS))
    p.add_argument("--timings", action="store_true", help="include runtimes in JSON")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("zeros", help="zeros of T_n as CSV")
    p.add_argument("--set", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--svg", default=None, help="scatter plot path")
    _common(p)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("report", help="summarise campaign JSON files and render figures")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--format", choices=("svg", "png"), default="svg")
    _common(p)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, SetError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except WidomLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
