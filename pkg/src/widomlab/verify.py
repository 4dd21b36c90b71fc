"""Verification campaigns: bounds, root asymptotics and zero checks over set families."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .cheb_complex import arc_grid, chebyshev_complex
from .cheb_real import build_period_set, chebyshev_real
from .errors import RankDeficiency, SolverError, UnsupportedFamily, WidomLabError
from .potential import (
    Weight,
    green_eval,
    potential_data,
    solve_finite_gap,
    szego_value,
)
from .sets import (
    CircularArc,
    DiscretizationConfig,
    Disk,
    GreenLevelSet,
    IntervalUnion,
    Lemniscate,
    SetDescriptor,
    describe,
    discretize,
    from_json,
    to_json,
    validate,
)
from .zeros import balayage_check, external_points, hull_and_gap_check, vieta_residual, zeros_of

CSV_COLUMNS = ("set_id", "n", "norm", "capacity", "widom_factor", "check", "margin", "pass")
SUITES = ("bounds", "asymptotics", "zeros")

DEFAULT_TOLERANCES = {
    "szego": 1e-8,
    "schiefermayr": 1e-8,
    "totik_widom": 1e-6,
    "norm_identity": 1e-6,
    "alternation": 0.0,
    "weighted_lower_bound": 1e-8,
    "lemniscate": 1e-6,
    "level_set_bound": 1e-6,
    "level_set_identity": 1e-5,
    "liminf": 0.05,
    "arc_monotone": 1e-7,
    "arc_limit": 0.05,
    "root_norm_top": 0.02,
    "trend": 1e-12,
    "zeros_hull": 1e-9,
    "zeros_per_gap": 0.0,
    "vieta": 1e-9,
    "balayage_top": 1e-2,
}

LIMINF_WINDOW = 40
ARC_LIMIT_MIN_DEGREE = 20


def _abs_sin(z):
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    return np.abs(z.imag) / np.where(r == 0, 1.0, r)


WEIGHTS = {
    "unit": lambda: Weight.constant(1.0),
    "sqrt_1mx2": lambda: Weight(lambda z: np.sqrt(np.abs(1 - np.asarray(z) ** 2)), "sqrt(1-x^2)"),
    "abs_sin": lambda: Weight(_abs_sin, "|sin(arg z)|"),
}


def weight_by_name(name: str) -> Weight:
    try:
        return WEIGHTS[name]()
    except KeyError:
        raise ValueError(f"unknown weight {name!r}; known: {', '.join(WEIGHTS)}") from None


# ----------------------------------------------------------------------------
# configuration


def parse_degrees(spec) -> tuple[int, ...]:
    """'1..40', '2,4,8', an int or a list of ints."""
    if isinstance(spec, int):
        out = [spec]
    elif isinstance(spec, str):
        out = []
        for part in spec.split(","):
            part = part.strip()
            if not part:
                continue
            if ".." in part:
                a, b = part.split("..", 1)
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
    else:
        out = [int(v) for v in spec]
    if not out:
        raise ValueError("degree range is empty")
    if min(out) < 1:
        raise ValueError("degrees must be at least 1")
    return tuple(sorted(set(out)))


def random_interval_unions(count: int, seed: int, components=(2, 3),
                           min_gap: float = 0.05) -> list[IntervalUnion]:
    """Seeded unions of 2-3 intervals in [-1, 1] with hull [-1, 1] and gaps >= min_gap."""
    rng = np.random.default_rng(seed)
    out = []
    lo_k, hi_k = min(components), max(components)
    while len(out) < count:
        k = int(rng.integers(lo_k, hi_k + 1))
        inner = np.sort(rng.uniform(-1, 1, 2 * k - 2))
        pts = np.concatenate([[-1.0], inner, [1.0]])
        d = np.diff(pts)
        # d[1::2] are the gaps, d[0::2] the bands
        if np.all(d[1::2] >= min_gap) and np.all(d[0::2] >= min_gap):
            ints = tuple((float(pts[2 * j]), float(pts[2 * j + 1])) for j in range(k))
            out.append(validate(IntervalUnion(ints)))
    return out


@dataclass
class CampaignConfig:
    sets: list
    degrees: tuple[int, ...]
    tolerances: dict = field(default_factory=dict)
    grid_points: int = 512
    quad_pts: int | None = None
    remez_tol: float = 1e-10
    complex_tol: float = 1e-8
    weights: tuple[str, ...] = ()
    suites: tuple[str, ...] = ("bounds",)
    workers: int = 1
    seed: int = 0
    out: str | None = None
    timings: bool = False

    def __post_init__(self):
        self.sets = [validate(s) for s in self.sets]
        if not self.sets:
            raise ValueError("campaign has no sets")
        self.degrees = parse_degrees(self.degrees)
        tol = dict(DEFAULT_TOLERANCES)
        tol.update(self.tolerances or {})
        for k, v in tol.items():
            if not v >= 0 or (v == 0 and k not in ("alternation", "zeros_per_gap")):
                raise ValueError(f"tolerance {k} must be positive")
        self.tolerances = tol
        for s in self.suites:
            if s not in SUITES:
                raise ValueError(f"unknown suite {s!r}")
        for w in self.weights:
            weight_by_name(w)

    @classmethod
    def from_dict(cls, obj: dict, **overrides) -> "CampaignConfig":
        obj = dict(obj)
        obj.update({k: v for k, v in overrides.items() if v is not None})
        sets = [from_json(s) for s in obj.get("sets", [])]
        if "set" in obj:
            sets.append(from_json(obj["set"]))
        fam = obj.get("family")
        if fam:
            if fam.get("kind", "random_intervals") != "random_intervals":
                raise ValueError(f"unknown family kind {fam.get('kind')!r}")
            sets.extend(random_interval_unions(int(fam.get("count", 10)),
                                               int(fam.get("seed", obj.get("seed", 0))),
                                               tuple(fam.get("components", (2, 3))),
                                               float(fam.get("min_gap", 0.05))))
        suites = obj.get("suites", obj.get("suite", "bounds"))
        if isinstance(suites, str):
            suites = SUITES if suites == "all" else (suites,)
        return cls(
            sets=sets,
            degrees=obj.get("degrees", "1..10"),
            tolerances=obj.get("tolerances", {}),
            grid_points=int(obj.get("grid_points", obj.get("grid", 512))),
            quad_pts=obj.get("quad_pts"),
            remez_tol=float(obj.get("remez_tol", 1e-10)),
            complex_tol=float(obj.get("complex_tol", obj.get("tol", 1e-8))),
            weights=tuple(obj.get("weights", ())),
            suites=tuple(suites),
            workers=int(obj.get("workers", 1)),
            seed=int(obj.get("seed", 0)),
            out=obj.get("out"),
            timings=bool(obj.get("timings", False)),
        )

    @classmethod
    def load(cls, path, **overrides) -> "CampaignConfig":
        path = Path(path)
        text = path.read_text()
        if path.suffix.lower() == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:  # python < 3.11
                import tomli as tomllib
            obj = tomllib.loads(text)
        else:
            obj = json.loads(text)
        return cls.from_dict(obj, **overrides)

    def effective_workers(self) -> int:
        env = os.environ.get("WIDOMLAB_WORKERS")
        if env:
            return max(1, int(env))
        return max(1, int(self.workers))

    def solver_options(self) -> dict:
        return {"grid": self.grid_points, "quad_pts": self.quad_pts, "remez_tol": self.remez_tol,
                "complex_tol": self.complex_tol, "weights": list(self.weights),
                "suites": list(self.suites)}


# ----------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class CheckResult:
    """One evaluated claim.  ``margin`` is >= 0 exactly when the check passes.

    For sense '>=' the claim is measured >= bound - slack, for '<=' it is
    measured <= bound + slack.
    """

    set_id: str
    n: int
    check: str
    sense: str
    measured: float
    bound: float
    slack: float
    margin: float
    status: str
    digest: str
    norm: float | None = None
    capacity: float | None = None
    widom: float | None = None
    detail: str = ""
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def recompute_margin(self) -> float:
        return compute_margin(self.sense, self.measured, self.bound, self.slack)

    def to_json(self, timings: bool = False) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("runtime")
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in d.items()}

    def csv_row(self) -> list:
        def f(v):
            return "" if v is None or (isinstance(v, float) and math.isnan(v)) else repr(float(v))
        flag = self.status if self.status not in ("PASS", "FAIL") else ("true" if self.passed else "false")
        return [self.set_id, self.n, f(self.norm), f(self.capacity), f(self.widom), self.check,
                f(self.margin), flag]


def compute_margin(sense: str, measured: float, bound: float, slack: float) -> float:
    if sense == ">=":
        return float(measured - bound + slack)
    if sense == "<=":
        return float(bound - measured + slack)
    raise ValueError(f"bad sense {sense!r}")


def _digest(payload: dict) -> str:
    text = json.dumps(payload, sort_keys=True, default=repr)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def make_check(set_id: str, n: int, check: str, sense: str, measured, bound, slack: float,
               inputs: dict, rec: dict | None = None, detail: str = "") -> CheckResult:
    measured, bound = float(measured), float(bound)
    margin = compute_margin(sense, measured, bound, slack)
    status = "PASS" if margin >= 0 else "FAIL"
    rec = rec or {}
    return CheckResult(set_id, int(n), check, sense, measured, bound, float(slack), margin, status,
                       _digest({"check": check, "n": n, **inputs}), rec.get("norm"),
                       rec.get("capacity"), rec.get("widom"), detail, rec.get("runtime", 0.0))


def skipped(set_id: str, n: int, check: str, inputs: dict, reason: str, rec: dict | None = None,
            status: str = "UNSUPPORTED") -> CheckResult:
    rec = rec or {}
    return CheckResult(set_id, int(n), check, "", math.nan, math.nan, 0.0, math.nan, status,
                       _digest({"check": check, "n": n, **inputs}), rec.get("norm"),
                       rec.get("capacity"), rec.get("widom"), reason, rec.get("runtime", 0.0))


# ----------------------------------------------------------------------------
# per (set, degree) jobs

_ROOT_POINTS = 10


def _solve(desc: SetDescriptor, n: int, opts: dict, weight: Weight | None = None):
    if isinstance(desc, IntervalUnion) and weight is None:
        return chebyshev_real(desc, n, tol=opts["remez_tol"])
    if isinstance(desc, CircularArc):
        grid = arc_grid(desc.alpha, n, max(opts["grid"], 16 * (n + 1)))
    else:
        grid = discretize(desc, DiscretizationConfig(max(opts["grid"], 4 * (n + 1))), degree=n)
    return chebyshev_complex(grid, n, w=weight, tol=opts["complex_tol"], refine_check=False)


def _period_of(desc: GreenLevelSet, opts: dict) -> int | None:
    """Period m of the base set if it can be confirmed, else None."""
    base = desc.base
    if len(base.intervals) == 1:
        return 1
    m = desc.period
    if m is None:
        return None
    ps = build_period_set(chebyshev_real(base, int(m), tol=opts["remez_tol"]))
    merged = np.array(ps.merged.intervals)
    mine = np.array(base.intervals)
    if merged.shape != mine.shape or np.max(np.abs(merged - mine)) > 1e-8:
        return None
    return int(m)


def solve_job(job) -> dict:
    """Solve one (set, degree) pair and collect every measurement the checks need."""
    idx, set_obj, n, opts = job
    desc = from_json(set_obj)
    suites = opts["suites"]
    rec: dict = {"idx": idx, "n": n, "norm": None, "capacity": None, "widom": None,
                 "aux_calls": 0, "error": None, "error_kind": None}
    t0 = time.perf_counter()
    try:
        sol = _solve(desc, n, opts)
    except WidomLabError as exc:
        rec["error"] = f"{type(exc).__name__}: {exc}"
        rec["error_kind"] = "solver" if isinstance(exc, SolverError) else "input"
        rec["runtime"] = time.perf_counter() - t0
        return rec
    rec["norm"] = float(sol.norm)
    try:
        pd = potential_data(desc, opts["quad_pts"])
        rec["capacity"] = float(pd.capacity)
        rec["widom"] = float(sol.norm / pd.capacity ** n)
    except UnsupportedFamily:
        pd = None
    if isinstance(desc, IntervalUnion):
        rec["pw"] = float(pd.pw)
        rec["alternation"] = int(len(sol.alternation))
        try:
            ps = build_period_set(sol)
            cap_n = solve_finite_gap(ps.merged, opts["quad_pts"]).capacity
            rec["norm_identity"] = abs(sol.norm - 2 * cap_n ** n) / sol.norm
        except WidomLabError as exc:
            rec["norm_identity_error"] = f"{type(exc).__name__}: {exc}"
    if isinstance(desc, GreenLevelSet):
        base_pd = solve_finite_gap(desc.base, opts["quad_pts"])
        rec["pw"] = float(base_pd.pw)
        rec["level"] = float(desc.level)
        try:
            m = _period_of(desc, opts)
            rec["aux_calls"] += 0 if m in (None, 1) else 1
        except WidomLabError:
            m = None
        rec["period"] = m
        if m is not None and n % m == 0:
            rec["base_norm"] = float(chebyshev_real(desc.base, n, tol=opts["remez_tol"]).norm)
            rec["aux_calls"] += 1
    if "zeros" in suites:
        try:
            zm = zeros_of(sol)
            hr = hull_and_gap_check(zm, desc)
            rec["hull_outside"] = hr.max_outside
            rec["zeros_per_gap"] = list(hr.zeros_per_gap)
            rec["vieta"] = vieta_residual(zm, sol)
            if pd is not None:
                rec["balayage"] = balayage_check(zm, pd, external_points(desc, 32)).max_discrepancy
        except WidomLabError as exc:
            rec["zeros_error"] = f"{type(exc).__name__}: {exc}"
    if "asymptotics" in suites and pd is not None:
        cap = pd.capacity
        rec["root_norm_dev"] = abs(sol.norm ** (1.0 / n) - cap)
        z = external_points(desc, _ROOT_POINTS)
        target = cap * np.exp(green_eval(pd, z))
        vals = np.abs(sol(z)) ** (1.0 / n)
        rec["root_pointwise_dev"] = float(np.max(np.abs(vals / target - 1)))
    weighted = {}
    for name in opts["weights"]:
        w = weight_by_name(name)
        entry = {"name": w.name}
        try:
            wsol = _solve(desc, n, opts, weight=w)
            rec["aux_calls"] += 1
            entry["norm"] = float(wsol.norm)
            entry["S"] = float(szego_value(w, pd)) if pd is not None else None
        except RankDeficiency as exc:
            entry["unsupported"] = f"weight support too small on this set: {exc}"
        except WidomLabError as exc:
            entry["error"] = f"{type(exc).__name__}: {exc}"
        weighted[name] = entry
    rec["weighted"] = weighted
    rec["runtime"] = time.perf_counter() - t0
    return rec


def _run_jobs(jobs: list, workers: int) -> list[dict]:
    if workers <= 1 or len(jobs) <= 1:
        return [solve_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(solve_job, jobs, chunksize=1))


# ----------------------------------------------------------------------------
# checks


def _set_inputs(desc, opts) -> dict:
    return {"set": to_json(desc), "grid": opts["grid"], "remez_tol": opts["remez_tol"],
            "complex_tol": opts["complex_tol"]}


def _bound_checks(sid, desc, rec, tol, inputs) -> list[CheckResult]:
    n = rec["n"]
    out = []
    W = rec["widom"]
    if W is None:
        out.append(skipped(sid, n, "szego", inputs, "no capacity for this family", rec))
        return out
    out.append(make_check(sid, n, "szego", ">=", W, 1.0, tol["szego"], inputs, rec))
    if isinstance(desc, IntervalUnion):
        out.append(make_check(sid, n, "schiefermayr", ">=", W, 2.0, tol["schiefermayr"], inputs, rec))
        out.append(make_check(sid, n, "totik_widom", "<=", W, 2 * math.exp(rec["pw"]),
                              tol["totik_widom"], inputs, rec))
        if "norm_identity" in rec:
            out.append(make_check(sid, n, "norm_identity", "<=", rec["norm_identity"], 0.0,
                                  tol["norm_identity"], inputs, rec))
        else:
            out.append(skipped(sid, n, "norm_identity", inputs, rec.get("norm_identity_error", ""),
                               rec, status="ERROR"))
        out.append(make_check(sid, n, "alternation", ">=", rec["alternation"], n + 1,
                              tol["alternation"], inputs, rec))
    if isinstance(desc, GreenLevelSet):
        a = rec["level"]
        bound = (1 + math.exp(-n * a)) * math.exp(rec["pw"])
        out.append(make_check(sid, n, "level_set_bound", "<=", W, bound, tol["level_set_bound"],
                              inputs, rec))
        if "base_norm" in rec:
            ratio = rec["norm"] / (math.cosh(n * a) * rec["base_norm"])
            out.append(make_check(sid, n, "level_set_identity", "<=", abs(ratio - 1), 0.0,
                                  tol["level_set_identity"], inputs, rec,
                                  detail=f"period {rec['period']}"))
        else:
            why = ("period of the base set not confirmed" if rec.get("period") is None
                   else f"degree not a multiple of period {rec['period']}")
            out.append(skipped(sid, n, "level_set_identity", inputs, why, rec))
    for name, entry in rec["weighted"].items():
        check = f"weighted_lower_bound[{name}]"
        if "unsupported" in entry:
            out.append(skipped(sid, n, check, inputs, entry["unsupported"], rec))
        elif "error" in entry:
            out.append(skipped(sid, n, check, inputs, entry["error"], rec, status="ERROR"))
        elif entry["S"] is None:
            out.append(skipped(sid, n, check, inputs, "no capacity for this family", rec))
        else:
            bound = entry["S"] * rec["capacity"] ** n
            out.append(make_check(sid, n, check, ">=", entry["norm"], bound,
                                  tol["weighted_lower_bound"], inputs, rec,
                                  detail=f"S={entry['S']!r}"))
    return out


def _trend(vals) -> float:
    """Largest increase between consecutive values (<= 0 for a nonincreasing sequence)."""
    vals = list(vals)
    if len(vals) < 2:
        return -math.inf
    return max(b - a for a, b in zip(vals, vals[1:]))


def _set_bound_checks(sid, desc, recs, tol, inputs, opts) -> list[CheckResult]:
    out = []
    good = [r for r in recs if r["widom"] is not None]
    if not good:
        return out
    top = good[-1]
    nmax = top["n"]
    if isinstance(desc, IntervalUnion):
        window = [r for r in good if r["n"] <= LIMINF_WINDOW]
        if window and window[-1]["n"] < LIMINF_WINDOW:
            out.append(skipped(sid, window[-1]["n"], "liminf", inputs,
                               f"window ends at n={window[-1]['n']}, below n={LIMINF_WINDOW}",
                               window[-1]))
        elif window:
            m = min(r["widom"] for r in window)
            out.append(make_check(sid, window[-1]["n"], "liminf", "<=", m, 2.0, tol["liminf"],
                                  inputs, window[-1],
                                  detail=f"window n={window[0]['n']}..{window[-1]['n']}"))
    if isinstance(desc, CircularArc):
        ws = [r["widom"] for r in good]
        contiguous = [r["n"] for r in good] == list(range(good[0]["n"], nmax + 1))
        if len(ws) >= 2 and contiguous:
            drop = -min(b - a for a, b in zip(ws, ws[1:]))
            out.append(make_check(sid, nmax, "arc_monotone", "<=", drop, 0.0, tol["arc_monotone"],
                                  inputs, top, detail=f"window n={good[0]['n']}..{nmax}"))
        else:
            out.append(skipped(sid, nmax, "arc_monotone", inputs,
                               "needs a contiguous degree range", top))
        limit = 1 + math.cos(desc.alpha / 2)
        if nmax >= ARC_LIMIT_MIN_DEGREE:
            out.append(make_check(sid, nmax, "arc_limit", "<=", abs(top["widom"] - limit), 0.0,
                                  tol["arc_limit"], inputs, top, detail=f"limit {limit!r}"))
        else:
            out.append(skipped(sid, nmax, "arc_limit", inputs,
                               f"top degree below {ARC_LIMIT_MIN_DEGREE}", top))
    if isinstance(desc, Lemniscate):
        k = desc.degree
        known = {r["n"]: r["widom"] for r in good}
        known[0] = 1.0
        missing = [j for j in range(k) if j not in known]
        for j in missing:
            sol = _solve(desc, j, opts)
            known[j] = sol.norm / top["capacity"] ** j
        K = max(known[j] for j in range(k))
        for r in good:
            out.append(make_check(sid, r["n"], "lemniscate", "<=", r["widom"], K, tol["lemniscate"],
                                  inputs, r, detail=f"K=max W_j, j<{k}"))
    return out


def _asymptotic_checks(sid, desc, recs, tol, inputs) -> list[CheckResult]:
    good = [r for r in recs if "root_norm_dev" in r]
    if not good:
        n = recs[-1]["n"]
        return [skipped(sid, n, c, inputs, "no capacity for this family", recs[-1])
                for c in ("root_norm_trend", "root_norm_top", "root_pointwise_trend")]
    top = good[-1]
    n = top["n"]
    window = f"n in {[r['n'] for r in good]}"
    out = []
    if len(good) >= 2:
        out.append(make_check(sid, n, "root_norm_trend", "<=", _trend(r["root_norm_dev"] for r in good),
                              0.0, tol["trend"], inputs, top, detail=window))
        out.append(make_check(sid, n, "root_pointwise_trend", "<=",
                              _trend(r["root_pointwise_dev"] for r in good), 0.0, tol["trend"],
                              inputs, top, detail=window))
    else:
        out.append(skipped(sid, n, "root_norm_trend", inputs, "needs two degrees", top))
        out.append(skipped(sid, n, "root_pointwise_trend", inputs, "needs two degrees", top))
    out.append(make_check(sid, n, "root_norm_top", "<=", top["root_norm_dev"], 0.0,
                          tol["root_norm_top"], inputs, top))
    return out


def _zero_checks(sid, desc, recs, tol, inputs) -> list[CheckResult]:
    out = []
    for r in recs:
        n = r["n"]
        if "zeros_error" in r:
            out.append(skipped(sid, n, "zeros_hull", inputs, r["zeros_error"], r, status="ERROR"))
            continue
        out.append(make_check(sid, n, "zeros_hull", "<=", r["hull_outside"], 0.0, tol["zeros_hull"],
                              inputs, r))
        out.append(make_check(sid, n, "vieta", "<=", r["vieta"], 0.0, tol["vieta"], inputs, r))
        if isinstance(desc, IntervalUnion):
            most = max(r["zeros_per_gap"], default=0)
            out.append(make_check(sid, n, "zeros_per_gap", "<=", most, 1, tol["zeros_per_gap"],
                                  inputs, r))
    bal = [r for r in recs if "balayage" in r]
    if isinstance(desc, (IntervalUnion, CircularArc)) and bal:
        top = bal[-1]
        window = f"n in {[r['n'] for r in bal]}"
        if len(bal) >= 2:
            out.append(make_check(sid, top["n"], "balayage_trend", "<=", _trend(r["balayage"] for r in bal),
                                  0.0, tol["trend"], inputs, top, detail=window))
        out.append(make_check(sid, top["n"], "balayage_top", "<=", top["balayage"], 0.0,
                              tol["balayage_top"], inputs, top, detail=window))
    return out


@dataclass
class CampaignReport:
    results: list
    solver_calls: dict
    config: dict

    @property
    def passed(self) -> bool:
        return all(r.status in ("PASS", "UNSUPPORTED") for r in self.results)

    @property
    def solver_failed(self) -> bool:
        return any(r.status == "ERROR" and r.detail.startswith(_SOLVER_ERRORS) for r in self.results)

    def counts(self) -> dict:
        out: dict = {}
        for r in self.results:
            out[r.status] = out.get(r.status, 0) + 1
        return dict(sorted(out.items()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.results:
            w.writerow(r.csv_row())
        return buf.getvalue()

    def to_json(self, timings: bool = False) -> dict:
        return {"config": self.config, "solver_calls": self.solver_calls, "counts": self.counts(),
                "passed": self.passed,
                "results": [r.to_json(timings) for r in self.results]}

    def write(self, out_dir, stem: str = "campaign", timings: bool = False) -> tuple[Path, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / f"{stem}.csv"
        json_path = out_dir / f"{stem}.json"
        csv_path.write_text(self.to_csv())
        json_path.write_text(json.dumps(self.to_json(timings), indent=1, sort_keys=True) + "\n")
        return csv_path, json_path


def _subclass_names(cls) -> tuple[str, ...]:
    out = [cls.__name__]
    for sub in cls.__subclasses__():
        out.extend(_subclass_names(sub))
    return tuple(out)


_SOLVER_ERRORS = _subclass_names(SolverError)


def run_campaign(cfg: CampaignConfig) -> CampaignReport:
    """Solve every (set, degree) pair once, then evaluate the checks of the configured suites."""
    opts = cfg.solver_options()
    jobs = [(i, to_json(d), n, opts) for i, d in enumerate(cfg.sets) for n in cfg.degrees]
    recs = _run_jobs(jobs, cfg.effective_workers())
    tol = cfg.tolerances
    results: list[CheckResult] = []
    aux = sum(r["aux_calls"] for r in recs)
    for i, desc in enumerate(cfg.sets):
        sid = f"{i:03d}:{describe(desc)}"
        inputs = _set_inputs(desc, opts)
        mine = [r for r in recs if r["idx"] == i]
        ok = []
        for r in mine:
            if r["error"]:
                results.append(skipped(sid, r["n"], "solve", inputs, r["error"], r, status="ERROR"))
            else:
                ok.append(r)
        if not ok:
            continue
        if "bounds" in cfg.suites:
            for r in ok:
                results.extend(_bound_checks(sid, desc, r, tol, inputs))
            results.extend(_set_bound_checks(sid, desc, ok, tol, inputs, opts))
            if isinstance(desc, Lemniscate):
                aux += len([j for j in range(1, desc.degree) if j not in cfg.degrees])
        if "asymptotics" in cfg.suites:
            results.extend(_asymptotic_checks(sid, desc, ok, tol, inputs))
        if "zeros" in cfg.suites:
            results.extend(_zero_checks(sid, desc, ok, tol, inputs))
    calls = {"primary": len(jobs), "auxiliary": aux}
    conf = {"degrees": list(cfg.degrees), "sets": [to_json(d) for d in cfg.sets],
            "suites": list(cfg.suites), "tolerances": dict(sorted(tol.items())),
            "grid_points": cfg.grid_points, "remez_tol": cfg.remez_tol,
            "complex_tol": cfg.complex_tol, "weights": list(cfg.weights), "seed": cfg.seed}
    return CampaignReport(results, calls, conf)


def run_bound_suite(cfg: CampaignConfig) -> list[CheckResult]:
    return run_campaign(replace(cfg, suites=("bounds",))).results


def run_root_asymptotics(cfg: CampaignConfig) -> list[CheckResult]:
    return run_campaign(replace(cfg, suites=("asymptotics",))).results


def run_zero_suite(cfg: CampaignConfig) -> list[CheckResult]:
    return run_campaign(replace(cfg, suites=("zeros",))).results


def audit(results) -> list[str]:
    """Problems found when re-deriving margins and pass flags from the recorded values."""
    bad = []
    for r in results:
        if r.status in ("PASS", "FAIL"):
            m = r.recompute_margin()
            if m != r.margin:
                bad.append(f"{r.set_id} n={r.n} {r.check}: margin {r.margin!r} != {m!r}")
            if (m >= 0) != (r.status == "PASS"):
                bad.append(f"{r.set_id} n={r.n} {r.check}: status {r.status} vs margin {m!r}")
    return bad


def load_results(path) -> list[CheckResult]:
    obj = json.loads(Path(path).read_text())
    out = []
    for d in obj["results"]:
        d = {k: (math.nan if v is None and k in ("measured", "bound", "margin") else v)
             for k, v in d.items()}
        d.setdefault("runtime", 0.0)
        out.append(CheckResult(**d))
    return out
