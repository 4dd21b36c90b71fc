"""Compact-set descriptions, validation, boundary discretization and hulls.

Every set family is a small frozen dataclass.  ``validate`` returns the
canonical form, ``discretize`` samples the (outer) boundary, and
``convex_hull`` returns a :class:`Hull` usable for containment tests.
Points are always complex numbers, also for real sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Union

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    ConfigTooCoarse,
    DegenerateComponent,
    NonSimplePolyline,
    OverlappingIntervals,
    SetError,
)

MEMBERSHIP_TOL = 1e-12


@dataclass(frozen=True)
class IntervalUnion:
    intervals: tuple[tuple[float, float], ...]

    @property
    def bands(self) -> np.ndarray:
        return np.asarray(self.intervals, dtype=float).reshape(-1, 2)

    @property
    def hull_endpoints(self) -> tuple[float, float]:
        return self.intervals[0][0], self.intervals[-1][1]


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float


@dataclass(frozen=True)
class CircularArc:
    """The arc {exp(i t) : |t| <= alpha} of the unit circle."""

    alpha: float


@dataclass(frozen=True)
class Lemniscate:
    """Solid lemniscate {z : |P(z)| <= level}; coefficients lowest degree first."""

    coeffs: tuple[complex, ...]
    level: float

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def poly(self, z):
        return np.polynomial.polynomial.polyval(z, np.asarray(self.coeffs, dtype=complex))


@dataclass(frozen=True)
class GreenLevelSet:
    """{z : G_base(z) <= level} for a finite union of real intervals ``base``.

    ``period`` optionally records that ``base`` is a period-n set; it is
    checked, not trusted, by the verification suite.
    """

    base: IntervalUnion
    level: float
    period: int | None = None


@dataclass(frozen=True)
class JordanPolyline:
    vertices: tuple[complex, ...]


@dataclass(frozen=True)
class PointGrid:
    points: tuple[complex, ...]


SetDescriptor = Union[
    IntervalUnion, Disk, CircularArc, Lemniscate, GreenLevelSet, JordanPolyline, PointGrid
]

REAL_FAMILIES = (IntervalUnion,)


def is_real(desc: SetDescriptor) -> bool:
    return isinstance(desc, IntervalUnion)


# ----------------------------------------------------------------------------
# validation


def _validate_intervals(intervals) -> IntervalUnion:
    pairs = []
    for pair in intervals:
        a, b = (float(v) for v in pair)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DegenerateComponent(f"non-finite interval endpoint in {pair!r}")
        if not a < b:
            raise DegenerateComponent(f"interval ({a}, {b}) has non-positive length")
        pairs.append((a, b))
    if not pairs:
        raise DegenerateComponent("empty interval union")
    pairs.sort()
    merged = [pairs[0]]
    for a, b in pairs[1:]:
        pa, pb = merged[-1]
        if a < pb:
            raise OverlappingIntervals(f"({pa}, {pb}) overlaps ({a}, {b})")
        if a == pb:
            merged[-1] = (pa, b)
        else:
            merged.append((a, b))
    return IntervalUnion(tuple(merged))


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        v = (b - a).real * (c - a).imag - (b - a).imag * (c - a).real
        return 0 if abs(v) < 1e-15 else (1 if v > 0 else -1)

    def on_segment(a, b, c):
        return min(a.real, b.real) - 1e-15 <= c.real <= max(a.real, b.real) + 1e-15 and \
            min(a.imag, b.imag) - 1e-15 <= c.imag <= max(a.imag, b.imag) + 1e-15

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return (o1 == 0 and on_segment(p1, p2, q1)) or (o2 == 0 and on_segment(p1, p2, q2)) or \
        (o3 == 0 and on_segment(q1, q2, p1)) or (o4 == 0 and on_segment(q1, q2, p2))


def validate(desc: SetDescriptor) -> SetDescriptor:
    """Check the family invariants and return the canonical descriptor.

    Touching intervals are merged; overlapping ones are an error.
    """
    if isinstance(desc, IntervalUnion):
        return _validate_intervals(desc.intervals)
    if isinstance(desc, Disk):
        r = float(desc.radius)
        if not (r > 0 and math.isfinite(r)):
            raise DegenerateComponent(f"disk radius must be positive, got {r}")
        return Disk(complex(desc.center), r)
    if isinstance(desc, CircularArc):
        a = float(desc.alpha)
        if not 0 < a < math.pi:
            raise DegenerateComponent(f"arc half-angle must lie in (0, pi), got {a}")
        return CircularArc(a)
    if isinstance(desc, Lemniscate):
        coeffs = [complex(c) for c in desc.coeffs]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) < 2:
            raise DegenerateComponent("lemniscate polynomial must have degree >= 1")
        level = float(desc.level)
        if not level > 0:
            raise DegenerateComponent(f"lemniscate level must be positive, got {level}")
        return Lemniscate(tuple(coeffs), level)
    if isinstance(desc, GreenLevelSet):
        level = float(desc.level)
        if not level > 0:
            raise DegenerateComponent(f"Green level must be positive, got {level}")
        period = None if desc.period is None else int(desc.period)
        if period is not None and period < 1:
            raise SetError("period must be >= 1")
        return GreenLevelSet(_validate_intervals(desc.base.intervals), level, period)
    if isinstance(desc, JordanPolyline):
        v = [complex(p) for p in desc.vertices]
        if len(v) > 1 and v[0] == v[-1]:
            v = v[:-1]
        if len(v) < 3:
            raise NonSimplePolyline("a closed polyline needs at least 3 vertices")
        m = len(v)
        for i in range(m):
            for j in range(i + 1, m):
                if j == i + 1 or (i == 0 and j == m - 1):
                    continue
                if _segments_cross(v[i], v[(i + 1) % m], v[j], v[(j + 1) % m]):
                    raise NonSimplePolyline(f"edges {i} and {j} intersect")
        area = 0.5 * sum((v[i].conjugate() * v[(i + 1) % m]).imag for i in range(m))
        if abs(area) < 1e-14:
            raise NonSimplePolyline("polyline encloses zero area")
        return JordanPolyline(tuple(v))
    if isinstance(desc, PointGrid):
        pts = tuple(complex(p) for p in desc.points)
        if len(set(pts)) < 2:
            raise DegenerateComponent("point grid needs at least two distinct points")
        return PointGrid(pts)
    raise SetError(f"unknown set descriptor {type(desc).__name__}")


# ----------------------------------------------------------------------------
# JSON

_TYPE_NAMES = {
    "intervalunion": IntervalUnion, "interval_union": IntervalUnion, "intervals": IntervalUnion,
    "disk": Disk, "circulararc": CircularArc, "circular_arc": CircularArc, "arc": CircularArc,
    "lemniscate": Lemniscate, "greenlevelset": GreenLevelSet, "green_level_set": GreenLevelSet,
    "jordanpolyline": JordanPolyline, "jordan_polyline": JordanPolyline, "polygon": JordanPolyline,
    "pointgrid": PointGrid, "point_grid": PointGrid,
}


def _cnum(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _cjson(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def from_json(obj: dict) -> SetDescriptor:
    """Build and validate a descriptor from its JSON object form."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise SetError("set description must be an object with a 'type' field")
    kind = _TYPE_NAMES.get(str(obj["type"]).lower())
    if kind is None:
        raise SetError(f"unknown set type {obj['type']!r}")
    try:
        if kind is IntervalUnion:
            desc = IntervalUnion(tuple(tuple(p) for p in obj["intervals"]))
        elif kind is Disk:
            desc = Disk(_cnum(obj.get("center", 0.0)), obj["radius"])
        elif kind is CircularArc:
            desc = CircularArc(obj["alpha"])
        elif kind is Lemniscate:
            desc = Lemniscate(tuple(_cnum(c) for c in obj["coeffs"]), obj["level"])
        elif kind is GreenLevelSet:
            base = obj["base"]
            ints = base["intervals"] if isinstance(base, dict) else base
            desc = GreenLevelSet(IntervalUnion(tuple(tuple(p) for p in ints)), obj["level"],
                                 obj.get("period"))
        elif kind is JordanPolyline:
            desc = JordanPolyline(tuple(_cnum(v) for v in obj["vertices"]))
        else:
            desc = PointGrid(tuple(_cnum(v) for v in obj["points"]))
    except (KeyError, TypeError) as exc:
        raise SetError(f"malformed {kind.__name__} description: {exc}") from exc
    return validate(desc)


def to_json(desc: SetDescriptor) -> dict:
    if isinstance(desc, IntervalUnion):
        return {"type": "IntervalUnion", "intervals": [[a, b] for a, b in desc.intervals]}
    if isinstance(desc, Disk):
        return {"type": "Disk", "center": _cjson(desc.center), "radius": desc.radius}
    if isinstance(desc, CircularArc):
        return {"type": "CircularArc", "alpha": desc.alpha}
    if isinstance(desc, Lemniscate):
        return {"type": "Lemniscate", "coeffs": [_cjson(c) for c in desc.coeffs],
                "level": desc.level}
    if isinstance(desc, GreenLevelSet):
        out = {"type": "GreenLevelSet", "base": to_json(desc.base), "level": desc.level}
        if desc.period is not None:
            out["period"] = desc.period
        return out
    if isinstance(desc, JordanPolyline):
        return {"type": "JordanPolyline", "vertices": [[v.real, v.imag] for v in desc.vertices]}
    return {"type": "PointGrid", "points": [[p.real, p.imag] for p in desc.points]}


def describe(desc: SetDescriptor) -> str:
    """Short human-readable id used in reports."""
    if isinstance(desc, IntervalUnion):
        return "I[" + ",".join(f"({a:.6g},{b:.6g})" for a, b in desc.intervals) + "]"
    if isinstance(desc, Disk):
        return f"Disk(c={desc.center:.6g},r={desc.radius:.6g})"
    if isinstance(desc, CircularArc):
        return f"Arc(alpha={desc.alpha:.6g})"
    if isinstance(desc, Lemniscate):
        return f"Lemniscate(deg={desc.degree},level={desc.level:.6g})"
    if isinstance(desc, GreenLevelSet):
        return f"GreenLevel({describe(desc.base)},level={desc.level:.6g})"
    if isinstance(desc, JordanPolyline):
        return f"Polygon({len(desc.vertices)} vertices)"
    return f"PointGrid({len(desc.points)})"


# ----------------------------------------------------------------------------
# discretization


@dataclass(frozen=True)
class DiscretizationConfig:
    points_per_component: int = 256
    clustering: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.points_per_component < 16:
            raise ConfigTooCoarse("points_per_component must be >= 16")
        if self.clustering < 1:
            raise SetError("clustering exponent must be >= 1")


@dataclass(frozen=True, eq=False)
class BoundaryGrid:
    """Sampled boundary of a set.

    ``param`` is the curve parameter of each point inside its component
    (x for intervals, the angle for circles, arcs and ellipses, arc length
    for polygons, arg P for lemniscates).  ``weights`` are arc-length
    quadrature weights where meaningful.
    """

    points: np.ndarray
    component: np.ndarray
    param: np.ndarray
    desc: SetDescriptor | None = None
    weights: np.ndarray | None = None
    closed: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    cfg: "DiscretizationConfig | None" = None

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n_components(self) -> int:
        return int(self.component.max()) + 1 if len(self.component) else 0

    def is_closed(self, comp: int) -> bool:
        return bool(self.closed[comp]) if comp < len(self.closed) else False


def cluster_nodes(m: int, p: float) -> np.ndarray:
    """m nodes in [-1, 1], endpoints included, denser near +-1 when p > 1."""
    s = np.linspace(-1.0, 1.0, m)
    return np.sign(s) * (1.0 - (1.0 - np.abs(s)) ** p)


def _arc_weights(t: np.ndarray, speed) -> np.ndarray:
    w = np.zeros_like(t)
    dt = np.diff(t)
    w[:-1] += dt / 2
    w[1:] += dt / 2
    return w * speed


def _lemniscate_grid(desc: Lemniscate, total: int):
    k = desc.degree
    m = max(int(math.ceil(total / k)), 8)
    coeffs = np.asarray(desc.coeffs, dtype=complex)
    phis = 2 * np.pi * np.arange(m) / m
    tracks = np.empty((m, k), dtype=complex)
    for i, phi in enumerate(phis):
        c = coeffs.copy()
        c[0] -= desc.level * np.exp(1j * phi)
        roots = np.polynomial.polynomial.polyroots(c)
        roots = _newton_polish_roots(c, roots)
        if i:
            cost = np.abs(tracks[i - 1][:, None] - roots[None, :])
            _, col = linear_sum_assignment(cost)
            roots = roots[col]
        tracks[i] = roots
    # monodromy: where does each track land after a full turn?
    first = tracks[0]
    cost = np.abs(tracks[-1][:, None] - first[None, :])
    _, perm = linear_sum_assignment(cost)
    # follow the cycles of the monodromy so each component is ordered along its curve
    seen = np.zeros(k, dtype=bool)
    pts_l, comp_l, par_l = [], [], []
    ncomp = 0
    for j in range(k):
        if seen[j]:
            continue
        cur, turn = j, 0
        while not seen[cur]:
            seen[cur] = True
            pts_l.append(tracks[:, cur])
            par_l.append(phis + 2 * np.pi * turn)
            comp_l.append(np.full(m, ncomp))
            cur = perm[cur]
            turn += 1
        ncomp += 1
    pts, comp, param = np.concatenate(pts_l), np.concatenate(comp_l), np.concatenate(par_l)
    # drop coincident points (double points of the curve)
    keep = np.ones(len(pts), dtype=bool)
    order = np.lexsort((pts.imag, pts.real))
    for a, b in zip(order[:-1], order[1:]):
        if abs(pts[a] - pts[b]) < 1e-13:
            keep[b] = False
    return pts[keep], comp[keep], param[keep], ncomp


def _newton_polish_roots(c, roots, steps=2):
    d = np.polynomial.polynomial.polyder(c)
    for _ in range(steps):
        dv = np.polynomial.polynomial.polyval(roots, d)
        ok = np.abs(dv) > 1e-8
        roots = np.where(ok, roots - np.polynomial.polynomial.polyval(roots, c) / np.where(ok, dv, 1), roots)
    return roots


def ellipse_point(base: IntervalUnion, level: float, phi):
    a, b = base.intervals[0]
    mid, half = (a + b) / 2, (b - a) / 2
    return mid + half * np.cosh(level + 1j * np.asarray(phi))


def discretize(desc: SetDescriptor, cfg: DiscretizationConfig | None = None,
               degree: int | None = None) -> BoundaryGrid:
    """Sample the set (for 2-D regions: its outer boundary).

    ``degree`` is the polynomial degree the grid is meant for; grids with
    fewer than ``degree + 2`` points per component are rejected.
    """
    cfg = cfg or DiscretizationConfig()
    if degree is not None and cfg.points_per_component < degree + 2:
        raise ConfigTooCoarse(
            f"{cfg.points_per_component} points per component is too coarse for degree {degree}")
    return replace(_discretize(desc, cfg), cfg=cfg)


def refine(grid: BoundaryGrid, factor: int = 2) -> BoundaryGrid:
    """The same set sampled ``factor`` times more densely."""
    cfg = grid.cfg or DiscretizationConfig()
    return discretize(grid.desc, replace(cfg, points_per_component=factor * cfg.points_per_component))


def _discretize(desc: SetDescriptor, cfg: DiscretizationConfig) -> BoundaryGrid:
    m = cfg.points_per_component
    p = cfg.clustering
    if isinstance(desc, IntervalUnion):
        pts, comp, par, wts = [], [], [], []
        for j, (a, b) in enumerate(desc.intervals):
            x = (a + b) / 2 + (b - a) / 2 * cluster_nodes(m, p)
            x[0], x[-1] = a, b
            pts.append(x.astype(complex))
            comp.append(np.full(m, j))
            par.append(x)
            wts.append(_arc_weights(x, 1.0))
        return BoundaryGrid(np.concatenate(pts), np.concatenate(comp), np.concatenate(par),
                            desc, np.concatenate(wts), np.zeros(len(desc.intervals), bool))
    if isinstance(desc, Disk):
        t = 2 * np.pi * np.arange(m) / m
        z = desc.center + desc.radius * np.exp(1j * t)
        return BoundaryGrid(z, np.zeros(m, int), t, desc,
                            np.full(m, 2 * np.pi * desc.radius / m), np.array([True]))
    if isinstance(desc, CircularArc):
        t = desc.alpha * cluster_nodes(m, p)
        t[0], t[-1] = -desc.alpha, desc.alpha
        return BoundaryGrid(np.exp(1j * t), np.zeros(m, int), t, desc, _arc_weights(t, 1.0),
                            np.array([False]))
    if isinstance(desc, Lemniscate):
        pts, comp, par, ncomp = _lemniscate_grid(desc, m)
        return BoundaryGrid(pts, comp, par, desc, None, np.ones(ncomp, bool))
    if isinstance(desc, GreenLevelSet):
        if len(desc.base.intervals) == 1:
            t = 2 * np.pi * np.arange(m) / m
            z = ellipse_point(desc.base, desc.level, t)
            return BoundaryGrid(z, np.zeros(m, int), t, desc, None, np.array([True]))
        from .potential import level_curves

        curves = level_curves(desc.base, desc.level, m)
        pts = np.concatenate(curves)
        comp = np.concatenate([np.full(len(c), j) for j, c in enumerate(curves)])
        par = np.concatenate([2 * np.pi * np.arange(len(c)) / len(c) for c in curves])
        return BoundaryGrid(pts, comp, par, desc, None, np.ones(len(curves), bool))
    if isinstance(desc, JordanPolyline):
        v = np.asarray(desc.vertices, dtype=complex)
        nv = len(v)
        edges = np.roll(v, -1) - v
        lengths = np.abs(edges)
        per = lengths.sum()
        counts = np.maximum(2, np.round(m * lengths / per).astype(int))
        pts, par = [], []
        start = 0.0
        for i in range(nv):
            s = (cluster_nodes(counts[i] + 1, p)[:-1] + 1) / 2
            pts.append(v[i] + s * edges[i])
            par.append(start + s * lengths[i])
            start += lengths[i]
        z = np.concatenate(pts)
        return BoundaryGrid(z, np.zeros(len(z), int), np.concatenate(par), desc, None,
                            np.array([True]))
    if isinstance(desc, PointGrid):
        z = np.asarray(desc.points, dtype=complex)
        return BoundaryGrid(z, np.zeros(len(z), int), np.arange(len(z), dtype=float), desc,
                            None, np.array([False]))
    raise SetError(f"cannot discretize {type(desc).__name__}")


def membership_residual(desc: SetDescriptor, z) -> np.ndarray:
    """Distance-like residual of the defining relation (0 on the set/boundary)."""
    z = np.asarray(z, dtype=complex)
    if isinstance(desc, IntervalUnion):
        x = z.real
        d = np.full(x.shape, np.inf)
        for a, b in desc.intervals:
            d = np.minimum(d, np.maximum(0, np.maximum(a - x, x - b)))
        return d + np.abs(z.imag)
    if isinstance(desc, Disk):
        return np.abs(np.abs(z - desc.center) - desc.radius)
    if isinstance(desc, CircularArc):
        return np.abs(np.abs(z) - 1) + np.maximum(0, np.abs(np.angle(z)) - desc.alpha)
    if isinstance(desc, Lemniscate):
        return np.abs(np.abs(desc.poly(z)) - desc.level)
    if isinstance(desc, GreenLevelSet):
        from .potential import green_eval, solve_finite_gap

        return np.abs(green_eval(solve_finite_gap(desc.base), z) - desc.level)
    if isinstance(desc, JordanPolyline):
        v = np.asarray(desc.vertices, dtype=complex)
        d = np.full(z.shape, np.inf)
        for a, b in zip(v, np.roll(v, -1)):
            e = b - a
            s = np.clip(((z - a) * np.conj(e)).real / abs(e) ** 2, 0, 1)
            d = np.minimum(d, np.abs(z - (a + s * e)))
        return d
    pts = np.asarray(desc.points, dtype=complex)
    return np.min(np.abs(z[..., None] - pts), axis=-1)


# ----------------------------------------------------------------------------
# local charts used by the continuous polish of the complex solver


@dataclass(frozen=True)
class Chart:
    """Local parametrization s -> z of the boundary near a point.

    ``lo``/``hi`` bound s (open arcs end there); ``fixed`` marks corner or
    end points where the extremum need not be stationary.
    """

    fn: Callable
    lo: float = -np.inf
    hi: float = np.inf
    fixed: bool = False

    def __call__(self, s):
        return self.fn(s)


def _implicit_chart(z0: complex, f: Callable, grad: Callable, level: float) -> Chart:
    g = grad(z0)
    nu = g / abs(g)  # normal direction (gradient of the real-valued level function)
    tau = 1j * nu

    def project(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        z = z0 + s * tau
        for _ in range(30):
            gz = grad(z)
            step = (f(z) - level) / np.abs(gz) ** 2 * gz
            z = z - step
            if np.max(np.abs(step)) < 1e-15:
                break
        return z

    def fn(s):
        h = 1e-6
        z = project(s)
        dz = (project(np.asarray(s) + h) - project(np.asarray(s) - h)) / (2 * h)
        return z, dz

    return Chart(fn)


def boundary_chart(grid: BoundaryGrid, i: int) -> Chart | None:
    """Chart of the grid's boundary curve centred at grid point ``i``.

    Returns None when the family has no continuous boundary (point grids).
    """
    desc = grid.desc
    t0 = float(grid.param[i])
    z0 = complex(grid.points[i])
    if isinstance(desc, IntervalUnion):
        a, b = desc.intervals[int(grid.component[i])]
        return Chart(lambda s: (t0 + np.asarray(s) + 0j, np.ones_like(np.asarray(s, float)) + 0j),
                     a - t0, b - t0, fixed=t0 in (a, b))
    if isinstance(desc, Disk):
        c, r = desc.center, desc.radius
        return Chart(lambda s: (c + r * np.exp(1j * (t0 + np.asarray(s))),
                                1j * r * np.exp(1j * (t0 + np.asarray(s)))))
    if isinstance(desc, CircularArc):
        al = desc.alpha
        return Chart(lambda s: (np.exp(1j * (t0 + np.asarray(s))),
                                1j * np.exp(1j * (t0 + np.asarray(s)))),
                     -al - t0, al - t0, fixed=abs(abs(t0) - al) < 1e-15)
    if isinstance(desc, GreenLevelSet) and len(desc.base.intervals) == 1:
        a, b = desc.base.intervals[0]
        mid, half, lv = (a + b) / 2, (b - a) / 2, desc.level
        return Chart(lambda s: (mid + half * np.cosh(lv + 1j * (t0 + np.asarray(s))),
                                1j * half * np.sinh(lv + 1j * (t0 + np.asarray(s)))))
    if isinstance(desc, Lemniscate):
        c = np.asarray(desc.coeffs, dtype=complex)
        dc = np.polynomial.polynomial.polyder(c)
        pv = np.polynomial.polynomial.polyval

        def f(z):
            return np.log(np.abs(pv(z, c)))

        def grad(z):
            # gradient of log|P| as a complex number: conj(P'/P)
            return np.conj(pv(z, dc) / pv(z, c))

        if abs(pv(z0, dc)) < 1e-8:
            return Chart(lambda s: (np.full(np.shape(s), z0), np.zeros(np.shape(s), complex)),
                         0.0, 0.0, fixed=True)
        return _implicit_chart(z0, f, grad, math.log(desc.level))
    if isinstance(desc, GreenLevelSet):
        from .potential import green_eval, green_gradient, solve_finite_gap

        pd = solve_finite_gap(desc.base)
        return _implicit_chart(z0, lambda z: green_eval(pd, z), lambda z: green_gradient(pd, z),
                               desc.level)
    if isinstance(desc, JordanPolyline):
        v = np.asarray(desc.vertices, dtype=complex)
        lengths = np.abs(np.roll(v, -1) - v)
        starts = np.concatenate([[0.0], np.cumsum(lengths)])
        e = int(np.searchsorted(starts, t0, side="right") - 1)
        e = min(e, len(v) - 1)
        u = (v[(e + 1) % len(v)] - v[e]) / lengths[e]
        lo, hi = starts[e] - t0, starts[e + 1] - t0
        return Chart(lambda s: (z0 + np.asarray(s) * u, np.full(np.shape(s), u)),
                     lo, hi, fixed=abs(lo) < 1e-14)
    return None


# ----------------------------------------------------------------------------
# convex hull


@dataclass(frozen=True, eq=False)
class Hull:
    """Convex hull as a segment (``kind == 'segment'``) or a CCW polygon.

    ``resolution`` bounds the Hausdorff distance between the returned
    polygon and the true hull of a curved set.
    """

    kind: str
    vertices: np.ndarray
    resolution: float = 0.0

    @property
    def interval(self) -> tuple[float, float]:
        return float(self.vertices[0].real), float(self.vertices[-1].real)

    def distance_outside(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        v = self.vertices
        if self.kind == "segment":
            a, b = v[0], v[-1]
            e = b - a
            s = np.clip(((z - a) * np.conj(e)).real / abs(e) ** 2, 0, 1)
            return np.abs(z - (a + s * e))
        inside = np.ones(z.shape, dtype=bool)
        d = np.full(z.shape, np.inf)
        for a, b in zip(v, np.roll(v, -1)):
            e = b - a
            cross = (e.real * (z - a).imag - e.imag * (z - a).real)
            inside &= cross >= 0
            s = np.clip(((z - a) * np.conj(e)).real / abs(e) ** 2, 0, 1)
            d = np.minimum(d, np.abs(z - (a + s * e)))
        return np.where(inside, 0.0, d)

    def contains(self, z, tol: float = 1e-9) -> np.ndarray:
        return self.distance_outside(z) <= tol + self.resolution


def _hull_of_points(z: np.ndarray, resolution: float) -> Hull:
    z = np.asarray(z, dtype=complex)
    xy = np.column_stack([z.real, z.imag])
    try:
        h = ConvexHull(xy)
        verts = z[h.vertices]
        area = 0.5 * sum((np.conj(a) * b).imag for a, b in zip(verts, np.roll(verts, -1)))
        if area < 0:
            verts = verts[::-1]
        return Hull("polygon", verts, resolution)
    except (QhullError, ValueError):
        c = z.mean()
        d = z - c
        k = int(np.argmax(np.abs(d)))
        u = d[k] / abs(d[k])
        proj = (d * np.conj(u)).real
        return Hull("segment", np.array([c + proj.min() * u, c + proj.max() * u]), resolution)


def convex_hull(desc: SetDescriptor, fine: int = 4096) -> Hull:
    """Convex hull of the set; curved families use a ``fine``-point sampling."""
    if isinstance(desc, IntervalUnion):
        a, b = desc.hull_endpoints
        return Hull("segment", np.array([a + 0j, b + 0j]))
    if isinstance(desc, JordanPolyline):
        return _hull_of_points(np.asarray(desc.vertices), 0.0)
    if isinstance(desc, PointGrid):
        return _hull_of_points(np.asarray(desc.points), 0.0)
    grid = discretize(desc, DiscretizationConfig(fine, 1.0))
    # bound the sagitta between neighbouring samples by the chord deviation of
    # each sample from the line through its two neighbours
    res = 0.0
    for comp in range(grid.n_components):
        z = grid.points[grid.component == comp]
        if grid.is_closed(comp):
            z = np.concatenate([z[-1:], z, z[:1]])
        p0, p1, p2 = z[:-2], z[1:-1], z[2:]
        e = p2 - p0
        dev = np.abs((e.real * (p1 - p0).imag - e.imag * (p1 - p0).real)) / np.maximum(np.abs(e), 1e-300)
        res = max(res, float(dev.max()) / 2)
    return _hull_of_points(grid.points, res)
