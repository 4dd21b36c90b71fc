"""Zeros of Chebyshev polynomials and their distribution."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.integrate import trapezoid

from .cheb_complex import ComplexChebSolution, chebyshev_complex
from .cheb_real import ChebyshevSolution, chebyshev_real
from .errors import RootResidualTooLarge, TestPointInsideHull, UnsupportedFamily
from .potential import PotentialData, equilibrium_samples, green_eval, potential_data
from .sets import (
    CircularArc,
    DiscretizationConfig,
    Disk,
    GreenLevelSet,
    IntervalUnion,
    JordanPolyline,
    SetDescriptor,
    convex_hull,
    discretize,
    membership_residual,
    validate,
)

ROOT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ZeroMeasure:
    degree: int
    zeros: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.degree, 1.0 / self.degree)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def log_potential(self, z) -> np.ndarray:
        """(1/n) sum log|z - w_j|."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return np.log(np.abs(z[:, None] - self.zeros[None, :])).mean(axis=1)

    def to_csv_rows(self) -> list[tuple[float, float]]:
        return [(float(w.real), float(w.imag)) for w in self.zeros]


def _roots_real(sol: ChebyshevSolution) -> np.ndarray:
    u = C.chebroots(sol.cheb)
    d = C.chebder(sol.cheb)
    # Newton polish in the Chebyshev representation
    for _ in range(3):
        den = C.chebval(u, d)
        ok = np.abs(den) > 0
        u = np.where(ok, u - C.chebval(u, sol.cheb) / np.where(ok, den, 1.0), u)
    u = np.where(np.abs(u.imag) < 1e-12, u.real + 0j, u)
    return np.sort_complex(sol.mid + sol.half * u)


def _roots_complex(sol: ComplexChebSolution) -> np.ndarray:
    a = sol.zeta_coeffs
    cands = [sol.confederate_roots()]
    comp = np.roots(a[::-1])
    if len(comp) == sol.degree:
        cands.append(sol.center + sol.scale * comp)
    res = [float(np.max(np.abs(sol(r)))) if len(r) else 0.0 for r in cands]
    # the companion roots of chopped coefficients are exact for pure powers,
    # so they win whenever they are at roundoff level
    if len(cands) == 2 and res[1] <= max(res[0], 1e-13 * sol.norm):
        return np.sort_complex(cands[1])
    return np.sort_complex(cands[0])


def zeros_of(sol) -> ZeroMeasure:
    """Zeros in the solver's stable basis: colleague matrix for real solutions,
    the better of the Arnoldi (confederate) and balanced monomial companion
    matrices for complex ones."""
    if isinstance(sol, ChebyshevSolution):
        roots = _roots_real(sol)
        scale = sol.half
    elif isinstance(sol, ComplexChebSolution):
        roots = _roots_complex(sol)
        scale = sol.scale
    else:
        raise TypeError(f"cannot take zeros of {type(sol).__name__}")
    if len(roots) != sol.degree:
        raise RootResidualTooLarge(f"found {len(roots)} roots for degree {sol.degree}", roots)
    vals = np.abs(sol(roots))
    # a root perturbed by eps*scale moves T by about |T'| eps scale
    local = np.maximum(1.0, np.abs(sol.derivative(roots)) * scale / max(sol.norm, 1e-300))
    bad = vals > ROOT_TOL * sol.norm * local
    if np.any(bad):
        raise RootResidualTooLarge(f"{int(bad.sum())} roots have large residuals", roots[bad])
    return ZeroMeasure(sol.degree, roots)


def vieta_residual(zm: ZeroMeasure, sol) -> float:
    """Relative mismatch between the zero sum and minus the next-to-leading coefficient."""
    coef = complex(sol.coeffs[-2])
    return abs(zm.zeros.sum() + coef) / max(1.0, abs(coef))


@dataclass(frozen=True)
class HullReport:
    max_outside: float
    zeros_per_gap: tuple[int, ...]
    inside: bool
    gaps_ok: bool

    @property
    def passed(self) -> bool:
        return self.inside and self.gaps_ok


def hull_and_gap_check(zm: ZeroMeasure, desc: SetDescriptor, dilation: float = 1e-9) -> HullReport:
    desc = validate(desc)
    hull = convex_hull(desc)
    out = float(np.max(hull.distance_outside(zm.zeros))) if zm.degree else 0.0
    inside = out <= dilation + hull.resolution
    per_gap: tuple[int, ...] = ()
    if isinstance(desc, IntervalUnion):
        x = zm.zeros.real
        per_gap = tuple(int(np.sum((x > b) & (x < a)))
                        for (_, b), (a, _) in zip(desc.intervals[:-1], desc.intervals[1:]))
    return HullReport(out, per_gap, inside, all(k <= 1 for k in per_gap))


@dataclass(frozen=True)
class BalayageReport:
    max_discrepancy: float
    per_point: np.ndarray
    via_polynomial: np.ndarray | None = None

    @property
    def identity_gap(self) -> float | None:
        if self.via_polynomial is None:
            return None
        return float(np.max(np.abs(self.per_point - self.via_polynomial)))


def balayage_check(zm: ZeroMeasure, pd: PotentialData, test_pts, sol=None,
                   margin: float = 0.5) -> BalayageReport:
    """Max over test points of |(1/n) sum log|z - w_j| - (G(z) + log cap)|.

    With ``sol`` the same quantity is also computed as (1/n) log|T_n(z)|.
    """
    z = np.atleast_1d(np.asarray(test_pts, dtype=complex))
    hull = convex_hull(pd.desc)
    d = hull.distance_outside(z)
    if np.any(d < margin):
        raise TestPointInsideHull(f"test points must be at least {margin} outside the convex hull")
    target = green_eval(pd, z) + math.log(pd.capacity)
    vals = np.abs(zm.log_potential(z) - target)
    other = None
    if sol is not None:
        other = np.abs(np.log(np.abs(sol(z))) / zm.degree - target)
    return BalayageReport(float(vals.max()), vals, other)


def external_points(desc: SetDescriptor, count: int = 32, margin: float = 1.0) -> np.ndarray:
    """Points on a circle around the convex hull, at least ``margin`` outside it."""
    hull = convex_hull(validate(desc))
    v = hull.vertices
    c = v.mean()
    rad = float(np.max(np.abs(v - c))) + margin
    t = 2 * np.pi * (np.arange(count) + 0.5) / count
    return c + rad * np.exp(1j * t)


# ----------------------------------------------------------------------------
# experiments


def _cdf_distance(x: np.ndarray, ref: np.ndarray, ref_w: np.ndarray, lo: float, hi: float) -> float:
    """L2 distance between two distribution functions on [lo, hi]."""
    grid = np.linspace(lo, hi, 2001)
    f1 = np.searchsorted(np.sort(x), grid, side="right") / len(x)
    order = np.argsort(ref)
    cw = np.concatenate([[0.0], np.cumsum(ref_w[order])])
    f2 = cw[np.searchsorted(ref[order], grid, side="right")]
    return float(math.sqrt(trapezoid((f1 - f2) ** 2, grid)))


def _hist_distance(z: np.ndarray, ref: np.ndarray, ref_w: np.ndarray, bins: int = 24) -> tuple[float, dict]:
    allz = np.concatenate([z, ref])
    xr = (allz.real.min() - 1e-9, allz.real.max() + 1e-9)
    yr = (allz.imag.min() - 1e-9, allz.imag.max() + 1e-9)
    h1, xe, ye = np.histogram2d(z.real, z.imag, bins=bins, range=[xr, yr])
    h2, _, _ = np.histogram2d(ref.real, ref.imag, bins=bins, range=[xr, yr], weights=ref_w)
    h1 = h1 / max(h1.sum(), 1)
    return float(np.sqrt(np.sum((h1 - h2) ** 2))), {"counts": h1.tolist(), "x_edges": xe.tolist(),
                                                    "y_edges": ye.tolist()}


def _boundary_distance(desc: SetDescriptor, z: np.ndarray) -> np.ndarray:
    if isinstance(desc, Disk):
        return np.abs(np.abs(z - desc.center) - desc.radius)
    if isinstance(desc, JordanPolyline):
        return membership_residual(desc, z)
    pts = discretize(desc, DiscretizationConfig(2048)).points
    return np.min(np.abs(z[:, None] - pts[None, :]), axis=1)


def _skeleton_distance(desc: JordanPolyline, z: np.ndarray) -> np.ndarray:
    v = np.asarray(desc.vertices)
    c = v.mean()
    d = np.full(z.shape, np.inf)
    for a in v:
        e = a - c
        s = np.clip(((z - c) * np.conj(e)).real / abs(e) ** 2, 0, 1)
        d = np.minimum(d, np.abs(z - (c + s * e)))
    return d


@dataclass
class ExperimentReport:
    family: str
    kind: str
    rows: list = field(default_factory=list)
    assertions: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"family": self.family, "kind": self.kind, "rows": self.rows,
                "assertions": self.assertions}


def _family_kind(desc: SetDescriptor) -> str:
    if isinstance(desc, (IntervalUnion, CircularArc)):
        return "empty_interior"
    if isinstance(desc, (Disk, GreenLevelSet)):
        return "analytic_region"
    if isinstance(desc, JordanPolyline):
        v = np.asarray(desc.vertices)
        e = np.roll(v, -1) - v
        cross = (np.conj(e) * np.roll(e, -1)).imag
        return "convex_polygon" if np.all(cross >= 0) or np.all(cross <= 0) else "nonconvex_polygon"
    raise UnsupportedFamily(f"no zero experiment for {type(desc).__name__}")


def convergence_experiments(desc: SetDescriptor, n_list, grid_points: int = 1024,
                            tol: float = 1e-8) -> ExperimentReport:
    """Zero statistics per degree, with the assertions appropriate to the family."""
    desc = validate(desc)
    kind = _family_kind(desc)
    n_list = sorted(int(n) for n in n_list)
    if kind.endswith("polygon"):
        n_list = [n for n in n_list if n <= 25]
    pd = None
    ref = ref_w = None
    if kind != "convex_polygon" and kind != "nonconvex_polygon":
        pd = potential_data(desc)
        ref, ref_w = equilibrium_samples(desc, 4000)
    ext = external_points(desc, 32)
    grid = discretize(desc, DiscretizationConfig(grid_points))
    report = ExperimentReport(type(desc).__name__, kind)
    for n in n_list:
        if isinstance(desc, IntervalUnion):
            sol = chebyshev_real(desc, n)
        else:
            sol = chebyshev_complex(grid, n, tol=tol, refine_check=False)
        zm = zeros_of(sol)
        row = {"n": n, "zeros": [[float(w.real), float(w.imag)] for w in zm.zeros]}
        dist = _boundary_distance(desc, zm.zeros)
        row["boundary_distance"] = {"min": float(dist.min()), "mean": float(dist.mean()),
                                    "max": float(dist.max())}
        if pd is not None:
            bal = balayage_check(zm, pd, ext)
            row["potential_discrepancy"] = bal.max_discrepancy
            hd, hist = _hist_distance(zm.zeros, ref, ref_w)
            row["histogram_distance"] = hd
            row["histogram"] = hist
            if isinstance(desc, IntervalUnion):
                a, b = desc.hull_endpoints
                row["cdf_distance"] = _cdf_distance(zm.zeros.real, ref.real, ref_w, a, b)
        else:
            hd, hist = _hist_distance(zm.zeros, grid.points, np.full(len(grid), 1.0 / len(grid)))
            row["histogram"] = hist
        if kind == "convex_polygon":
            sk = _skeleton_distance(desc, zm.zeros)
            row["skeleton_distance_mean"] = float(sk.mean())
            row["boundary_distance_mean"] = float(dist.mean())
        report.rows.append(row)
    if kind == "empty_interior" and len(report.rows) >= 2:
        disc = [r["potential_discrepancy"] for r in report.rows]
        report.assertions["discrepancy_decreasing"] = bool(all(b <= a for a, b in zip(disc, disc[1:])))
        key = "cdf_distance" if isinstance(desc, IntervalUnion) else "histogram_distance"
        vals = [r[key] for r in report.rows]
        report.assertions[f"{key}_last_le_first"] = bool(vals[-1] <= vals[0])
    if isinstance(desc, Disk):
        gap = min(r["boundary_distance"]["min"] for r in report.rows)
        report.assertions["zero_free_annulus"] = bool(gap > 0.5 * desc.radius)
        report.assertions["annulus_width"] = gap
    elif kind == "analytic_region":
        gap = min(r["boundary_distance"]["min"] for r in report.rows)
        report.assertions["zero_free_annulus"] = bool(gap > 0)
        report.assertions["annulus_width"] = gap
    return report
