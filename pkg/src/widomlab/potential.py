"""Capacity, Green's function, equilibrium measure and related quantities.

Finite unions of intervals are handled by the classical ansatz: the
equilibrium density is |Q| / (pi sqrt|R|) where R is the band polynomial
and the monic gap polynomial Q is fixed by requiring its integral against
1/sqrt|R| to vanish over every gap.  Disks, circular arcs, lemniscates and
Green level sets of interval unions use closed forms.

Interval computations run in coordinates u normalised so that the convex
hull is [-1, 1]; results are mapped back at the boundary.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy import integrate
from scipy.optimize import brentq

from .errors import (
    BranchTrackingFailure,
    QuadratureUnderflow,
    SingularSystem,
    UnsupportedFamily,
    WeightVanishesEverywhere,
)
from .sets import (
    CircularArc,
    Disk,
    GreenLevelSet,
    IntervalUnion,
    JordanPolyline,
    Lemniscate,
    PointGrid,
    SetDescriptor,
    validate,
)

QUAD_START = 64
QUAD_CAP = 2 ** 16
QUAD_SWITCH = 2 ** 12  # beyond this the adaptive rule is cheaper
_POT_DIGITS = 18.5  # 2 N log(rho) >= 2 * this keeps quadrature error near eps


@dataclass(frozen=True, eq=False)
class PotentialData:
    """Potential-theoretic data of a set.

    For interval unions ``bands`` are the bands in original coordinates,
    ``q_cheb`` are Chebyshev coefficients (variable u = (x - mid)/half) of
    the gap polynomial, monic in u.  Other families only fill ``capacity``.
    """

    desc: SetDescriptor
    capacity: float
    bands: np.ndarray | None = None
    mid: float = 0.0
    half: float = 1.0
    q_cheb: np.ndarray | None = None
    critical_points: np.ndarray = field(default_factory=lambda: np.zeros(0))
    pw: float = 0.0
    harmonic: np.ndarray | None = None
    quad_pts: int = QUAD_START
    rule_pts: int = QUAD_START

    @property
    def n_gaps(self) -> int:
        return 0 if self.bands is None else len(self.bands) - 1

    @property
    def ubands(self) -> np.ndarray:
        return (self.bands - self.mid) / self.half

    @property
    def uedges(self) -> np.ndarray:
        return self.ubands.reshape(-1)

    @property
    def q_coeffs(self) -> np.ndarray:
        """Monomial coefficients (lowest first) of the monic gap polynomial in x."""
        if self.bands is None:
            return np.array([1.0])
        return np.polynomial.polynomial.polyfromroots(self.critical_points)

    @property
    def r_coeffs(self) -> np.ndarray:
        if self.bands is None:
            return np.array([1.0])
        return np.polynomial.polynomial.polyfromroots(self.bands.reshape(-1))

    def to_json(self) -> dict:
        out = {"capacity": self.capacity}
        if self.bands is not None:
            out.update(
                Q_coeffs=[float(c) for c in self.q_coeffs],
                bands=[[float(a), float(b)] for a, b in self.bands],
                critical_points=[float(c) for c in self.critical_points],
                pw_sum=self.pw,
                harmonic_measures=[float(h) for h in self.harmonic],
            )
        return out


# ----------------------------------------------------------------------------
# finite-gap sets


def _q_eval(pd_or_q, u):
    q = pd_or_q.q_cheb if isinstance(pd_or_q, PotentialData) else pd_or_q
    return C.chebval(u, q)


def _cheb_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    theta = (2 * np.arange(1, n + 1) - 1) * np.pi / (2 * n)
    return np.cos(theta), theta


def _interval_nodes(p: float, q: float, n: int) -> np.ndarray:
    x, _ = _cheb_nodes(n)
    return (p + q) / 2 + (q - p) / 2 * x


def _other_product(u: np.ndarray, edges: np.ndarray, skip: tuple[int, int]) -> np.ndarray:
    """|prod (u - e)| over all edges except the two indices in ``skip``."""
    out = np.ones_like(u)
    for i, e in enumerate(edges):
        if i not in skip:
            out = out * (u - e)
    return np.abs(out)


def _gap_matrix(edges: np.ndarray, g: int, n: int) -> np.ndarray:
    """Entries int_gap_j T_k / sqrt|R|, j < g, k <= g, by Gauss-Chebyshev with n nodes."""
    mat = np.empty((g, g + 1))
    for j in range(g):
        i0, i1 = 2 * j + 1, 2 * j + 2
        u = _interval_nodes(edges[i0], edges[i1], n)
        rt = np.sqrt(_other_product(u, edges, (i0, i1)))
        tk = C.chebvander(u, g)
        mat[j] = (np.pi / n) * (tk / rt[:, None]).sum(axis=0)
    return mat


def _adaptive_cheb_integral(p: float, q: float, edges: np.ndarray, skip: tuple[int, int],
                            g: int, weight=None) -> np.ndarray:
    """int_p^q T_k(u) weight(u) / sqrt|R(u)| du for k <= g, adaptively in the angle.

    Used when a neighbouring edge sits so close to [p, q] that the fixed
    Gauss-Chebyshev rule converges only algebraically.
    """
    def f(th):
        u = (p + q) / 2 + (q - p) / 2 * math.cos(th)
        val = C.chebvander(np.array([u]), g)[0] / math.sqrt(float(_other_product(np.array([u]), edges, skip)[0]))
        return val if weight is None else val * weight(u)

    val, err = integrate.quad_vec(f, 0.0, np.pi, epsabs=1e-15, epsrel=1e-13, limit=2000)
    if not np.all(np.isfinite(val)) or err > 1e-10 * max(1.0, float(np.max(np.abs(val)))):
        raise QuadratureUnderflow("adaptive gap integrals did not converge; bands nearly touch")
    return val


def _gap_matrix_adaptive(edges: np.ndarray, g: int) -> np.ndarray:
    mat = np.empty((g, g + 1))
    for j in range(g):
        i0, i1 = 2 * j + 1, 2 * j + 2
        mat[j] = _adaptive_cheb_integral(edges[i0], edges[i1], edges, (i0, i1), g)
    return mat


def _solve_gap_poly(edges: np.ndarray) -> tuple[np.ndarray, int]:
    g = len(edges) // 2 - 1
    if g == 0:
        return np.array([1.0]), QUAD_START
    n = QUAD_START
    prev = None
    while True:
        mat = _gap_matrix(edges, g, n)
        if prev is not None and np.max(np.abs(mat - prev)) <= 1e-14 * np.max(np.abs(mat)):
            break
        prev = mat
        n *= 2
        if n > QUAD_SWITCH:
            mat = _gap_matrix_adaptive(edges, g)
            n = QUAD_CAP
            break
    lead = 2.0 ** (1 - g)
    a, rhs = mat[:, :g], -lead * mat[:, g]
    if np.linalg.cond(a) > 1e13:
        raise SingularSystem("gap conditions are numerically dependent")
    q = np.empty(g + 1)
    q[:g] = np.linalg.solve(a, rhs)
    q[g] = lead
    return q, n


def _band_masses(edges: np.ndarray, q: np.ndarray, n: int) -> np.ndarray:
    l = len(edges) // 2
    out = np.empty(l)
    for j in range(l):
        u = _interval_nodes(edges[2 * j], edges[2 * j + 1], n)
        rt = np.sqrt(_other_product(u, edges, (2 * j, 2 * j + 1)))
        out[j] = np.mean(np.abs(C.chebval(u, q)) / rt)
    if abs(out.sum() - 1.0) > 1e-12:
        g = len(q) - 1
        for j in range(l):
            lo, hi = edges[2 * j], edges[2 * j + 1]
            vals = _adaptive_cheb_integral(lo, hi, edges, (2 * j, 2 * j + 1), g)
            out[j] = abs(float(vals @ q)) / np.pi
    return out


def _log_cap_u(edges: np.ndarray, roots: np.ndarray) -> float:
    """log of the capacity in u coordinates (hull [-1, 1])."""
    others = edges[:-1]
    big = 2.0

    def near(v):
        t = 1.0 + v * v
        return 2.0 * np.prod(t - roots) / math.sqrt(np.prod(t - others))

    def tail(v):
        w = v / big  # w = 1/t
        s = np.sum(np.log1p(-roots * w)) - 0.5 * np.sum(np.log1p(-edges * w))
        return math.expm1(s) / v

    i1, _ = integrate.quad(near, 0.0, math.sqrt(big - 1.0), epsabs=1e-15, epsrel=1e-13, limit=200)
    i2, _ = integrate.quad(tail, 0.0, 1.0, epsabs=1e-15, epsrel=1e-13, limit=200)
    return -(i1 - math.log(big) + i2)


@lru_cache(maxsize=256)
def _finite_gap_cached(intervals: tuple, quad_pts: int | None) -> PotentialData:
    desc = IntervalUnion(intervals)
    bands = desc.bands
    a, b = bands[0, 0], bands[-1, 1]
    mid, half = (a + b) / 2, (b - a) / 2
    edges = ((bands - mid) / half).reshape(-1)
    edges[0], edges[-1] = -1.0, 1.0
    q, n = _solve_gap_poly(edges)
    if quad_pts is not None:
        n = max(n, int(quad_pts))
    g = len(q) - 1
    roots = np.empty(g)
    for j in range(g):
        lo, hi = edges[2 * j + 1], edges[2 * j + 2]
        roots[j] = brentq(lambda u: C.chebval(u, q), lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    masses = _band_masses(edges, q, n)
    if abs(masses.sum() - 1.0) > 1e-9:
        raise QuadratureUnderflow(f"equilibrium mass {masses.sum()!r} differs from 1")
    cap = half * math.exp(_log_cap_u(edges, roots))
    rule = _rule_size(edges, q, n)
    pd = PotentialData(desc, cap, bands.copy(), mid, half, q, mid + half * roots, 0.0, masses, n, rule)
    if g:
        pw = float(np.sum(_green_path(pd, roots.astype(complex))))
        pd = PotentialData(desc, cap, bands.copy(), mid, half, q, mid + half * roots, pw, masses, n, rule)
    return pd


def _rule_size(edges: np.ndarray, q: np.ndarray, n: int) -> int:
    """Nodes per band for which the equilibrium rule integrates to 1 within 1e-13.

    A band edge just across a narrow gap slows this rule down far more than
    it slows the gap integrals.  QUAD_CAP means the rule is too slow; callers
    then integrate along a path instead.
    """
    l = len(edges) // 2
    while n <= QUAD_SWITCH:
        mass = 0.0
        for j in range(l):
            u = _interval_nodes(edges[2 * j], edges[2 * j + 1], n)
            rt = np.sqrt(_other_product(u, edges, (2 * j, 2 * j + 1)))
            mass += float(np.mean(np.abs(C.chebval(u, q)) / rt))
        if abs(mass - 1.0) <= 1e-13:
            return n
        n *= 2
    return QUAD_CAP


def solve_finite_gap(desc: IntervalUnion, quad_pts: int | None = None) -> PotentialData:
    """Equilibrium data of a finite union of intervals.

    ``quad_pts`` is a lower bound for the Gauss-Chebyshev nodes per band;
    the count is doubled until the gap integrals settle.
    """
    desc = validate(desc)
    return _finite_gap_cached(desc.intervals, quad_pts)


def equilibrium_density(pd: PotentialData, x) -> np.ndarray:
    """d rho / dx at real x (0 off the bands)."""
    x = np.asarray(x, dtype=float)
    u = (x - pd.mid) / pd.half
    r = np.ones_like(u)
    for e in pd.uedges:
        r = r * (u - e)
    inside = np.zeros(u.shape, dtype=bool)
    for lo, hi in pd.ubands:
        inside |= (u > lo) & (u < hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = np.abs(_q_eval(pd, u)) / (np.pi * np.sqrt(np.abs(r))) / pd.half
    return np.where(inside, dens, 0.0)


def _s_func(edges: np.ndarray, t: np.ndarray) -> np.ndarray:
    """prod sqrt(t - a_j) sqrt(t - b_j) with principal roots; analytic off the bands."""
    out = np.ones_like(t)
    for e in edges:
        out = out * np.sqrt(t - e)
    return out


def _green_path(pd: PotentialData, u: np.ndarray) -> np.ndarray:
    """G at u (normalised coordinates) by integrating Q/s from the nearest band edge."""
    edges = pd.uedges
    out = np.empty(len(u))
    for i, z in enumerate(u):
        k = int(np.argmin(np.abs(z - edges)))
        e = edges[k]
        d = z - e
        if abs(d) == 0.0:
            out[i] = 0.0
            continue
        others = np.delete(edges, k)
        rd = np.sqrt(d)

        # t = e + d v^2, so sqrt(t - e) = v sqrt(d) cancels against dt = 2 d v dv
        def f(v, d=d, e=e, others=others, rd=rd):
            t = e + d * v * v
            return (2.0 * rd * C.chebval(t, pd.q_cheb) / _s_func(others, np.asarray(t))).real

        # full_output silences quad's roundoff warnings; the estimate is checked instead
        val, err, *_ = integrate.quad(f, 0.0, 1.0, epsabs=1e-15, epsrel=1e-13, limit=400, full_output=1)
        if not err <= 1e-10 * max(1.0, abs(val)):
            raise BranchTrackingFailure(f"path integral for G at {z} did not converge (error {err:.1e})")
        out[i] = abs(val)
    return out


def _equilibrium_rule(pd: PotentialData, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (u coordinates) and weights of an n-point-per-band equilibrium quadrature."""
    edges = pd.uedges
    nodes, weights = [], []
    for j, (lo, hi) in enumerate(pd.ubands):
        u = _interval_nodes(lo, hi, n)
        rt = np.sqrt(_other_product(u, edges, (2 * j, 2 * j + 1)))
        nodes.append(u)
        weights.append(np.abs(C.chebval(u, pd.q_cheb)) / rt / n)
    return np.concatenate(nodes), np.concatenate(weights)


def _log_rho(pd: PotentialData, u: np.ndarray) -> np.ndarray:
    """Smallest Bernstein-ellipse parameter log over the bands for each point."""
    out = np.full(u.shape, np.inf)
    for lo, hi in pd.ubands:
        w = (u - (lo + hi) / 2) / ((hi - lo) / 2)
        r = np.sqrt(w - 1) * np.sqrt(w + 1)
        out = np.minimum(out, np.log(np.maximum(np.abs(w + r), np.abs(w - r))))
    return out


def _green_potential(pd: PotentialData, u: np.ndarray, n: int) -> np.ndarray:
    nodes, wts = _equilibrium_rule(pd, n)
    logs = np.log(np.abs(u[:, None] - nodes[None, :]))
    return logs @ wts - math.log(pd.capacity / pd.half)


def _green_interval_union(pd: PotentialData, z: np.ndarray) -> np.ndarray:
    u = (z - pd.mid) / pd.half
    out = np.zeros(u.shape)
    on_set = np.zeros(u.shape, dtype=bool)
    real = u.imag == 0
    for lo, hi in pd.ubands:
        on_set |= real & (u.real >= lo) & (u.real <= hi)
    rest = ~on_set
    if not rest.any():
        return out
    ur = u[rest]
    lr = _log_rho(pd, ur)
    need = np.maximum(pd.rule_pts, 2 ** np.ceil(np.log2(np.maximum(_POT_DIGITS / np.maximum(lr, 1e-300), 1))))
    vals = np.empty(len(ur))
    far = need <= 4096
    for nn in np.unique(need[far]):
        sel = far & (need == nn)
        vals[sel] = _green_potential(pd, ur[sel], int(nn))
    if (~far).any():
        vals[~far] = _green_path(pd, ur[~far])
    out[rest] = np.maximum(vals, 0.0)
    return out


def green_gradient(pd: PotentialData, z) -> np.ndarray:
    """Gradient of G as a complex number dG/dx + i dG/dy."""
    z = np.asarray(z, dtype=complex)
    desc = pd.desc
    if isinstance(desc, IntervalUnion):
        u = (z - pd.mid) / pd.half
        f = C.chebval(u, pd.q_cheb) / _s_func(pd.uedges, u)
        return np.conj(f) / pd.half
    if isinstance(desc, GreenLevelSet):
        return green_gradient(solve_finite_gap(desc.base), z)
    if isinstance(desc, Disk):
        d = z - desc.center
        return np.where(np.abs(d) > desc.radius, d / np.abs(d) ** 2, 0)
    if isinstance(desc, Lemniscate):
        c = np.asarray(desc.coeffs, dtype=complex)
        pv = np.polynomial.polynomial.polyval
        val = np.conj(pv(z, np.polynomial.polynomial.polyder(c)) / pv(z, c)) / desc.degree
        return np.where(np.abs(pv(z, c)) > desc.level, val, 0)
    raise UnsupportedFamily(f"no gradient for {type(desc).__name__}")


# ----------------------------------------------------------------------------
# closed forms


def arc_green(alpha: float, z) -> np.ndarray:
    """Green's function of the arc {e^{it}: |t| <= alpha}."""
    z = np.asarray(z, dtype=complex)
    ea = np.exp(1j * alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        m = -np.conj(ea) * (z - ea) / (z - np.conj(ea))
        zeta = 1j * np.sqrt(-m)
        z0 = np.exp(0.5j * (np.pi - alpha))
        g = np.log(np.abs((zeta - np.conj(z0)) / (zeta - z0)))
    g = np.where(np.isfinite(g), g, np.inf)
    g = np.where(z == np.conj(ea), np.inf, g)
    on_arc = (np.abs(np.abs(z) - 1) <= 1e-14) & (np.abs(np.angle(z)) <= alpha)
    return np.where(on_arc, 0.0, np.maximum(g, 0.0))


def arc_density(alpha: float, theta) -> np.ndarray:
    """Equilibrium density of the arc with respect to the angle (= arc length)."""
    s = math.sin(alpha / 2)
    th = np.asarray(theta, dtype=float)
    return np.cos(th / 2) / (2 * np.pi * np.sqrt(s * s - np.sin(th / 2) ** 2))


def potential_data(desc: SetDescriptor, quad_pts: int | None = None) -> PotentialData:
    """PotentialData for any family with a known capacity."""
    desc = validate(desc)
    if isinstance(desc, IntervalUnion):
        return solve_finite_gap(desc, quad_pts)
    if isinstance(desc, Disk):
        return PotentialData(desc, desc.radius)
    if isinstance(desc, CircularArc):
        return PotentialData(desc, math.sin(desc.alpha / 2))
    if isinstance(desc, Lemniscate):
        lead = abs(desc.coeffs[-1])
        return PotentialData(desc, (desc.level / lead) ** (1.0 / desc.degree))
    if isinstance(desc, GreenLevelSet):
        base = solve_finite_gap(desc.base, quad_pts)
        return PotentialData(desc, base.capacity * math.exp(desc.level))
    raise UnsupportedFamily(
        f"{type(desc).__name__} has no capacity formula; use the root-asymptotic estimate")


def capacity(desc: SetDescriptor) -> float:
    return potential_data(desc).capacity


def green_eval(pd: PotentialData, z) -> np.ndarray | float:
    """Green's function with pole at infinity; vectorised over z."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    desc = pd.desc
    if isinstance(desc, IntervalUnion):
        out = _green_interval_union(pd, z)
    elif isinstance(desc, Disk):
        out = np.maximum(np.log(np.abs(z - desc.center) / desc.radius), 0.0)
    elif isinstance(desc, CircularArc):
        out = arc_green(desc.alpha, z)
    elif isinstance(desc, Lemniscate):
        with np.errstate(divide="ignore"):
            out = np.maximum(np.log(np.abs(desc.poly(z)) / desc.level) / desc.degree, 0.0)
    elif isinstance(desc, GreenLevelSet):
        base = solve_finite_gap(desc.base)
        out = np.maximum(_green_interval_union(base, z) - desc.level, 0.0)
    else:
        raise UnsupportedFamily(f"no Green's function for {type(desc).__name__}")
    return float(out[0]) if scalar else out


def pw_sum(pd: PotentialData) -> float:
    """Sum of G over the gap critical points (0 for a single interval)."""
    return pd.pw


def harmonic_measures(pd: PotentialData) -> np.ndarray:
    if pd.harmonic is None:
        raise UnsupportedFamily("band harmonic measures need an interval union")
    return pd.harmonic.copy()


def critical_points_golden(pd: PotentialData, tol: float = 1e-10) -> np.ndarray:
    """Gap maximisers of G by golden-section search (slow, used as a cross-check)."""
    out = []
    phi = (math.sqrt(5) - 1) / 2
    for (_, b), (a, _) in zip(pd.bands[:-1], pd.bands[1:]):
        lo, hi = b, a
        x1, x2 = hi - phi * (hi - lo), lo + phi * (hi - lo)
        f1, f2 = green_eval(pd, x1), green_eval(pd, x2)
        while hi - lo > tol * (a - b):
            if f1 < f2:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + phi * (hi - lo)
                f2 = green_eval(pd, x2)
            else:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - phi * (hi - lo)
                f1 = green_eval(pd, x1)
        out.append((lo + hi) / 2)
    return np.array(out)


# ----------------------------------------------------------------------------
# equilibrium samples and the Szego functional


def equilibrium_samples(desc: SetDescriptor, n: int = 512) -> tuple[np.ndarray, np.ndarray]:
    """Points and weights (summing to 1) of a quadrature for the equilibrium measure."""
    desc = validate(desc)
    mid = (np.arange(n) + 0.5) / n
    if isinstance(desc, IntervalUnion):
        pd = solve_finite_gap(desc)
        u, w = _equilibrium_rule(pd, max(n // max(1, len(pd.bands)), min(pd.rule_pts, QUAD_SWITCH)))
        return (pd.mid + pd.half * u).astype(complex), w / w.sum()
    if isinstance(desc, Disk):
        t = 2 * np.pi * mid
        return desc.center + desc.radius * np.exp(1j * t), np.full(n, 1.0 / n)
    if isinstance(desc, CircularArc):
        phi = np.pi * (mid - 0.5)
        th = 2 * np.arcsin(math.sin(desc.alpha / 2) * np.sin(phi))
        return np.exp(1j * th), np.full(n, 1.0 / n)
    if isinstance(desc, Lemniscate):
        pts = _lemniscate_preimages(desc, 2 * np.pi * mid)
        k = desc.degree
        return pts.reshape(-1), np.full(n * k, 1.0 / (n * k))
    if isinstance(desc, GreenLevelSet):
        if len(desc.base.intervals) == 1:
            from .sets import ellipse_point

            return ellipse_point(desc.base, desc.level, 2 * np.pi * mid), np.full(n, 1.0 / n)
        curves = level_curves(desc.base, desc.level, n)
        base = solve_finite_gap(desc.base)
        pts, wts = [], []
        for c in curves:
            ds = np.abs(np.roll(c, -1) - np.roll(c, 1)) / 2
            pts.append(c)
            wts.append(np.abs(green_gradient(base, c)) * ds / (2 * np.pi))
        w = np.concatenate(wts)
        return np.concatenate(pts), w / w.sum()
    raise UnsupportedFamily(f"no equilibrium measure for {type(desc).__name__}")


def _lemniscate_preimages(desc: Lemniscate, phi: np.ndarray) -> np.ndarray:
    c = np.asarray(desc.coeffs, dtype=complex)
    out = np.empty((len(phi), desc.degree), dtype=complex)
    for i, p in enumerate(phi):
        cc = c.copy()
        cc[0] -= desc.level * np.exp(1j * p)
        out[i] = np.polynomial.polynomial.polyroots(cc)
    return out


@dataclass(frozen=True)
class Weight:
    """Nonnegative weight given by a vectorised function of complex z."""

    func: Callable[[np.ndarray], np.ndarray]
    name: str = "w"

    def __call__(self, z) -> np.ndarray:
        return np.asarray(self.func(np.asarray(z, dtype=complex)), dtype=float)

    def on_grid(self, grid) -> np.ndarray:
        vals = self(grid.points)
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise ValueError(f"weight {self.name} must be finite and nonnegative")
        return vals

    @classmethod
    def constant(cls, value: float = 1.0) -> "Weight":
        if value < 0:
            raise ValueError("weight must be nonnegative")
        return cls(lambda z: np.full(np.shape(z), float(value)), f"const({value:g})")

    @property
    def is_unit(self) -> bool:
        return self.name == "const(1)"


UNIT = Weight.constant(1.0)


def _quad(f, a, b):
    val, _ = integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-12, limit=500)
    return val


def szego_value(w: Weight, pd: PotentialData | SetDescriptor) -> float:
    """exp of the equilibrium average of log w; 0 (with a warning) if w vanishes on a positive-mass set."""
    desc = pd.desc if isinstance(pd, PotentialData) else validate(pd)
    pts, _ = equilibrium_samples(desc, 1024)
    vals = w(pts)
    if np.any(vals == 0):
        warnings.warn(f"weight {w.name} vanishes on a set of positive equilibrium measure",
                      WeightVanishesEverywhere, stacklevel=2)
        return 0.0

    def logw(z):
        with np.errstate(divide="ignore"):
            v = np.log(w(np.atleast_1d(z)))
        return np.where(np.isfinite(v), v, -745.0)

    if isinstance(desc, IntervalUnion):
        p = pd if isinstance(pd, PotentialData) else solve_finite_gap(desc)
        edges = p.uedges
        total = 0.0
        for j, (lo, hi) in enumerate(p.ubands):
            def f(th, lo=lo, hi=hi, j=j):
                u = (lo + hi) / 2 + (hi - lo) / 2 * math.cos(th)
                rt = math.sqrt(float(_other_product(np.array([u]), edges, (2 * j, 2 * j + 1))[0]))
                dens = abs(float(C.chebval(u, p.q_cheb))) / rt / np.pi
                return float(logw(p.mid + p.half * u)[0]) * dens
            total += _quad(f, 0.0, np.pi)
    elif isinstance(desc, Disk):
        total = _quad(lambda t: float(logw(desc.center + desc.radius * np.exp(1j * t))[0]),
                      0.0, 2 * np.pi) / (2 * np.pi)
    elif isinstance(desc, CircularArc):
        s = math.sin(desc.alpha / 2)
        total = _quad(lambda ph: float(logw(np.exp(2j * math.asin(s * math.sin(ph))))[0]),
                      -np.pi / 2, np.pi / 2) / np.pi
    elif isinstance(desc, Lemniscate):
        total = _quad(lambda ph: float(np.mean(logw(_lemniscate_preimages(desc, np.array([ph]))[0]))),
                      0.0, 2 * np.pi) / (2 * np.pi)
    elif isinstance(desc, GreenLevelSet) and len(desc.base.intervals) == 1:
        from .sets import ellipse_point

        total = _quad(lambda t: float(logw(ellipse_point(desc.base, desc.level, t))[0]),
                      0.0, 2 * np.pi) / (2 * np.pi)
    else:
        pts, wts = equilibrium_samples(desc, 4096)
        total = float(logw(pts) @ wts)
    return math.exp(total)


# ----------------------------------------------------------------------------
# level curves of the Green's function of an interval union


def level_curves(base: IntervalUnion, level: float, m: int) -> list[np.ndarray]:
    """Closed curves {G = level}, m points per curve, projected to ~1e-13."""
    import contourpy

    pd = solve_finite_gap(base)
    # outer radius estimate: G ~ log|u| + log(half/cap) at infinity
    rad = math.exp(level) * pd.half / pd.capacity * 2 + 1
    nx = 400
    xs = np.linspace(-rad, rad, nx)
    ys = np.linspace(-rad, rad, nx)
    xx, yy = np.meshgrid(xs, ys)
    uu = (xx + 1j * yy).ravel()
    gg = _green_potential(pd, uu, 128).reshape(xx.shape)
    gen = contourpy.contour_generator(xs, ys, gg)
    curves = []
    for line in gen.lines(level):
        zc = line[:, 0] + 1j * line[:, 1]
        if abs(zc[0] - zc[-1]) < 1e-9 * rad:
            zc = zc[:-1]
        seg = np.abs(np.diff(np.concatenate([zc, zc[:1]])))
        s = np.concatenate([[0.0], np.cumsum(seg)])
        target = np.linspace(0, s[-1], m, endpoint=False)
        zr = np.interp(target, s, np.concatenate([zc, zc[:1]]).real)
        zi = np.interp(target, s, np.concatenate([zc, zc[:1]]).imag)
        curves.append(_project_level(pd, pd.mid + pd.half * (zr + 1j * zi), level))
    curves.sort(key=lambda c: float(c.real.min()))
    return curves


def _project_level(pd: PotentialData, z: np.ndarray, level: float) -> np.ndarray:
    for _ in range(40):
        g = green_eval(pd, z)
        grad = green_gradient(pd, z)
        step = (g - level) * grad / np.abs(grad) ** 2
        z = z - step
        if np.max(np.abs(g - level)) < 1e-14:
            break
    return z
