"""Remez exchange for Chebyshev polynomials on finite unions of real intervals.

Polynomials are kept in the Chebyshev basis of the convex hull mapped to
[-1, 1]: the working polynomial is p(u) = T_n(u) + sum_{k<n} c_k T_k(u) and
the monic polynomial in x equals ``scale * p(u)`` with
``scale = 2 (half / 2)^n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import Chebyshev, Polynomial
from scipy.optimize import brentq

from .errors import (
    BandExtractionFailure,
    BranchAmbiguity,
    CapacityMissing,
    NonConvergence,
    ReferenceCollapse,
)
from .potential import PotentialData, green_eval, solve_finite_gap
from .sets import IntervalUnion, validate

TOUCH_TOL = 1e-11
FLOOR_MAX = 1e-6  # worst acceptable roundoff floor of the leveling


@dataclass(frozen=True, eq=False)
class ChebyshevSolution:
    """Monic minimax polynomial of degree ``degree`` on an interval union.

    ``coeffs`` are monomial coefficients in x, lowest degree first, with
    ``coeffs[-1] == 1``.  They are for display and export; evaluation goes
    through the Chebyshev representation ``cheb`` on the hull.
    """

    desc: IntervalUnion
    degree: int
    cheb: np.ndarray
    mid: float
    half: float
    norm: float
    alternation: np.ndarray
    signs: np.ndarray
    iterations: int
    residual: float
    widom: float | None = None
    max_zeros_per_gap: int = 0
    history: list = field(default_factory=list)

    @property
    def scale(self) -> float:
        return 2.0 * (self.half / 2.0) ** self.degree

    @property
    def coeffs(self) -> np.ndarray:
        poly = Chebyshev(self.cheb, domain=[self.mid - self.half, self.mid + self.half])
        mono = poly.convert(kind=Polynomial).coef
        mono = mono / mono[-1]
        mono[-1] = 1.0
        return mono

    def __call__(self, z):
        u = (np.asarray(z) - self.mid) / self.half
        return self.scale * C.chebval(u, self.cheb)

    def derivative(self, z):
        u = (np.asarray(z) - self.mid) / self.half
        return self.scale / self.half * C.chebval(u, C.chebder(self.cheb))

    def with_widom(self, pd: PotentialData) -> "ChebyshevSolution":
        return _replace(self, widom=widom_factor(self, pd))

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "coeffs": [float(c) for c in self.coeffs],
            "norm": self.norm,
            "alternation": [float(x) for x in self.alternation],
            "widom_factor": self.widom,
            "residual": self.residual,
        }


def _replace(sol, **kw):
    from dataclasses import replace

    return replace(sol, **kw)


def _initial_reference(ubands: np.ndarray, masses: np.ndarray, n: int) -> np.ndarray:
    l = len(ubands)
    counts = np.zeros(l, dtype=int)
    counts[0] += 1
    counts[-1] += 1
    rest = n + 1 - counts.sum()
    if rest > 0:
        quota = masses * (n + 1) - counts
        quota = np.maximum(quota, 0)
        if quota.sum() > 0:
            quota = quota * rest / quota.sum()
        base = np.floor(quota).astype(int)
        counts += base
        left = rest - base.sum()
        order = np.argsort(-(quota - base), kind="stable")
        counts[order[:left]] += 1
    pts = []
    for j, (lo, hi) in enumerate(ubands):
        k = counts[j]
        if k == 0:
            continue
        if k == 1:
            pts.append(lo if j == 0 else (hi if j == l - 1 else (lo + hi) / 2))
            continue
        t = np.cos(np.pi * np.arange(k)[::-1] / (k - 1))
        pts.extend((lo + hi) / 2 + (hi - lo) / 2 * t)
    pts = np.array(sorted(pts))
    if len(pts) == 1:
        return pts
    pts[0], pts[-1] = -1.0, 1.0
    return pts


def _level_solve(ref: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    v = C.chebvander(ref, n)
    a = np.empty((n + 1, n + 1))
    a[:, :n] = v[:, :n]
    a[:, n] = (-1.0) ** np.arange(n + 1)
    sol = np.linalg.solve(a, -v[:, n])
    coef = np.append(sol[:n], 1.0)
    return coef, sol[n]


def _candidates(coef: np.ndarray, ubands: np.ndarray) -> np.ndarray:
    dcoef = C.chebder(coef)
    if len(dcoef) > 1:
        r = C.chebroots(dcoef)
        r = r[np.abs(r.imag) < 1e-6].real
        # one Newton step on p' sharpens eigenvalue roots
        d2 = C.chebder(dcoef)
        if len(d2):
            den = C.chebval(r, d2)
            ok = np.abs(den) > 1e-300
            r = np.where(ok, r - C.chebval(r, dcoef) / np.where(ok, den, 1.0), r)
    else:
        r = np.zeros(0)
    out = [ubands.reshape(-1)]
    for lo, hi in ubands:
        out.append(r[(r > lo) & (r < hi)])
    return np.unique(np.concatenate(out))


def _alternating_subset(x: np.ndarray, v: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray] | None:
    """Keep sign-alternating local extremes, then trim to m points keeping the largest."""
    keep_x, keep_v = [x[0]], [v[0]]
    for xi, vi in zip(x[1:], v[1:]):
        if np.sign(vi) == np.sign(keep_v[-1]):
            if abs(vi) > abs(keep_v[-1]):
                keep_x[-1], keep_v[-1] = xi, vi
        else:
            keep_x.append(xi)
            keep_v.append(vi)
    while len(keep_x) > m:
        if abs(keep_v[0]) < abs(keep_v[-1]):
            keep_x.pop(0)
            keep_v.pop(0)
        else:
            keep_x.pop()
            keep_v.pop()
    if len(keep_x) < m:
        return None
    return np.array(keep_x), np.array(keep_v)


def _single_exchange(ref: np.ndarray, coef: np.ndarray, xnew: float) -> np.ndarray:
    """Classical one-point exchange preserving sign alternation."""
    vals = C.chebval(ref, coef)
    vnew = C.chebval(xnew, coef)
    ref = ref.copy()
    k = np.searchsorted(ref, xnew)
    if k == 0:
        if np.sign(vals[0]) == np.sign(vnew):
            ref[0] = xnew
        else:
            ref = np.concatenate([[xnew], ref[:-1]])
    elif k == len(ref):
        if np.sign(vals[-1]) == np.sign(vnew):
            ref[-1] = xnew
        else:
            ref = np.concatenate([ref[1:], [xnew]])
    else:
        if np.sign(vals[k - 1]) == np.sign(vnew):
            ref[k - 1] = xnew
        else:
            ref[k] = xnew
    return ref


def chebyshev_real(desc: IntervalUnion, n: int, tol: float = 1e-10,
                   maxiter: int = 100) -> ChebyshevSolution:
    """Monic Chebyshev polynomial of degree n on a finite union of intervals."""
    desc = validate(desc)
    if not isinstance(desc, IntervalUnion):
        raise TypeError("chebyshev_real needs an IntervalUnion")
    if n < 1:
        raise ValueError("degree must be >= 1")
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-13, 1e-6]")
    pd = solve_finite_gap(desc)
    ubands = pd.ubands
    ubands[0, 0], ubands[-1, 1] = -1.0, 1.0
    ref = _initial_reference(ubands, pd.harmonic, n)
    history = []
    restarts = 0
    rng = np.random.default_rng(12345)
    it = 0
    residual = np.inf
    while True:
        it += 1
        if it > maxiter:
            raise NonConvergence(f"Remez did not level within {maxiter} iterations "
                                 f"(residual {residual:.3e})")
        if np.any(np.diff(ref) <= 1e-15):
            if restarts >= 3:
                raise ReferenceCollapse("reference points merged repeatedly")
            restarts += 1
            ref = _initial_reference(ubands, pd.harmonic, n)
            ref[1:-1] += 1e-3 * rng.standard_normal(len(ref) - 2) / (n + 1)
            ref = np.clip(np.sort(ref), -1, 1)
        coef, h = _level_solve(ref, n)
        cand = _candidates(coef, ubands)
        vals = C.chebval(cand, coef)
        big = np.max(np.abs(vals))
        picked = _alternating_subset(cand, vals, n + 1)
        if picked is None:
            ref = _single_exchange(ref, coef, cand[np.argmax(np.abs(vals))])
            history.append((it, abs(h), big, np.inf))
            continue
        ref, rv = picked
        lvl = np.abs(rv)
        residual = (lvl.max() - lvl.min()) / lvl.max()
        history.append((it, abs(h), big, residual))
        # evaluating p where it is tiny compared with its coefficients loses
        # digits; below this floor the leveling cannot improve
        floor = 4 * np.finfo(float).eps * np.abs(coef).sum() / lvl.max()
        if floor > FLOOR_MAX:
            raise NonConvergence(f"degree {n} is too ill-conditioned in double precision on this set "
                                 f"(attainable leveling {floor:.1e})")
        eff = max(tol, floor)
        if residual <= eff and lvl.max() >= big * (1 - eff):
            break
    coef, _ = _level_solve(ref, n)
    cand = _candidates(coef, ubands)
    vals = C.chebval(cand, coef)
    unorm = float(np.max(np.abs(vals)))
    rv = C.chebval(ref, coef)
    lvl = np.abs(rv)
    residual = float((lvl.max() - lvl.min()) / lvl.max())
    scale = 2.0 * (pd.half / 2.0) ** n
    roots = C.chebroots(coef)
    per_gap = 0
    for (_, b), (a, _) in zip(ubands[:-1], ubands[1:]):
        per_gap = max(per_gap, int(np.sum((np.abs(roots.imag) < 1e-8) & (roots.real > b) & (roots.real < a))))
    sol = ChebyshevSolution(
        desc, n, coef, pd.mid, pd.half, scale * unorm, pd.mid + pd.half * ref,
        np.sign(rv).astype(int), it, residual, None, per_gap, history)
    return _replace(sol, widom=widom_factor(sol, pd))


def widom_factor(sol, pd: PotentialData | None) -> float:
    """Norm divided by capacity^n."""
    if pd is None or not (pd.capacity > 0):
        raise CapacityMissing("a positive capacity is needed for the Widom factor")
    return float(sol.norm / pd.capacity ** sol.degree)


# ----------------------------------------------------------------------------
# period-n sets


@dataclass(frozen=True, eq=False)
class PeriodSetData:
    """The set where |T_n| <= ||T_n||, split into n bands."""

    sol: ChebyshevSolution
    bands: np.ndarray
    touching: np.ndarray
    capacity: float

    @property
    def degree(self) -> int:
        return self.sol.degree

    @property
    def delta_coeffs(self) -> np.ndarray:
        """Monomial coefficients of 2 T_n / ||T_n||."""
        return 2.0 * self.sol.coeffs / self.sol.norm

    @property
    def merged(self) -> IntervalUnion:
        return validate(IntervalUnion(tuple((float(a), float(b)) for a, b in self.bands)))

    def delta(self, z):
        return 2.0 * self.sol(z) / self.sol.norm

    def delta_horner(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self.delta_coeffs[::-1]:
            out = out * z + c
        return out

    def green(self, z):
        """log of the larger root modulus of B^2 - Delta B + 1, divided by n."""
        w = np.asarray(self.delta(np.asarray(z, dtype=complex)), dtype=complex) / 2
        r = np.sqrt(w - 1) * np.sqrt(w + 1)
        big = np.where(np.abs(w + r) >= np.abs(w - r), w + r, w - r)
        return np.maximum(np.log(np.abs(big)), 0.0) / self.degree

    def density(self, x):
        x = np.asarray(x, dtype=float)
        d = self.delta(x)
        dp = 2.0 * self.sol.derivative(x) / self.sol.norm
        with np.errstate(invalid="ignore", divide="ignore"):
            val = np.abs(dp) / (np.pi * self.degree * np.sqrt(np.maximum(4 - d * d, 0.0)))
        inside = np.zeros(x.shape, dtype=bool)
        for a, b in self.bands:
            inside |= (x > a) & (x < b)
        return np.where(inside & np.isfinite(val), val, 0.0)

    def band_masses(self, tol: float = 1e-13) -> np.ndarray:
        """rho_n mass of each band by Gauss-Chebyshev quadrature with doubling."""
        out = []
        for a, b in self.bands:
            m, h = (a + b) / 2, (b - a) / 2
            prev = None
            k = 64
            while True:
                t = (2 * np.arange(1, k + 1) - 1) * np.pi / (2 * k)
                x = m + h * np.cos(t)
                val = float(np.mean(self.density(x) * h * np.sin(t)) * np.pi)
                if prev is not None and abs(val - prev) <= tol or k >= 2 ** 15:
                    break
                prev = val
                k *= 2
            out.append(val)
        return np.array(out)


def build_period_set(sol: ChebyshevSolution) -> PeriodSetData:
    """Bands of the preimage of [-||T||, ||T||] under a converged T_n."""
    n = sol.degree
    coef = sol.cheb
    level = sol.norm / sol.scale
    d = C.chebder(coef)
    if n > 1:
        crit = C.chebroots(d)
        if np.max(np.abs(crit.imag)) > 1e-6 or np.any(np.abs(crit.real) > 1 + 1e-9):
            raise BandExtractionFailure("critical points of T_n are not all real inside the hull")
        crit = np.sort(crit.real)
        d2 = C.chebder(d)
        for _ in range(2):
            den = C.chebval(crit, d2)
            crit = crit - C.chebval(crit, d) / np.where(den == 0, 1.0, den)
    else:
        crit = np.zeros(0)
    knots = np.concatenate([[-1.0], crit, [1.0]])
    cvals = C.chebval(crit, coef)
    # interior alternation points are only leveled to the solver residual
    touch = np.abs(cvals) <= level * (1 + max(TOUCH_TOL, 4 * sol.residual))

    def edge(lo, hi, target):
        f = lambda u: C.chebval(u, coef) - target
        flo, fhi = f(lo), f(hi)
        if flo == 0:
            return lo
        if fhi == 0:
            return hi
        if np.sign(flo) == np.sign(fhi):
            raise BandExtractionFailure(f"no crossing of level {target:g} in [{lo:g}, {hi:g}]")
        return brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)

    bands = []
    for j in range(n):
        lo, hi = knots[j], knots[j + 1]
        if j == 0:
            a = -1.0
        elif touch[j - 1]:
            a = crit[j - 1]
        else:
            a = edge(lo, hi, np.sign(cvals[j - 1]) * level)
        if j == n - 1:
            b = 1.0
        elif touch[j]:
            b = crit[j]
        else:
            b = edge(lo, hi, np.sign(cvals[j]) * level)
        bands.append((a, b))
    ub = np.array(bands)
    if np.any(ub[:, 1] <= ub[:, 0]) or np.any(ub[1:, 0] < ub[:-1, 1]):
        raise BandExtractionFailure("extracted bands are not ordered")
    cap = (sol.norm / 2.0) ** (1.0 / n)
    return PeriodSetData(sol, sol.mid + sol.half * ub, touch.copy(), cap)


@dataclass(frozen=True)
class KeyFormulaResidual:
    formula: float
    modulus: float
    b_modulus: float
    green: float


def key_formula_check(ps: PeriodSetData, sol: ChebyshevSolution, z: complex,
                      pd: PotentialData | None = None) -> KeyFormulaResidual:
    """Compare 2T_n/||T_n|| with B^n + B^-n and |B| with exp(-G) at a point off the bands.

    B^n is the root of modulus < 1 of X^2 - Delta X + 1 with Delta evaluated
    by Horner from monomial coefficients; the left side uses the Chebyshev
    representation, and G comes from the finite-gap solver on the bands
    (``pd``, computed if omitted).
    """
    z = complex(z)
    n = sol.degree
    lhs = complex(2.0 * sol(z) / sol.norm)
    w = complex(ps.delta_horner(z)) / 2
    if abs(w * w - 1) < 1e-10:
        raise BranchAmbiguity(f"z = {z} is too close to a band edge")
    r = np.sqrt(w - 1) * np.sqrt(w + 1)
    big = w + r if abs(w + r) >= abs(w - r) else w - r
    small = 1.0 / big
    rhs = small + big
    if pd is None:
        pd = solve_finite_gap(ps.merged)
    g = float(green_eval(pd, z))
    bmod = abs(small) ** (1.0 / n)
    return KeyFormulaResidual(abs(lhs - rhs), abs(bmod - math.exp(-g)), bmod, g)
