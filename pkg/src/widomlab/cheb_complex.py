"""Weighted complex Chebyshev polynomials on sampled planar sets.

The polynomial space is spanned by a discrete orthonormal basis built by
Arnoldi orthogonalisation on the grid (coordinates shifted and scaled to
the unit disk), which stays well conditioned where monomials do not.  The
minimax problem is solved in two stages:

1. Lawson iteration: weighted least squares with weights multiplied by the
   current error modulus.  The weighted least-squares error is a lower
   bound for the minimax value, so ``(upper - lower) / upper`` is a
   duality-gap certificate.
2. Newton polish on the optimality (KKT) system of the active points,
   with non-corner points free to slide along the boundary; the active set
   is corrected by an exchange loop (drop points with negative multiplier,
   add points where the error exceeds the level).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import least_squares

from .errors import ConfigTooCoarse, NonConvergence, RankDeficiency, UnsupportedFamily
from .potential import UNIT, PotentialData, Weight, green_eval, potential_data
from .sets import (
    BoundaryGrid,
    Chart,
    CircularArc,
    DiscretizationConfig,
    PointGrid,
    boundary_chart,
    discretize,
    refine,
    validate,
)

CHOP = 1e-13


# ----------------------------------------------------------------------------
# Arnoldi basis


def arnoldi(zeta: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Discrete orthonormal basis Q (M x (n+1)) and Hessenberg H ((n+1) x n)."""
    m = len(zeta)
    q = np.zeros((m, n + 1), dtype=complex)
    h = np.zeros((n + 1, n), dtype=complex)
    q[:, 0] = 1.0
    for k in range(n):
        v = zeta * q[:, k]
        for _ in range(2):
            c = q[:, : k + 1].conj().T @ v / m
            v = v - q[:, : k + 1] @ c
            h[: k + 1, k] += c
        h[k + 1, k] = np.linalg.norm(v) / math.sqrt(m)
        if h[k + 1, k].real < 1e-13:
            raise RankDeficiency(f"grid supports only {k + 1} independent polynomials")
        q[:, k + 1] = v / h[k + 1, k]
    return q, h


def basis_eval(zeta, h: np.ndarray, deriv: bool = False):
    """Evaluate the Arnoldi basis (and optionally its derivative) at new points."""
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    n = h.shape[1]
    q = np.zeros((len(zeta), n + 1), dtype=complex)
    q[:, 0] = 1.0
    d = np.zeros_like(q) if deriv else None
    for k in range(n):
        v = zeta * q[:, k] - q[:, : k + 1] @ h[: k + 1, k]
        q[:, k + 1] = v / h[k + 1, k]
        if deriv:
            dv = q[:, k] + zeta * d[:, k] - d[:, : k + 1] @ h[: k + 1, k]
            d[:, k + 1] = dv / h[k + 1, k]
    return (q, d) if deriv else q


def basis_to_monomial(h: np.ndarray) -> list[np.ndarray]:
    """Monomial coefficients (in the scaled variable) of every basis polynomial."""
    n = h.shape[1]
    polys = [np.array([1.0 + 0j])]
    for k in range(n):
        v = np.concatenate([[0.0], polys[k]])
        for j in range(k + 1):
            v[: len(polys[j])] -= h[j, k] * polys[j]
        polys.append(v / h[k + 1, k])
    return polys


@dataclass(frozen=True, eq=False)
class ComplexChebSolution:
    """Monic weighted minimax polynomial on a grid.

    The polynomial is ``scale**n * (gamma q_n + sum c_k q_k)(zeta)`` with
    ``zeta = (z - center)/scale`` and ``gamma = prod H[k+1, k]``.
    """

    degree: int
    center: complex
    scale: float
    h: np.ndarray
    c: np.ndarray
    norm: float
    grid_norm: float
    lower: float
    active: np.ndarray
    multipliers: np.ndarray
    iterations: int
    polish_iterations: int
    gap: float
    refinement_delta: float
    weight: str = "const(1)"
    widom: float | None = None
    notes: list = field(default_factory=list)

    @property
    def gamma(self) -> complex:
        return complex(np.prod(np.diag(self.h, -1)))

    @property
    def full_coeffs(self) -> np.ndarray:
        return np.append(self.c, self.gamma)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        q = basis_eval((z.ravel() - self.center) / self.scale, self.h)
        val = (q @ self.full_coeffs) * self.scale ** self.degree
        return val.reshape(z.shape)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        _, d = basis_eval((z.ravel() - self.center) / self.scale, self.h, deriv=True)
        val = (d @ self.full_coeffs) * self.scale ** (self.degree - 1)
        return val.reshape(z.shape)

    @property
    def zeta_coeffs(self) -> np.ndarray:
        """Monic monomial coefficients in the scaled variable (lowest first), chopped."""
        polys = basis_to_monomial(self.h)
        out = np.zeros(self.degree + 1, dtype=complex)
        for ck, pk in zip(self.full_coeffs, polys):
            out[: len(pk)] += ck * pk
        out = out / out[-1]
        out[np.abs(out) < CHOP * np.abs(out).max()] = 0
        out[-1] = 1.0
        return out

    @property
    def coeffs(self) -> np.ndarray:
        """Monic monomial coefficients in z, lowest first (display only; ill-conditioned for large n)."""
        a = self.zeta_coeffs
        n = self.degree
        out = np.zeros(n + 1, dtype=complex)
        shift = np.array([-self.center / self.scale, 1.0 / self.scale])
        powk = np.array([1.0 + 0j])
        for k in range(n + 1):
            out[: len(powk)] += a[k] * powk
            powk = np.polynomial.polynomial.polymul(powk, shift)
        out = out * self.scale ** n
        out[np.abs(out) < CHOP * np.abs(out).max()] = 0
        out[-1] = 1.0
        return out

    def confederate_roots(self) -> np.ndarray:
        n = self.degree
        h = self.h
        d = self.c / self.gamma
        mat = h[:n, :n].copy()
        mat[:, n - 1] -= h[n, n - 1] * d
        return self.center + self.scale * np.linalg.eigvals(mat)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
            "norm": self.norm,
            "grid_norm": self.grid_norm,
            "lower_bound": self.lower,
            "active": [[float(z.real), float(z.imag)] for z in self.active],
            "widom_factor": self.widom,
            "duality_gap": self.gap,
            "refinement_delta": self.refinement_delta,
            "iterations": self.iterations,
        }


# ----------------------------------------------------------------------------
# Lawson stage


def _lawson(a: np.ndarray, b: np.ndarray, wts: np.ndarray, lam: np.ndarray, iters: int,
            tol: float):
    """Minimise max |w (A c - b)|; returns c, lam, |r|, upper, lower, iterations."""
    wa = wts[:, None] * a
    wb = wts * b
    it = 0
    for it in range(1, iters + 1):
        sq = np.sqrt(lam)
        c, *_ = np.linalg.lstsq(sq[:, None] * wa, sq * wb, rcond=None)
        r = np.abs(wa @ c - wb)
        upper = r.max()
        lower = math.sqrt(float(lam @ r ** 2))
        if upper == 0 or (upper - lower) <= tol * upper:
            break
        lam = lam * r / upper
        lam = lam / lam.sum()
    return c, lam, r, upper, lower, it


def _local_maxima(vals: np.ndarray, grid: BoundaryGrid, idx: np.ndarray, thresh: float) -> np.ndarray:
    """Indices (into the full grid) of local maxima of vals along each component."""
    out = []
    comp = grid.component[idx]
    for k in np.unique(comp):
        sel = np.nonzero(comp == k)[0]
        v = vals[sel]
        if len(v) == 1:
            cand = np.array([0])
        elif grid.is_closed(int(k)):
            cand = np.nonzero((v >= np.roll(v, 1)) & (v >= np.roll(v, -1)))[0]
        else:
            left = np.concatenate([[-np.inf], v[:-1]])
            right = np.concatenate([v[1:], [-np.inf]])
            cand = np.nonzero((v >= left) & (v >= right))[0]
        if isinstance(grid.desc, PointGrid):
            cand = np.arange(len(v))
        cand = cand[v[cand] >= thresh]
        out.extend(idx[sel[cand]])
    return np.array(sorted(out), dtype=int)


# ----------------------------------------------------------------------------
# Newton polish on the KKT system


@dataclass
class _Active:
    chart: Chart | None
    z0: complex
    s: float = 0.0
    fixed: bool = True


def _point(act: _Active, s: float):
    if act.chart is None or act.fixed:
        return act.z0, 0j
    z, dz = act.chart(np.array([s]))
    return complex(np.ravel(z)[0]), complex(np.ravel(dz)[0])


class _KKT:
    def __init__(self, acts, h, center, scale, weight: Weight, e0: float):
        self.acts = acts
        self.h = h
        self.n = h.shape[1]
        self.center = center
        self.scale = scale
        self.weight = weight
        self.e0 = e0
        self.gamma = complex(np.prod(np.diag(h, -1)))
        self.free = np.array([not a.fixed for a in acts], dtype=bool)

    def unpack(self, x):
        n, nf = self.n, int(self.free.sum())
        c = (x[:n] + 1j * x[n:2 * n]) * self.e0
        e = x[2 * n]
        s = x[2 * n + 1: 2 * n + 1 + nf]
        lam = x[2 * n + 1 + nf:]
        return c, e, s, lam

    def residuals(self, c, s):
        """r_j (normalised), dr_j/ds and basis rows at the active points."""
        zs, dzs = [], []
        fi = 0
        for a in self.acts:
            if a.fixed:
                z, dz = _point(a, 0.0)
            else:
                z, dz = _point(a, s[fi])
                fi += 1
            zs.append(z)
            dzs.append(dz)
        zs = np.array(zs)
        dzs = np.array(dzs)
        q, d = basis_eval((zs - self.center) / self.scale, self.h, deriv=True)
        full = np.append(c, self.gamma)
        p = q @ full
        dp = (d @ full) * dzs / self.scale
        w = self.weight(zs)
        if self.weight.is_unit:
            dw = np.zeros(len(zs))
        else:
            dw = np.zeros(len(zs))
            fi = 0
            hh = 1e-3
            for j, a in enumerate(self.acts):
                if not a.fixed:
                    ws = [float(self.weight(np.array([_point(a, s[fi] + k * hh)[0]]))[0])
                          for k in (-2, -1, 1, 2)]
                    dw[j] = (ws[0] - 8 * ws[1] + 8 * ws[2] - ws[3]) / (12 * hh)
                    fi += 1
        r = w * p / self.e0
        dr = (dw * p + w * dp) / self.e0
        return r, dr, w[:, None] * q[:, : self.n], zs

    def __call__(self, x):
        c, e, s, lam = self.unpack(x)
        r, dr, qa, _ = self.residuals(c, s)
        f1 = np.abs(r) ** 2 - e ** 2
        f2 = 2 * np.real(np.conj(r) * dr)[self.free]
        f3 = (lam * np.conj(r)) @ qa
        return np.concatenate([f1, f2, f3.real, f3.imag, [lam.sum() - 1.0]])


def _fd_jacobian(fun, x):
    # central differences: near-flat maxima need curvature resolved below 1e-7
    jac = None
    for j in range(len(x)):
        hh = 1e-5 * max(1.0, abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += hh
        xm[j] -= hh
        col = (fun(xp) - fun(xm)) / (2 * hh)
        if jac is None:
            jac = np.empty((len(col), len(x)))
        jac[:, j] = col
    return jac


def _newton(fun: _KKT, x: np.ndarray, maxit: int = 12) -> tuple[np.ndarray, int, float]:
    """Levenberg-Marquardt to get close, then plain Newton steps while they help."""
    ls = least_squares(fun, x, jac=lambda y: _fd_jacobian(fun, y), method="lm", xtol=1e-12,
                       ftol=1e-12, gtol=1e-12, max_nfev=200)
    x = ls.x
    f = fun(x)
    res = float(np.abs(f).max())
    it = 0
    for it in range(1, maxit + 1):
        if res < 1e-15:
            break
        step = np.linalg.lstsq(_fd_jacobian(fun, x), f, rcond=None)[0]
        xn = x - step
        fn = fun(xn)
        rn = float(np.abs(fn).max())
        if not rn < res:
            break
        x, f, res = xn, fn, rn
    return x, ls.nfev + it, res


# ----------------------------------------------------------------------------
# solver


def chebyshev_complex(grid: BoundaryGrid, n: int, w: Weight | None = None, tol: float = 1e-8,
                      maxiter: int = 500, polish: bool = True,
                      refine_check: bool = True) -> ComplexChebSolution:
    """Monic minimiser of max |w T| over the grid (then polished on the continuous boundary)."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    w = w or UNIT
    pts_all = np.asarray(grid.points, dtype=complex)
    if len(pts_all) < 4 * (n + 1):
        raise ConfigTooCoarse(f"grid of {len(pts_all)} points is too coarse for degree {n}")
    wv = w.on_grid(grid)
    idx = np.nonzero(wv > 0)[0]
    if len(np.unique(np.round(pts_all[idx], 14))) < n + 1:
        raise RankDeficiency("weight is nonzero at fewer than n + 1 grid points")
    pts = pts_all[idx]
    wts = wv[idx]
    center = complex(pts_all.mean())
    scale = float(np.max(np.abs(pts_all - center)))
    zeta = (pts - center) / scale
    q, h = arnoldi(zeta, n)
    gamma = complex(np.prod(np.diag(h, -1)))
    a_mat = q[:, :n]
    b_vec = -gamma * q[:, n]
    lam0 = np.full(len(pts), 1.0 / len(pts))
    pre = maxiter if not polish else min(maxiter, 200)
    c, lam, r, upper, lower, iters = _lawson(a_mat, b_vec, wts, lam0, pre, tol)
    notes = []
    polish_its = 0
    e_level = lower
    active_z = pts[r >= (1 - 10 * tol) * upper]
    mults = np.zeros(0)
    chop = np.abs(c) < CHOP * max(1.0, abs(gamma))
    if (upper - lower) > tol * upper and polish:
        out = _polish(grid, idx, pts, wts, w, h, center, scale, c, lam, r, upper, tol)
        if out is None:
            notes.append("polish failed; continuing Lawson")
            c, lam, r, upper, lower, more = _lawson(a_mat, b_vec, wts, lam, maxiter - iters, tol)
            iters += more
            e_level = lower
            active_z = pts[r >= (1 - 10 * tol) * upper]
        else:
            c, e_level, active_z, mults, polish_its = out
    elif (upper - lower) > tol * upper and iters < maxiter:
        c, lam, r, upper, lower, more = _lawson(a_mat, b_vec, wts, lam, maxiter - iters, tol)
        iters += more
        e_level = lower
    else:
        c = np.where(chop, 0, c)
    full = np.append(c, gamma)
    grid_vals = np.abs(wts * (q @ full)) * scale ** n
    grid_norm = float(grid_vals.max())
    act_vals = np.abs(w(active_z) * (basis_eval((active_z - center) / scale, h) @ full)) * scale ** n \
        if len(active_z) else np.zeros(0)
    level = e_level * scale ** n
    norm = float(max(grid_norm, act_vals.max() if len(act_vals) else 0.0))
    delta = 0.0
    if refine_check and grid.cfg is not None and not isinstance(grid.desc, PointGrid):
        fine = refine(grid)
        fv = np.abs(w(fine.points) * (basis_eval((fine.points - center) / scale, h) @ full)) * scale ** n
        delta = float(max(fv.max() - grid_norm, 0.0))
        norm = max(norm, float(fv.max()))
    gap = (norm - level) / norm if norm > 0 else 0.0
    if gap > tol and gap > 1e-12:
        if polish and iters >= maxiter:
            raise NonConvergence(f"duality gap {gap:.3e} above tolerance {tol:.1e}")
        notes.append(f"duality gap {gap:.3e} above tolerance")
    return ComplexChebSolution(n, center, scale, h, c, norm, grid_norm, level, np.asarray(active_z),
                               np.asarray(mults), iters, polish_its, float(max(gap, 0.0)), delta,
                               w.name, None, notes)


def _polish(grid, idx, pts, wts, w, h, center, scale, c, lam, r, upper, tol, rounds: int = 12):
    n = h.shape[1]
    rabs = np.abs(r)
    full_vals = np.zeros(len(grid.points))
    full_vals[idx] = rabs
    act_idx = _local_maxima(full_vals[idx], grid, idx, 0.98 * upper)
    acts = []
    weights0 = []
    pos = {g: k for k, g in enumerate(idx)}
    for gi in act_idx:
        acts.append(_make_active(grid, gi))
        k = pos[gi]
        weights0.append(lam[max(k - 3, 0): k + 4].sum())
    lam_init = np.array(weights0)
    lam_init = lam_init / lam_init.sum()
    e0 = upper
    cc = c.copy()
    total_its = 0
    for _ in range(rounds):
        fun = _KKT(acts, h, center, scale, w, e0)
        svals = np.array([a.s for a in acts if not a.fixed])
        x = np.concatenate([cc.real / e0, cc.imag / e0, [1.0], svals, lam_init])
        x, its, res = _newton(fun, x)
        total_its += its
        cnew, e, s, lamv = fun.unpack(x)
        # the duality gap computed afterwards is the real acceptance test
        if not np.all(np.isfinite(x)) or res > 1e-7:
            return None
        # slide points that left their chart back to its ends and pin them
        changed = False
        fi = 0
        for a in acts:
            if a.fixed:
                continue
            si = s[fi]
            fi += 1
            lo, hi = a.chart.lo, a.chart.hi
            if si < lo or si > hi:
                a.z0, _ = _point(a, lo if si < lo else hi)
                a.s, a.fixed = 0.0, True
                changed = True
            else:
                a.s = si
        if changed:
            lam_init = np.abs(lamv) / np.abs(lamv).sum()
            continue
        if np.any(lamv < -1e-10):
            keep = lamv >= -1e-10
            keep[np.argmin(lamv)] = False
            acts = [a for a, k in zip(acts, keep) if k]
            lam_init = np.abs(lamv[keep]) / np.abs(lamv[keep]).sum()
            cc = cnew
            continue
        cc = cnew
        # add violators
        full = np.append(cc, complex(np.prod(np.diag(h, -1))))
        qg = basis_eval((pts - center) / scale, h)
        vals = np.abs(wts * (qg @ full)) / e0
        elevel = abs(e)
        cand = _local_maxima(np.where(True, vals, 0), grid, idx, elevel * (1 + 1e-10))
        zact = np.array([_point(a, a.s)[0] for a in acts])
        new = [gi for gi in cand if np.min(np.abs(grid.points[gi] - zact)) > 1e-9]
        if not new:
            lam_out = lamv
            return cc, elevel * e0, zact, lam_out, total_its
        for gi in new:
            acts.append(_make_active(grid, gi))
        lam_init = np.concatenate([np.abs(lamv), np.full(len(new), 1e-3)])
        lam_init = lam_init / lam_init.sum()
    return None


def _make_active(grid: BoundaryGrid, gi: int) -> _Active:
    chart = boundary_chart(grid, int(gi)) if not isinstance(grid.desc, PointGrid) else None
    fixed = chart is None or chart.fixed
    return _Active(chart, complex(grid.points[gi]), 0.0, fixed)


def attach_widom(sol: ComplexChebSolution, pd: PotentialData) -> ComplexChebSolution:
    return replace(sol, widom=float(sol.norm / pd.capacity ** sol.degree))


# ----------------------------------------------------------------------------
# bound checks and arc experiments


@dataclass(frozen=True)
class LowerBoundReport:
    norm: float
    bound: float
    margin: float
    passed: bool
    equality: bool
    zero_green_max: float | None


def weighted_lower_bound_check(sol: ComplexChebSolution, S: float, cap: float,
                               pd: PotentialData | None = None, tol: float = 1e-8) -> LowerBoundReport:
    """margin = ||w T|| - S cap^n; near-equality also checks G vanishes at the zeros."""
    bound = S * cap ** sol.degree
    margin = sol.norm - bound
    equality = margin <= tol * max(1.0, sol.norm)
    gmax = None
    if equality and pd is not None:
        from .zeros import zeros_of

        zm = zeros_of(sol)
        gmax = float(np.max(green_eval(pd, zm.zeros)))
    return LowerBoundReport(sol.norm, bound, margin, margin >= -1e-8, equality, gmax)


def arc_grid(alpha: float, n: int, points: int | None = None) -> BoundaryGrid:
    m = points or max(512, 16 * (n + 1))
    return discretize(validate(CircularArc(alpha)), DiscretizationConfig(m, 2.0), degree=n)


@dataclass(frozen=True, eq=False)
class ArcSweep:
    alpha: float
    degrees: np.ndarray
    widom: np.ndarray
    limit: float
    precise: dict = field(default_factory=dict)

    @property
    def increasing(self) -> bool:
        return bool(np.all(np.diff(self.widom) > -1e-7))


def arc_widom_sweep(alpha: float, n_max: int, precise_degrees=(), dps: int = 60,
                    tol: float = 1e-8) -> ArcSweep:
    """Widom factors of the circular arc for n = 1..n_max.

    ``precise_degrees`` are re-solved in extended precision (returned as
    mpmath numbers in ``precise``) so that differences far below double
    precision can be compared.
    """
    desc = validate(CircularArc(alpha))
    cap = math.sin(alpha / 2)
    ws = []
    sols = {}
    for n in range(1, n_max + 1):
        sol = chebyshev_complex(arc_grid(alpha, n), n, tol=tol)
        sols[n] = sol
        ws.append(sol.norm / cap ** n)
    precise = {}
    for n in precise_degrees:
        sol = sols.get(n) or chebyshev_complex(arc_grid(alpha, n), n, tol=tol)
        precise[n] = arc_precise_widom(desc.alpha, sol, dps)
    return ArcSweep(alpha, np.arange(1, n_max + 1), np.array(ws), 1 + math.cos(alpha / 2), precise)


def arc_precise_widom(alpha: float, sol: ComplexChebSolution, dps: int = 60):
    """Refine an arc solution in extended precision; returns W_n as an mpmath number.

    Uses the real-coefficient structure (the arc is symmetric about the real
    axis): unknowns are the n lower monomial coefficients, the level E and
    the interior extremal angles in (0, alpha); equations are |T| = E at
    the extremal angles and stationarity at interior ones.
    """
    import mpmath as mp

    n = sol.degree
    with mp.workdps(dps):
        # exact conversion of the Arnoldi representation to monomials in z
        hm = [[mp.mpf(float(x.real)) for x in row] for row in sol.h]
        polys = [[mp.mpf(1)]]
        for k in range(n):
            v = [mp.mpf(0)] + polys[k]
            for j in range(k + 1):
                for t, pj in enumerate(polys[j]):
                    v[t] -= hm[j][k] * pj
            polys.append([x / hm[k + 1][k] for x in v])
        full = [mp.mpf(float(x.real)) for x in sol.c] + [mp.mpf(1)]
        for k in range(n):
            full[n] *= hm[k + 1][k]
        zc = [mp.mpf(0)] * (n + 1)
        for ck, pk in zip(full, polys):
            for t, x in enumerate(pk):
                zc[t] += ck * x
        center, scale = mp.mpf(float(sol.center.real)), mp.mpf(sol.scale)
        # p(z) = scale^n * sum zc_t ((z - center)/scale)^t, expanded in z
        mono = [mp.mpf(0)] * (n + 1)
        for t in range(n + 1):
            coef = zc[t] * scale ** (n - t)
            for i in range(t + 1):
                mono[i] += coef * mp.binomial(t, i) * (-center) ** (t - i)
        lead = mono[n]
        a = [x / lead for x in mono[:n]]
        # extremal angles on [0, alpha]; multipliers of mirror points are merged
        th_all = np.abs(np.angle(sol.active))
        lam_all = np.abs(sol.multipliers) if len(sol.multipliers) == len(th_all) else np.ones(len(th_all))
        th, inv = np.unique(np.round(th_all, 10), return_inverse=True)
        lam0 = np.bincount(inv, weights=lam_all)
        lam0 = lam0 / lam0.sum()
        thetas, free = [], []
        for i, t in enumerate(th):
            if abs(t - alpha) < 1e-9:
                thetas.append(mp.mpf(alpha))
            elif t < 1e-9:
                thetas.append(mp.mpf(0))
            else:
                thetas.append(mp.mpf(float(t)))
                free.append(i)
        m, nf = len(thetas), len(free)
        lam = [mp.mpf(float(x)) for x in lam0]
        e = abs(_mp_eval(a, mp.expj(thetas[0]))[0])

        def system(a, e, thetas, lam):
            size = n + 1 + nf + m
            f, rows = [], []
            ev = [_mp_eval(a, mp.expj(t)) + (mp.expj(t),) for t in thetas]
            for i, (p, dp, d2p, pows, z) in enumerate(ev):
                row = [mp.mpf(0)] * size
                for k in range(n):
                    row[k] = 2 * mp.re(mp.conj(p) * pows[k])
                row[n] = -2 * e
                if i in free:
                    row[n + 1 + free.index(i)] = 2 * mp.re(mp.conj(p) * 1j * z * dp)
                f.append(abs(p) ** 2 - e ** 2)
                rows.append(row)
            for i in free:
                p, dp, d2p, pows, z = ev[i]
                row = [mp.mpf(0)] * size
                for k in range(n):
                    row[k] = 2 * mp.re(mp.conj(pows[k]) * 1j * z * dp + mp.conj(p) * 1j * k * pows[k])
                row[n + 1 + free.index(i)] = 2 * mp.re(abs(z * dp) ** 2 - mp.conj(p) * (z * dp + z * z * d2p))
                f.append(2 * mp.re(mp.conj(p) * 1j * z * dp))
                rows.append(row)
            for k in range(n):
                row = [mp.mpf(0)] * size
                val = mp.mpf(0)
                for j, (p, dp, d2p, pows, z) in enumerate(ev):
                    val += lam[j] * mp.re(mp.conj(p) * pows[k])
                    for l in range(n):
                        row[l] += lam[j] * mp.re(mp.conj(pows[l]) * pows[k])
                    if j in free:
                        row[n + 1 + free.index(j)] = lam[j] * mp.re(
                            mp.conj(1j * z * dp) * pows[k] + mp.conj(p) * 1j * k * pows[k])
                    row[n + 1 + nf + j] = mp.re(mp.conj(p) * pows[k])
                f.append(val)
                rows.append(row)
            row = [mp.mpf(0)] * size
            for j in range(m):
                row[n + 1 + nf + j] = mp.mpf(1)
            f.append(mp.fsum(lam) - 1)
            rows.append(row)
            return mp.matrix(f), mp.matrix(rows)

        target = mp.mpf(10) ** (-(dps - 15))
        for _ in range(40):
            f, jac = system(a, e, thetas, lam)
            step = mp.lu_solve(jac, f) if m + nf + n + 1 == n + 1 + nf + m else mp.qr_solve(jac, f)[0]
            a = [a[k] - step[k] for k in range(n)]
            e = e - step[n]
            for j, i in enumerate(free):
                thetas[i] = thetas[i] - step[n + 1 + j]
            lam = [lam[j] - step[n + 1 + nf + j] for j in range(m)]
            if mp.norm(step, mp.inf) < target * (1 + max(abs(x) for x in a)):
                break
        else:
            raise NonConvergence("extended-precision polish did not converge")
        if min(lam) < 0:
            raise NonConvergence("extended-precision polish found a negative multiplier")
        return e / mp.sin(mp.mpf(alpha) / 2) ** n


def _mp_eval(a, z):
    """p(z), p'(z), p''(z) and powers z^k for the monic polynomial with lower coefficients a."""
    import mpmath as mp

    n = len(a)
    pows = [mp.mpc(1)]
    for _ in range(n):
        pows.append(pows[-1] * z)
    p = pows[n] + mp.fsum(a[k] * pows[k] for k in range(n))
    dp = n * pows[n - 1] + mp.fsum(k * a[k] * pows[k - 1] for k in range(1, n))
    d2p = (n * (n - 1) * pows[n - 2] if n >= 2 else 0) + mp.fsum(k * (k - 1) * a[k] * pows[k - 2] for k in range(2, n))
    return p, dp, d2p, pows


@dataclass(frozen=True)
class ArcProbe:
    value: float
    in_band: bool
    limit: float
    difference: float


def arc_conjecture_probe(grid, pd: PotentialData | None = None) -> ArcProbe:
    """2 pi S(w) cap for w the equilibrium density (per unit length) of a circular arc."""
    desc = grid.desc if isinstance(grid, BoundaryGrid) else grid
    if not isinstance(desc, CircularArc):
        raise UnsupportedFamily("the arc probe needs a circular arc")
    from .potential import arc_density, szego_value

    pd = pd or potential_data(desc)
    alpha = desc.alpha
    dens = Weight(lambda z: arc_density(alpha, np.clip(np.angle(z), -alpha, alpha)), "arc density")
    s = szego_value(dens, pd)
    value = 2 * math.pi * s * pd.capacity
    limit = 1 + math.cos(alpha / 2)
    return ArcProbe(value, 1 < value <= 2, limit, value - limit)


def capacity_from_norms(grid: BoundaryGrid, degrees=(8, 16, 32), tol: float = 1e-8) -> float:
    """Approximate capacity from ||T_n||^(1/n) with a Richardson step in 1/n.

    Meant for sets without a closed form (polygons, point grids); flagged
    as approximate wherever it is reported.
    """
    roots = []
    for n in degrees:
        sol = chebyshev_complex(grid, n, tol=tol, refine_check=False)
        roots.append(sol.norm ** (1.0 / n))
    if len(degrees) >= 2:
        n1, n2 = degrees[-2], degrees[-1]
        r1, r2 = roots[-2], roots[-1]
        return float((n2 * r2 - n1 * r1) / (n2 - n1))
    return float(roots[-1])
