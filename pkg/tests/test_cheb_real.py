import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from widomlab.cheb_real import (
    FLOOR_MAX,
    build_period_set,
    chebyshev_real,
    key_formula_check,
    widom_factor,
)
from widomlab.errors import BranchAmbiguity, CapacityMissing
from widomlab.potential import solve_finite_gap
from widomlab.sets import IntervalUnion

from conftest import SQRT5, cheb_monic

# frozen reference values for [-1,-0.3] u [0.2,1]
TWO_INTERVAL_W = [2.065776768537422, 2.048368155565879, 2.2038913276978342,
                  2.0979060503681812, 2.3512400072833604, 2.148641973471585]


def dense(desc, m=4000):
    return np.concatenate([np.linspace(a, b, m) for a, b in desc.intervals])


@pytest.mark.parametrize("n", [1, 2, 4, 7, 12])
def test_interval_coefficients(interval, n):
    sol = chebyshev_real(interval, n)
    assert np.allclose(sol.coeffs, cheb_monic(n), atol=1e-12)
    assert sol.norm == pytest.approx(2.0 ** (1 - n), rel=1e-12)


def test_t4_exact(interval):
    sol = chebyshev_real(interval, 4)
    assert np.allclose(sol.coeffs, [1 / 8, 0, -1, 0, 1], atol=1e-14)
    assert sol.norm == pytest.approx(1 / 8, abs=1e-15)


def test_degree_one_geometry():
    sol = chebyshev_real(IntervalUnion(((0.5, 3.0),)), 1)
    assert sol.coeffs[0] == pytest.approx(-1.75)
    assert sol.norm == pytest.approx(1.25)
    sol = chebyshev_real(IntervalUnion(((-2, -1), (0, 0.5), (2, 4))), 1)
    assert sol.coeffs[0] == pytest.approx(-1.0)
    assert sol.norm == pytest.approx(3.0)


def test_sqrt5_degree_two(sqrt5_set):
    sol = chebyshev_real(sqrt5_set, 2)
    assert np.allclose(sol.coeffs, [-3, 0, 1], atol=1e-12)
    assert sol.norm == pytest.approx(2.0, abs=1e-12)
    assert widom_factor(sol, solve_finite_gap(sqrt5_set)) == pytest.approx(2.0, abs=1e-11)


def test_degenerate_period_three_set():
    desc = IntervalUnion(((-math.sqrt(3), 0.0), (math.sqrt(3), 2.0)))
    pd = solve_finite_gap(desc)
    sol = chebyshev_real(desc, 3)
    assert abs(sol.norm - 2 * pd.capacity ** 3) <= 1e-8
    ps = build_period_set(sol)
    assert ps.touching.any()


def test_two_interval_frozen_widom(two_interval):
    pd = solve_finite_gap(two_interval)
    w = [widom_factor(chebyshev_real(two_interval, n), pd) for n in range(1, 7)]
    assert np.allclose(w, TWO_INTERVAL_W, atol=1e-9)


def test_alternation_invariants(two_interval):
    for n in (3, 8, 15):
        sol = chebyshev_real(two_interval, n)
        x = sol.alternation
        assert len(x) == n + 1
        assert x[0] == pytest.approx(-1.0) and x[-1] == pytest.approx(1.0)
        vals = sol(x)
        expected = (-1.0) ** (n - np.arange(n + 1)) * sol.norm
        assert np.allclose(vals, expected, rtol=1e-9)
        assert np.max(np.abs(sol(dense(two_interval)))) <= sol.norm * (1 + 1e-9)
        assert sol.max_zeros_per_gap <= 1
        assert sol.residual <= 1e-10


def test_widom_needs_capacity(interval):
    sol = chebyshev_real(interval, 3)
    with pytest.raises(CapacityMissing):
        widom_factor(sol, None)


def test_argument_validation(interval):
    with pytest.raises(ValueError):
        chebyshev_real(interval, 0)
    with pytest.raises(ValueError):
        chebyshev_real(interval, 3, tol=1e-3)


def test_perturbation_optimality():
    desc = IntervalUnion(((-1, -0.6), (-0.4, 0.1), (0.5, 1)))
    sol = chebyshev_real(desc, 7)
    x = dense(desc)
    base = np.max(np.abs(sol(x)))
    rng = np.random.default_rng(11)
    for _ in range(100):
        q = rng.standard_normal(7)
        pert = sol(x) + 1e-6 * np.polynomial.polynomial.polyval(x, q)
        assert np.max(np.abs(pert)) >= base * (1 - 1e-12)


def test_submultiplicative(two_interval):
    norms = {n: chebyshev_real(two_interval, n).norm for n in range(1, 9)}
    for n in range(1, 5):
        for m in range(1, 5):
            assert norms[n + m] <= norms[n] * norms[m] * (1 + 1e-10)


def test_scaling_covariance(two_interval):
    s, t = 2.5, -0.7
    moved = IntervalUnion(tuple((s * a + t, s * b + t) for a, b in two_interval.intervals))
    for n in (3, 6):
        a = chebyshev_real(two_interval, n)
        b = chebyshev_real(moved, n)
        assert b.norm == pytest.approx(s ** n * a.norm, rel=1e-9)
        wa = widom_factor(a, solve_finite_gap(two_interval))
        wb = widom_factor(b, solve_finite_gap(moved))
        assert wb == pytest.approx(wa, rel=1e-9)


def test_period_set_of_interval(interval):
    ps = build_period_set(chebyshev_real(interval, 5))
    assert ps.merged.intervals == ((-1.0, 1.0),) or np.allclose(ps.merged.intervals, [(-1, 1)], atol=1e-10)


def test_period_set_sqrt5(sqrt5_set):
    ps = build_period_set(chebyshev_real(sqrt5_set, 2))
    assert np.allclose(ps.bands, [(-SQRT5, -1), (1, SQRT5)], atol=1e-10)
    assert ps.capacity == pytest.approx(1.0, abs=1e-12)


def test_period_set_bands_and_masses(two_interval):
    sol = chebyshev_real(two_interval, 5)
    ps = build_period_set(sol)
    assert len(ps.bands) == 5
    assert np.allclose(ps.band_masses(), 0.2, atol=1e-8)
    b = ps.bands
    assert np.all(b[:, 1] > b[:, 0]) and np.all(b[1:, 0] >= b[:-1, 1])
    # contains the set, inside the hull
    for a, c in two_interval.intervals:
        assert any(lo <= a + 1e-12 and c <= hi + 1e-12 for lo, hi in ps.merged.intervals)
    assert b[0, 0] >= -1 - 1e-12 and b[-1, 1] <= 1 + 1e-12
    assert ps.capacity == pytest.approx(solve_finite_gap(ps.merged).capacity, abs=1e-7)


def test_period_set_self_consistency(two_interval):
    sol = chebyshev_real(two_interval, 6)
    again = chebyshev_real(build_period_set(sol).merged, 6)
    assert np.max(np.abs(again.coeffs - sol.coeffs)) <= 1e-8


def test_key_formula_interval(interval):
    sol = chebyshev_real(interval, 3)
    res = key_formula_check(build_period_set(sol), sol, 2.0)
    assert res.formula <= 1e-10
    # B^3 = (z - sqrt(z^2 - 1))^3
    assert res.b_modulus == pytest.approx(2 - math.sqrt(3), abs=1e-12)


def test_key_formula_sqrt5(sqrt5_set):
    sol = chebyshev_real(sqrt5_set, 2)
    res = key_formula_check(build_period_set(sol), sol, 2j)
    assert res.formula <= 1e-8 and res.modulus <= 1e-8


def test_key_formula_far_point(two_interval):
    sol = chebyshev_real(two_interval, 4)
    res = key_formula_check(build_period_set(sol), sol, 30 + 10j)
    assert res.formula / abs(2 * sol(30 + 10j) / sol.norm) <= 1e-12


def test_key_formula_band_edge(two_interval):
    sol = chebyshev_real(two_interval, 4)
    with pytest.raises(BranchAmbiguity):
        key_formula_check(build_period_set(sol), sol, 1.0)


def test_floor_guard_constant():
    assert 0 < FLOOR_MAX <= 1e-6


def test_solution_json(two_interval):
    d = chebyshev_real(two_interval, 3).with_widom(solve_finite_gap(two_interval)).to_json()
    assert set(d) == {"degree", "coeffs", "norm", "alternation", "widom_factor", "residual"}
    assert d["coeffs"][-1] == 1.0


@given(st.lists(st.floats(-1, 1), min_size=4, max_size=4, unique=True), st.integers(1, 9))
def test_random_sets_bounds(cuts, n):
    c = sorted(cuts)
    assume(min(np.diff(c)) >= 0.05)
    desc = IntervalUnion(((c[0], c[1]), (c[2], c[3])))
    pd = solve_finite_gap(desc)
    sol = chebyshev_real(desc, n)
    w = widom_factor(sol, pd)
    assert w >= 2 - 1e-8
    assert w <= 2 * math.exp(pd.pw) + 1e-6
    cap_n = solve_finite_gap(build_period_set(sol).merged).capacity
    assert abs(sol.norm - 2 * cap_n ** n) <= 1e-6 * sol.norm
