import math

import numpy as np
import pytest

from widomlab.cheb_complex import (
    arc_conjecture_probe,
    arc_grid,
    arc_widom_sweep,
    attach_widom,
    capacity_from_norms,
    chebyshev_complex,
    weighted_lower_bound_check,
)
from widomlab.cheb_real import chebyshev_real
from widomlab.errors import ConfigTooCoarse, RankDeficiency, UnsupportedFamily
from widomlab.potential import UNIT, Weight, potential_data, szego_value
from widomlab.sets import CircularArc, DiscretizationConfig, Disk, GreenLevelSet, IntervalUnion, Lemniscate, discretize

from conftest import interval_grid

ARC_W = [math.sqrt(2), 4 * math.sqrt(2) - 4, 1.6986577642312701, 1.7056674940601189]
LEMNISCATE_NORMS = [math.sqrt(2), 1.0, 1.219518595571076, 1.0, 1.1502360252603538, 1.0]


def test_disk_monomials(circle_grid):
    sol = chebyshev_complex(circle_grid, 5)
    assert np.max(np.abs(sol.coeffs[:-1])) <= 1e-6
    assert sol.norm == pytest.approx(1.0, abs=1e-6)
    assert sol.coeffs[-1] == 1.0
    assert len(sol.active) >= 6


def test_lemniscate_t4(lemniscate_grid):
    sol = chebyshev_complex(lemniscate_grid, 4)
    assert np.allclose(sol.coeffs, [1, 0, -2, 0, 1], atol=1e-6)
    direct = np.max(np.abs((lemniscate_grid.points ** 2 - 1) ** 2))
    assert sol.norm == pytest.approx(direct, abs=1e-5)


@pytest.mark.parametrize("n", range(1, 7))
def test_lemniscate_norms(lemniscate_grid, n):
    assert chebyshev_complex(lemniscate_grid, n).norm == pytest.approx(LEMNISCATE_NORMS[n - 1], abs=1e-6)


@pytest.mark.parametrize("n", [1, 3, 6, 10])
def test_agrees_with_remez(interval, n):
    sol = chebyshev_complex(interval_grid(), n)
    ref = chebyshev_real(interval, n)
    assert np.max(np.abs(sol.coeffs - ref.coeffs)) <= 1e-6
    assert sol.norm == pytest.approx(ref.norm, rel=1e-6)


def test_arc_frozen_widom():
    sweep = arc_widom_sweep(math.pi / 2, 4)
    assert np.allclose(sweep.widom, ARC_W, atol=1e-8)
    assert sweep.increasing
    assert sweep.limit == pytest.approx(1 + math.cos(math.pi / 4))


@pytest.mark.parametrize("phi", [0.3, 0.7, 1.3])
def test_rotation_equivariance(lemniscate_grid, phi):
    # rotating |z^2 - 1| <= 1 by phi gives |z^2 - e^(2i phi)| <= 1
    rotated = discretize(Lemniscate((-np.exp(2j * phi), 0, 1), 1.0), DiscretizationConfig(512))
    for n in (3, 5):
        a = chebyshev_complex(lemniscate_grid, n)
        b = chebyshev_complex(rotated, n)
        assert b.norm == pytest.approx(a.norm, abs=1e-9)
        k = np.arange(n + 1)
        assert np.allclose(b.coeffs, a.coeffs * np.exp(1j * phi * (n - k)), atol=1e-8)


def test_refinement_stability():
    desc = CircularArc(1.0)
    for n in (3, 6):
        coarse = chebyshev_complex(discretize(desc, DiscretizationConfig(256)), n)
        fine = chebyshev_complex(discretize(desc, DiscretizationConfig(512)), n)
        assert abs(fine.norm - coarse.norm) <= 5 * 1e-8 * max(1.0, fine.norm)
        assert coarse.refinement_delta >= 0


def test_lower_bound_equality_on_disk(circle_grid):
    pd = potential_data(Disk(0, 1))
    for n in (1, 4):
        sol = chebyshev_complex(circle_grid, n)
        rep = weighted_lower_bound_check(sol, 1.0, 1.0, pd)
        assert rep.passed and rep.equality
        assert abs(rep.margin) <= 1e-8
        assert rep.zero_green_max <= 1e-6


def test_lower_bound_interval_margin(interval):
    pd = potential_data(interval)
    grid = interval_grid()
    for n in (2, 5):
        rep = weighted_lower_bound_check(chebyshev_complex(grid, n), 1.0, 0.5, pd)
        assert rep.margin == pytest.approx(0.5 ** n, rel=1e-6)
        assert not rep.equality


def test_lower_bound_weights(interval, circle_grid):
    semi = Weight(lambda z: np.sqrt(np.abs(1 - z * z)), "semicircle")
    pd = potential_data(interval)
    s = szego_value(semi, pd)
    assert s == pytest.approx(0.5, abs=1e-6)
    for n in (2, 4):
        sol = chebyshev_complex(interval_grid(), n, semi)
        assert weighted_lower_bound_check(sol, s, pd.capacity).margin >= -1e-8
    abs_sin = Weight(lambda z: np.abs(np.imag(z)) / np.abs(z), "abs sin")
    disk = potential_data(Disk(0, 1))
    s = szego_value(abs_sin, disk)
    sol = chebyshev_complex(circle_grid, 2, abs_sin)
    assert weighted_lower_bound_check(sol, s, 1.0).margin >= -1e-8


def test_weight_support_too_small(circle_grid):
    spike = Weight(lambda z: (np.abs(z - 1) < 1e-9).astype(float), "spike")
    with pytest.raises(RankDeficiency):
        chebyshev_complex(circle_grid, 3, spike)


def test_grid_too_coarse():
    grid = discretize(Disk(0, 1), DiscretizationConfig(16))
    with pytest.raises(ConfigTooCoarse):
        chebyshev_complex(grid, 5)


def test_attach_widom(circle_grid):
    sol = attach_widom(chebyshev_complex(circle_grid, 3), potential_data(Disk(0, 2)))
    assert sol.widom == pytest.approx(1 / 8, abs=1e-6)
    assert set(sol.to_json()) >= {"degree", "coeffs", "norm", "widom_factor", "duality_gap"}


def test_arc_probe(quarter_arc):
    probe = arc_conjecture_probe(arc_grid(quarter_arc.alpha, 4))
    assert probe.in_band
    assert 1 < probe.value <= 2
    assert probe.limit == pytest.approx(1 + math.cos(math.pi / 4))
    with pytest.raises(UnsupportedFamily):
        arc_conjecture_probe(discretize(Disk(0, 1), DiscretizationConfig(64)))


def test_capacity_estimator_on_disk():
    grid = discretize(Disk(0, 1.5), DiscretizationConfig(512))
    assert capacity_from_norms(grid, (4, 8)) == pytest.approx(1.5, rel=1e-6)


@pytest.mark.parametrize("level,degrees", [(0.5, range(12, 19)), (1.0, [6]), (0.2, [28, 31])])
def test_level_set_flat_maxima(level, degrees):
    # |T_n| is almost constant on these ellipses; the polish must still certify
    grid = discretize(GreenLevelSet(IntervalUnion(((-1, 1),)), level), DiscretizationConfig(1024))
    for n in degrees:
        sol = chebyshev_complex(grid, n, refine_check=False)
        assert sol.gap <= 1e-8
        assert sol.norm == pytest.approx(math.cosh(n * level) * 2.0 ** (1 - n), rel=1e-8)
