import math
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from widomlab.sets import CircularArc, DiscretizationConfig, Disk, IntervalUnion, Lemniscate, discretize

settings.register_profile(
    "default", deadline=None, max_examples=25, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")

SQRT5 = math.sqrt(5.0)


@pytest.fixture(scope="session")
def interval():
    return IntervalUnion(((-1.0, 1.0),))


@pytest.fixture(scope="session")
def two_interval():
    return IntervalUnion(((-1.0, -0.3), (0.2, 1.0)))


@pytest.fixture(scope="session")
def sqrt5_set():
    return IntervalUnion(((-SQRT5, -1.0), (1.0, SQRT5)))


@pytest.fixture(scope="session")
def circle_grid():
    return discretize(Disk(0, 1), DiscretizationConfig(512))


@pytest.fixture(scope="session")
def lemniscate_grid():
    return discretize(Lemniscate((-1, 0, 1), 1.0), DiscretizationConfig(512))


@pytest.fixture(scope="session")
def quarter_arc():
    return CircularArc(math.pi / 2)


def interval_grid(a=-1.0, b=1.0, m=512):
    return discretize(IntervalUnion(((a, b),)), DiscretizationConfig(m))


def cheb_monic(n):
    """Monic monomial coefficients of 2^(1-n) T_n, lowest first."""
    c = np.polynomial.chebyshev.cheb2poly([0] * n + [1])
    return c / c[-1]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
