"""Chebyshev polynomials, capacity and Widom factors for compact sets in the plane."""

from .cheb_complex import ComplexChebSolution, arc_widom_sweep, chebyshev_complex, weighted_lower_bound_check
from .cheb_real import ChebyshevSolution, build_period_set, chebyshev_real, key_formula_check, widom_factor
from .errors import *  # noqa: F401,F403
from .potential import (
    PotentialData,
    Weight,
    capacity,
    equilibrium_density,
    green_eval,
    potential_data,
    solve_finite_gap,
    szego_value,
)
from .sets import (
    BoundaryGrid,
    CircularArc,
    DiscretizationConfig,
    Disk,
    GreenLevelSet,
    IntervalUnion,
    JordanPolyline,
    Lemniscate,
    PointGrid,
    discretize,
    from_json,
    to_json,
    validate,
)
from .zeros import ZeroMeasure, balayage_check, hull_and_gap_check, zeros_of

__version__ = "0.1.0"
