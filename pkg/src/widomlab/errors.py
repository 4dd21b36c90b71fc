"""Exception hierarchy shared by all widomlab modules."""


class WidomLabError(Exception):
    """Base class for every error raised by this package."""


class SetError(WidomLabError, ValueError):
    """Invalid set description or discretization request."""


class OverlappingIntervals(SetError):
    pass


class DegenerateComponent(SetError):
    pass


class NonSimplePolyline(SetError):
    pass


class ConfigTooCoarse(SetError):
    pass


class UnsupportedFamily(WidomLabError):
    pass


class SolverError(WidomLabError):
    """Numerical failure inside one of the solvers."""


class NonConvergence(SolverError):
    pass


class ReferenceCollapse(SolverError):
    pass


class RankDeficiency(SolverError):
    pass


class SingularSystem(SolverError):
    pass


class QuadratureUnderflow(SolverError):
    pass


class BranchTrackingFailure(SolverError):
    pass


class BandExtractionFailure(SolverError):
    pass


class BranchAmbiguity(SolverError):
    pass


class CapacityMissing(WidomLabError):
    pass


class RootResidualTooLarge(SolverError):
    def __init__(self, message, roots=()):
        super().__init__(message)
        self.roots = list(roots)


class TestPointInsideHull(WidomLabError, ValueError):
    __test__ = False  # keep pytest from collecting this


class WeightVanishesEverywhere(UserWarning):
    """Emitted (not raised) when the Szego integral diverges to -inf."""
