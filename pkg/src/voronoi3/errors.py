"""Exception types shared across the package."""


class Voronoi3Error(Exception):
    """Base class for all package errors."""


class PoleError(Voronoi3Error, ValueError):
    """An argument sits on (or within tolerance of) a pole."""


class ContourError(Voronoi3Error, ValueError):
    """A vertical integration line violates the analyticity requirement."""


class ConvergenceError(Voronoi3Error, RuntimeError):
    """A truncated sum or quadrature failed to reach its tolerance."""


class AdmissibilityError(Voronoi3Error, ValueError):
    """A test function does not satisfy the hypothesis of a summation formula."""


class ConfigError(Voronoi3Error, ValueError):
    """Invalid run configuration."""
