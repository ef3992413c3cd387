"""Numerical Voronoi summation for GL(2) and GL(3) cusp forms.

Modules: complex_special (Gamma factors), arithmetic (exponential sums and
characters), coefficients (Hecke tables), kernels (the transformed test
function F), summation (both sides of the Voronoi formulas), lfunctions
(twisted L-functions and their functional equation), cli.
"""

from .errors import (
    AdmissibilityError,
    ConfigError,
    ContourError,
    ConvergenceError,
    PoleError,
    Voronoi3Error,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "ConfigError",
    "ContourError",
    "ConvergenceError",
    "PoleError",
    "Voronoi3Error",
    "__version__",
]
