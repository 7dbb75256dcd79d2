"""Iterated Kolmogorov loops.

Brownian motion conditioned to have vanishing iterated time integrals up to
order N admits an explicit description through shifted Legendre
polynomials.  This package implements that construction end to end: exact
Legendre/integral polynomial families over the Gaussian rationals, the
exact moment engine with its partial-fraction coefficient rows and Catalan
triangle sums, floating-point covariance kernels with their semicircle
limit, the factorial Hankel matrix representation, and Monte Carlo
samplers for loop and fluctuation paths.
"""

__version__ = "0.1.0"

from .errors import CapacityError, DomainError, FactorizationError, SingularRecursionError
from .exact import GaussRational, GaussRationalPoly, RationalPoly

__all__ = [
    "__version__",
    "CapacityError",
    "DomainError",
    "FactorizationError",
    "SingularRecursionError",
    "GaussRational",
    "GaussRationalPoly",
    "RationalPoly",
]
