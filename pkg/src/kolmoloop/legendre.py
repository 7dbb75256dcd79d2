"""Legendre polynomials on [-1, 1] and their relatives.

Covers the classical polynomials P_n, the integer-indexed extension
P_{-n-1} = i*P_n, the integral family I_n defined through
(2n+1) I_n = P_{n+1} - P_{n-1} for every integer n, the shifted polynomials
Q_n(t) = P_n(2t - 1) on [0, 1], and the Darboux main-term approximants used
by the asymptotics validators.

Exact polynomials are produced by the three-term recurrence and memoized up
to a configurable degree cap.  Floating-point evaluation always runs the
recurrence upward; expanded monomial coefficients are catastrophically
ill-conditioned beyond degree ~30 and are never used for float work.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapacityError, DomainError
from .exact import GaussRationalPoly, RationalPoly, as_fraction

__all__ = [
    "set_degree_cap",
    "degree_cap",
    "legendre_exact",
    "legendre_integral_exact",
    "shifted_legendre_exact",
    "shifted_integral_exact",
    "legendre",
    "legendre_integral",
    "shifted_legendre",
    "shifted_integral",
    "legendre_all",
    "legendre_int_all",
    "jacobi_m1m1_exact",
    "DarbouxApproximant",
    "darboux_approximant",
    "darboux_main_term",
]

_DEFAULT_CAP = 64
_cap = _DEFAULT_CAP
_cache: list[RationalPoly] = [RationalPoly([1]), RationalPoly([0, 1])]
_cache_lock = threading.Lock()


def set_degree_cap(cap: int) -> None:
    """Raise or lower the exact-polynomial degree cap (default 64)."""
    global _cap
    if cap < 1:
        raise ValueError("degree cap must be positive")
    _cap = cap


def degree_cap() -> int:
    return _cap


def _legendre_raw(n: int) -> RationalPoly:
    """P_n for n >= 0, memoized; grows the table under a lock."""
    if n > _cap:
        raise CapacityError(f"exact Legendre degree {n} exceeds cap {_cap}")
    if n < len(_cache):
        return _cache[n]
    with _cache_lock:
        while len(_cache) <= n:
            m = len(_cache) - 1
            x_pm = RationalPoly([0, Fraction(2 * m + 1, m + 1)]) * _cache[m]
            nxt = x_pm - Fraction(m, m + 1) * _cache[m - 1]
            _cache.append(nxt)
    return _cache[n]


def legendre_exact(n: int) -> GaussRationalPoly:
    """Exact P_n for any integer n; purely imaginary for n <= -1."""
    if n >= 0:
        return GaussRationalPoly.from_real(_legendre_raw(n))
    return GaussRationalPoly.from_imag(_legendre_raw(-n - 1))


def legendre_integral_exact(n: int) -> GaussRationalPoly:
    """Exact I_n = (P_{n+1} - P_{n-1}) / (2n+1) for any integer n.

    Coincides with the antiderivative of P_n vanishing at -1 when n >= 1.
    I_0(x) = x - i is *not* that antiderivative.
    """
    return (legendre_exact(n + 1) - legendre_exact(n - 1)) * Fraction(1, 2 * n + 1)


def shifted_legendre_exact(n: int) -> RationalPoly:
    """Exact Q_n(t) = P_n(2t - 1) on [0, 1], n >= 0."""
    if n < 0:
        raise ValueError("shifted polynomials are indexed by n >= 0")
    return _legendre_raw(n).compose_affine(2, -1)


def shifted_integral_exact(n: int) -> RationalPoly:
    """Exact antiderivative of Q_n vanishing at 0, i.e. t -> int_0^t Q_n.

    Equals t for n = 0 and I_n(2t - 1)/2 for n >= 1.
    """
    if n < 0:
        raise ValueError("shifted polynomials are indexed by n >= 0")
    if n == 0:
        return RationalPoly([0, 1])
    integral = legendre_integral_exact(n).re
    return integral.compose_affine(2, -1) * Fraction(1, 2)


def _check_sym_unit(x: float) -> None:
    if not -1.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [-1, 1]")


def _check_unit(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t={t} outside [0, 1]")


def _legendre_float(n: int, x: float) -> float:
    if n == 0:
        return 1.0
    pm1, p = 1.0, x
    for m in range(1, n):
        pm1, p = p, ((2 * m + 1) * x * p - m * pm1) / (m + 1)
    return p


def legendre(n: int, x: float) -> complex:
    """P_n(x) for any integer n; returns i*P_{-n-1}(x) when n <= -1."""
    _check_sym_unit(x)
    if n >= 0:
        return complex(_legendre_float(n, x), 0.0)
    return complex(0.0, _legendre_float(-n - 1, x))


def legendre_integral(n: int, x: float) -> complex:
    """I_n(x) for any integer n.

    For n >= 1 this is the integral of P_n from -1 to x; I_0(x) = x - i and
    I_{-n-1} = i*I_n for n >= 1, with I_{-1}(x) = i*x - 1.
    """
    _check_sym_unit(x)
    if n == 0:
        return complex(x, -1.0)
    if n == -1:
        return complex(-1.0, x)
    m = n if n >= 1 else -n - 1
    val = (_legendre_float(m + 1, x) - _legendre_float(m - 1, x)) / (2 * m + 1)
    return complex(val, 0.0) if n >= 1 else complex(0.0, val)


def shifted_legendre(n: int, t: float) -> float:
    """Q_n(t) = P_n(2t - 1) for n >= 0, t in [0, 1]."""
    if n < 0:
        raise ValueError("shifted polynomials are indexed by n >= 0")
    _check_unit(t)
    return _legendre_float(n, 2.0 * t - 1.0)


def shifted_integral(n: int, t: float) -> float:
    """int_0^t Q_n(r) dr for n >= 0, t in [0, 1]."""
    if n < 0:
        raise ValueError("shifted polynomials are indexed by n >= 0")
    _check_unit(t)
    if n == 0:
        return t
    x = 2.0 * t - 1.0
    return 0.5 * (_legendre_float(n + 1, x) - _legendre_float(n - 1, x)) / (2 * n + 1)


def legendre_all(nmax: int, x) -> np.ndarray:
    """P_0(x)..P_nmax(x) stacked along a new leading axis."""
    x = np.asarray(x, dtype=float)
    if x.size and (x.min() < -1.0 or x.max() > 1.0):
        raise DomainError("grid contains points outside [-1, 1]")
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = x
    for n in range(1, nmax):
        out[n + 1] = ((2 * n + 1) * x * out[n] - n * out[n - 1]) / (n + 1)
    return out


def legendre_int_all(nmax: int, x) -> np.ndarray:
    """Rows int_{-1}^x P_n(z) dz for n = 0..nmax (row 0 is 1 + x)."""
    x = np.asarray(x, dtype=float)
    p = legendre_all(nmax + 1, x)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0 + x
    for n in range(1, nmax + 1):
        out[n] = (p[n + 1] - p[n - 1]) / (2 * n + 1)
    return out


def jacobi_m1m1_exact(n: int) -> RationalPoly:
    """Exact Jacobi polynomial with both parameters -1 and degree n+1.

    Computed as (n/2) * I_n, valid for n >= 1.
    """
    if n < 1:
        raise ValueError("defined for n >= 1")
    return legendre_integral_exact(n).re * Fraction(n, 2)


def _rising(a: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out *= a + j
    return out


def _jacobi_series(n: int, alpha, beta) -> RationalPoly:
    # Defining series in ((x-1)/2)^k; cross-check oracle only.  The public
    # surface supports the parameter pairs (0,0) and (-1,-1); anything else
    # is untested here.
    alpha = as_fraction(alpha)
    beta = as_fraction(beta)
    half_xm1 = RationalPoly([Fraction(-1, 2), Fraction(1, 2)])
    acc = RationalPoly()
    power = RationalPoly([1])
    for k in range(n + 1):
        coef = (
            Fraction(math.comb(n, k))
            * _rising(n + alpha + beta + 1, k)
            * _rising(alpha + k + 1, n - k)
        )
        acc = acc + coef * power
        power = power * half_xm1
    return acc * Fraction(1, math.factorial(n))


@dataclass(frozen=True)
class DarbouxApproximant:
    """Main-term cosine approximant for a Jacobi polynomial of large degree.

    Valid on [theta_min, theta_max] strictly inside (0, pi); the underlying
    error bound degenerates at the endpoints, so they are refused.
    """

    alpha: Fraction
    beta: Fraction
    n: int
    theta_min: float
    theta_max: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("degree must be positive")
        if not (0.0 < self.theta_min <= self.theta_max < math.pi):
            raise ValueError("need 0 < theta_min <= theta_max < pi")


def darboux_approximant(alpha, beta, n: int, eps: float = 1e-3) -> DarbouxApproximant:
    """Approximant with the default admissible window [eps, pi - eps]."""
    return DarbouxApproximant(as_fraction(alpha), as_fraction(beta), n, eps, math.pi - eps)


def darboux_main_term(apx: DarbouxApproximant, theta: float) -> float:
    """n^{-1/2} k(theta) cos((n + (alpha+beta+1)/2) theta - (alpha+1/2) pi/2)."""
    if not apx.theta_min <= theta <= apx.theta_max:
        raise DomainError(f"theta={theta} outside [{apx.theta_min}, {apx.theta_max}]")
    a = float(apx.alpha)
    b = float(apx.beta)
    k = (
        math.pi ** -0.5
        * math.sin(theta / 2.0) ** (-a - 0.5)
        * math.cos(theta / 2.0) ** (-b - 0.5)
    )
    phase = (apx.n + (a + b + 1.0) / 2.0) * theta - (a + 0.5) * math.pi / 2.0
    return apx.n ** -0.5 * k * math.cos(phase)
