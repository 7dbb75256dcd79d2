"""Factorial Hankel representation of the loop.

The step-N loop can be written as B_t minus a combination of the endpoint
iterated integrals, with polynomial weights alpha_1..alpha_N obtained from
the first row of V(t) V(1)^{-1}, where V(t) is the factorial Hankel matrix
(V(t))_{kl} = (-1)^{l-1} t^{k+l-1} / (k+l-1)!.  Everything here stays in
exact rational arithmetic: V(1) has condition number growing
super-exponentially, so a floating route would be meaningless past N ~ 8,
while the exact identities hold at any size.

`hankel_covariance` reassembles the loop covariance purely from this
representation; agreeing exactly with the shifted-Legendre form of the
covariance is the representation-equivalence check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import CapacityError, DomainError
from .exact import RationalPoly, as_fraction

__all__ = [
    "HankelSystem",
    "set_hankel_cap",
    "hankel_cap",
    "build_hankel_system",
    "cond_poly_closed",
    "cond_poly_from_inverse",
    "cond_value",
    "endpoint_weight",
    "nilpotent_exponential",
    "hankel_covariance",
]

_DEFAULT_CAP = 16
_cap = _DEFAULT_CAP


def set_hankel_cap(cap: int) -> None:
    """Adjust the maximum system size (factorial growth; default 16)."""
    global _cap
    if cap < 1:
        raise ValueError("cap must be positive")
    _cap = cap


def hankel_cap() -> int:
    return _cap


Matrix = tuple[tuple[Fraction, ...], ...]


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, m, p = len(a), len(b), len(b[0])
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)) for i in range(n)
    )


def _identity(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n)) for i in range(n)
    )


def _v1_entry(k: int, l: int) -> Fraction:
    # 1-indexed
    return Fraction((-1) ** (l - 1), math.factorial(k + l - 1))


def _v1inv_entry(N: int, k: int, l: int) -> Fraction:
    body = sum(
        math.comb(N - k + m, l - 1) * math.comb(N + m - 1, m) for m in range(k)
    )
    lead = (
        (-1) ** (N + l)
        * math.factorial(k - 1)
        * math.factorial(l)
        * math.comb(N - 1, k - 1)
        * math.comb(N + l - 1, l)
    )
    return Fraction(lead * body)


def cond_poly_closed(N: int, l: int) -> RationalPoly:
    """Conditioning polynomial alpha_l(t) by the closed binomial formula."""
    if not 1 <= l <= N:
        raise IndexError(f"l={l} outside 1..{N}")
    coeffs = [Fraction(0)] * (N + 1)
    for k in range(1, N + 1):
        body = sum(
            math.comb(N - k + m, l - 1) * math.comb(N + m - 1, m) for m in range(k)
        )
        lead = (
            (-1) ** (N + k + l + 1)
            * math.factorial(l - 1)
            * math.comb(N, k)
            * math.comb(N + l - 1, l - 1)
        )
        coeffs[k] = Fraction(lead * body)
    return RationalPoly(coeffs)


def nilpotent_exponential(N: int) -> Matrix:
    """exp(A) for the subdiagonal shift A: entries 1/(k-l)! for k >= l."""
    return tuple(
        tuple(
            Fraction(1, math.factorial(k - l)) if k >= l else Fraction(0)
            for l in range(N)
        )
        for k in range(N)
    )


@dataclass(frozen=True)
class HankelSystem:
    """Exact matrices and conditioning polynomials for one system size."""

    N: int
    V1: Matrix
    V1inv: Matrix
    cond_polys: tuple[RationalPoly, ...]
    expA: Matrix
    W11: Matrix  # endpoint second-moment matrix V(1) expA^T


@lru_cache(maxsize=None)
def build_hankel_system(N: int) -> HankelSystem:
    """Populate and verify the exact system for size N; built once per N."""
    if N < 1:
        raise ValueError("N must be positive")
    if N > _cap:
        raise CapacityError(f"N={N} exceeds the Hankel cap {_cap}")
    v1 = tuple(tuple(_v1_entry(k, l) for l in range(1, N + 1)) for k in range(1, N + 1))
    v1inv = tuple(
        tuple(_v1inv_entry(N, k, l) for l in range(1, N + 1)) for k in range(1, N + 1)
    )
    if _mat_mul(v1, v1inv) != _identity(N):
        raise AssertionError(f"closed-form inverse failed verification at N={N}")
    polys = tuple(cond_poly_closed(N, l) for l in range(1, N + 1))
    if any(p.degree > N for p in polys):
        raise AssertionError("conditioning polynomial exceeds degree N")
    expa = nilpotent_exponential(N)
    w11 = _mat_mul(v1, tuple(zip(*expa)))
    for i in range(N):
        for j in range(i):
            if w11[i][j] != w11[j][i]:
                raise AssertionError("endpoint moment matrix is not symmetric")
    return HankelSystem(N, v1, v1inv, polys, expa, w11)


def cond_poly_from_inverse(sys: HankelSystem, l: int) -> RationalPoly:
    """alpha_l(t) as row 1 of V(t) V(1)^{-1}; matrix route for cross-checks."""
    if not 1 <= l <= sys.N:
        raise IndexError(f"l={l} outside 1..{sys.N}")
    coeffs = [Fraction(0)] * (sys.N + 1)
    for k in range(1, sys.N + 1):
        # (V(t))_{1k} = (-1)^{k-1} t^k / k!
        coeffs[k] = Fraction((-1) ** (k - 1), math.factorial(k)) * sys.V1inv[k - 1][l - 1]
    return RationalPoly(coeffs)


def cond_value(sys: HankelSystem, l: int, t) -> Fraction:
    """Exact alpha_l(t) at a rational point."""
    t = as_fraction(t)
    if not 0 <= t <= 1:
        raise DomainError("t outside [0, 1]")
    if not 1 <= l <= sys.N:
        raise IndexError(f"l={l} outside 1..{sys.N}")
    return sys.cond_polys[l - 1](t)


def endpoint_weight(l: int, t) -> Fraction:
    """Covariance of the path value at t with the l-th endpoint integral.

    Equals int_0^t (1-r)^{l-1}/(l-1)! dr = (1 - (1-t)^l) / l!.
    """
    t = as_fraction(t)
    if l < 1:
        raise IndexError("l must be >= 1")
    return (1 - (1 - t) ** l) / Fraction(math.factorial(l))


def hankel_covariance(N: int, s, t) -> Fraction:
    """Loop covariance assembled purely from the Hankel representation.

    With a(t) the vector of conditioning polynomials and w(t) the endpoint
    weights, the loop B_t - a(t) . endpoint has covariance
    min(s,t) - a(t).w(s) - a(s).w(t) + a(s)^T W11 a(t).
    """
    s = as_fraction(s)
    t = as_fraction(t)
    if not (0 <= s <= 1 and 0 <= t <= 1):
        raise DomainError("(s, t) outside the unit square")
    sys = build_hankel_system(N)
    a_s = [sys.cond_polys[l](s) for l in range(N)]
    a_t = [sys.cond_polys[l](t) for l in range(N)]
    w_s = [endpoint_weight(l + 1, s) for l in range(N)]
    w_t = [endpoint_weight(l + 1, t) for l in range(N)]
    quad = sum(
        a_s[i] * sys.W11[i][j] * a_t[j] for i in range(N) for j in range(N)
    )
    return (
        min(s, t)
        - sum(at * ws for at, ws in zip(a_t, w_s))
        - sum(asv * wt for asv, wt in zip(a_s, w_t))
        + quad
    )
