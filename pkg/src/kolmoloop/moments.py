"""Exact moment engine.

The central objects are the weighted products

    m(p, q, k) = (p + q + 1) * int_{-1}^{1} x^{2k} I_p(x) I_q(x) dx

over all integers p, q and k >= 0.  Along the diagonal band p = n - a,
q = n + a these moments admit a partial fraction decomposition in n,

    m(n-a, n+a, k) = sum_l b(a,k,l) / (2n-2l-1)  -  sum_l b(a,k,l) / (2n+2l+3),

whose coefficient rows b(a,k,.) are computed here by induction on k.  The
row recurrences come from applying the Heaviside cover-up method to the
four-term moment recursion; the two pole locations that collide with a
squared factor of the denominator (l = 0 when a = 1, and l = a - 1 for
a >= 2) need the first-order expansion of the surrounding prefactors, not
just their pole values, and the implementation carries those cross terms.

The (l+1)-weighted row sums B(a,k) form a scaled Catalan triangle; they are
also available in closed binomial form and through a three-point stencil
recursion, and all three routes are cross-checked in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import CapacityError, SingularRecursionError
from .exact import GaussRational, solve_linear_system
from .legendre import legendre_integral_exact

__all__ = [
    "MomentKey",
    "set_order_caps",
    "order_caps",
    "moment_exact",
    "moment_recursed",
    "pfd_row",
    "pfd_row_from_moments",
    "pfd_moment",
    "weighted_row_sum",
    "weighted_row_sum_closed",
    "weighted_row_sum_recursed",
    "heaviside_residue",
    "catalan_number",
    "loop_even_moment",
    "loop_even_moment_tail",
    "loop_odd_moment",
    "loop_moment_limit",
    "loop_moment_gap_constant",
    "idat0_identity_holds",
]

_DEFAULT_MAX_K = 12
_DEFAULT_MAX_A = 12
_max_k = _DEFAULT_MAX_K
_max_a = _DEFAULT_MAX_A


def set_order_caps(max_k: int | None = None, max_a: int | None = None) -> None:
    """Raise the soft caps on the moment order k and band offset a.

    Values beyond the defaults (12, 12) are computed by the same exact code
    paths but sit outside the routinely tested range.
    """
    global _max_k, _max_a
    if max_k is not None:
        _max_k = max_k
    if max_a is not None:
        _max_a = max_a


def order_caps() -> tuple[int, int]:
    return _max_k, _max_a


@dataclass(frozen=True)
class MomentKey:
    p: int
    q: int
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if self.k > _max_k:
            raise CapacityError(f"moment order k={self.k} exceeds cap {_max_k}")


def catalan_number(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


def moment_exact(p: int, q: int, k: int) -> GaussRational:
    """m(p, q, k) by expanding the exact polynomials and integrating.

    This is the reference oracle: no recursion, just term-by-term
    integration of x^{2k} I_p I_q over [-1, 1].  The value is real whenever
    p + q is even; odd-parity keys can be purely imaginary.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    prod = legendre_integral_exact(p) * legendre_integral_exact(q)
    return prod.times_x_power(2 * k).definite_integral() * (p + q + 1)


def moment_recursed(p: int, q: int, k: int, _memo=None) -> GaussRational:
    """m(p, q, k) by the four-term recursion in k, grounded at k = 0 oracles.

    Every descent step requires p + q not in {-3, 1} at the node being
    expanded (those values zero the denominators p+q+3 and p+q-1).  Each
    step changes p + q by -2, 0 or +2, so the parity of p + q is invariant:
    all even-parity keys are safe, while odd-parity chains can reach the
    singular lines and are refused with SingularRecursionError.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if _memo is None:
        _memo = {}
    key = (p, q, k)
    if key in _memo:
        return _memo[key]
    if k == 0:
        val = moment_exact(p, q, 0)
    else:
        s = p + q
        if s == -3 or s == 1:
            raise SingularRecursionError(
                f"recursion for (p={p}, q={q}, k={k}) hits the singular line p+q={s}"
            )
        c_pp = Fraction((s + 1) * (p + 2) * (q + 2), (2 * p + 1) * (2 * q + 1) * (s + 3))
        c_mm = Fraction((s + 1) * (p - 1) * (q - 1), (2 * p + 1) * (2 * q + 1) * (s - 1))
        c_pm = Fraction((p + 2) * (q - 1), (2 * p + 1) * (2 * q + 1))
        c_mp = Fraction((p - 1) * (q + 2), (2 * p + 1) * (2 * q + 1))
        val = (
            moment_recursed(p + 1, q + 1, k - 1, _memo) * c_pp
            + moment_recursed(p - 1, q - 1, k - 1, _memo) * c_mm
            + moment_recursed(p + 1, q - 1, k - 1, _memo) * c_pm
            + moment_recursed(p - 1, q + 1, k - 1, _memo) * c_mp
        )
    _memo[key] = val
    return val


def _b(a: int, k: int, l: int) -> Fraction:
    a = abs(a)
    if l < 0 or l > k:
        return Fraction(0)
    return _pfd_row_raw(a, k)[l]


def pfd_row(a: int, k: int) -> tuple[Fraction, ...]:
    """Coefficient row b(a,k,0)..b(a,k,k), exactly, by induction on k.

    Row 0 is b(0,0,0) = 1, b(1,0,0) = -1/2, zero otherwise.  For k >= 1 the
    entries split into four cases by pole type:

    * generic l (l != 0, l != a-1): simple pole, plain cover-up;
    * l = 0 with a != 1: simple pole, but the sum over the previous row
      enters through the prefactor evaluated at the pole;
    * l = 0 with a = 1, and l = a-1 with a >= 2: the pole collides with a
      squared denominator factor.  The leading (double-pole) part cancels
      by the row constraints, and the residue picks up first-order terms of
      the prefactor expansions (the `head corrections` below).

    Rows are symmetric in the sign of a; only a >= 0 is stored.  The caps
    apply to requested rows; the induction internally visits helper rows
    with larger band offset at lower order.
    """
    a = abs(a)
    if k > _max_k or a > _max_a:
        raise CapacityError(f"row (a={a}, k={k}) exceeds caps {order_caps()}")
    return _pfd_row_raw(a, k)


@lru_cache(maxsize=None)
def _pfd_row_raw(a: int, k: int) -> tuple[Fraction, ...]:
    if k == 0:
        if a == 0:
            return (Fraction(1),)
        return (Fraction(-1, 2),) if a == 1 else (Fraction(0),)
    out = []
    for l in range(k + 1):
        if l == 0 and a == 1:
            v = Fraction(21, 32) * (
                _b(1, k - 1, 0) / 3
                - _b(1, k - 1, 1) / 8
                - sum(
                    Fraction(j + 1, (j - 1) * (j + 3)) * _b(1, k - 1, j)
                    for j in range(2, k)
                )
            )
            v += Fraction(-3, 16) * (
                _b(0, k - 1, 0) / 4
                + sum(Fraction(j + 1, j * (j + 2)) * _b(0, k - 1, j) for j in range(1, k))
            )
            v += Fraction(21, 16) * (
                _b(2, k - 1, 0) / 4
                + sum(Fraction(j + 1, j * (j + 2)) * _b(2, k - 1, j) for j in range(1, k))
            )
            # head corrections from the first-order prefactor expansions
            v += Fraction(5, 16) * _b(1, k - 1, 1)
            v += Fraction(11, 32) * sum(_b(1, k - 1, j) / Fraction(j + 1) for j in range(k))
            v += Fraction(13, 64) * _b(0, k - 1, 0)
            v += Fraction(37, 64) * _b(2, k - 1, 0)
        elif l == 0:
            den = (a - 1) * (a + 1)
            v = Fraction((2 * a - 5) * (2 * a + 5), 32 * den) * _b(a, k - 1, 1)
            v -= Fraction((2 * a + 1) * (2 * a - 1), 8 * den) * sum(
                _b(a, k - 1, j) / Fraction(j + 1) for j in range(k)
            )
            v += Fraction((2 * a - 5) * (2 * a - 1), 16 * den) * _b(a - 1, k - 1, 0)
            v += Fraction((2 * a + 1) * (2 * a + 5), 16 * den) * _b(a + 1, k - 1, 0)
        elif l == a - 1:
            p1 = Fraction(3 * (4 * a + 3), 16 * (a + 1))
            p2 = Fraction(-3 * (4 * a - 3), 16 * (a - 1))
            p3 = Fraction(3 * (4 * a - 3), 16 * a)
            p4 = Fraction(-3 * (4 * a + 3), 16 * a)
            r1 = (
                Fraction(1, 2 * a) + Fraction(1, 3) + Fraction(1, 4 * a + 3)
                - Fraction(1, 4 * a) - Fraction(1, 2 * a + 2)
            )
            r2 = (
                Fraction(1, 2 * a) - Fraction(1, 3) + Fraction(1, 4 * a - 3)
                - Fraction(1, 4 * a) - Fraction(1, 2 * a - 2)
            )
            r3 = Fraction(1, 3) + Fraction(1, 4 * a - 3) - Fraction(1, 4 * a)
            r4 = Fraction(-1, 3) + Fraction(1, 4 * a + 3) - Fraction(1, 4 * a)
            v = -p1 * (
                _b(a, k - 1, a) / Fraction(4 * (a + 1))
                + sum(
                    Fraction(j + 1, (j - a) * (j + a + 2)) * _b(a, k - 1, j)
                    for j in range(k)
                    if j != a
                )
            ) + p1 * r1 * _b(a, k - 1, a)
            v += -p2 * (
                _b(a, k - 1, a - 2) / Fraction(4 * (a - 1))
                + sum(
                    Fraction(j + 1, (j + a) * (j - a + 2)) * _b(a, k - 1, j)
                    for j in range(k)
                    if j != a - 2
                )
            ) + p2 * r2 * _b(a, k - 1, a - 2)
            v += -p3 * (
                _b(a - 1, k - 1, a - 1) / Fraction(4 * a)
                + sum(
                    Fraction(j + 1, (j - a + 1) * (j + a + 1)) * _b(a - 1, k - 1, j)
                    for j in range(k)
                    if j != a - 1
                )
            ) + p3 * r3 * _b(a - 1, k - 1, a - 1)
            v += -p4 * (
                _b(a + 1, k - 1, a - 1) / Fraction(4 * a)
                + sum(
                    Fraction(j + 1, (j - a + 1) * (j + a + 1)) * _b(a + 1, k - 1, j)
                    for j in range(k)
                    if j != a - 1
                )
            ) + p4 * r4 * _b(a + 1, k - 1, a - 1)
        else:
            v = Fraction(
                (l + 1) * (2 * l - 2 * a + 5) * (2 * l + 2 * a + 5),
                16 * (l + 2) * (l - a + 1) * (l + a + 1),
            ) * _b(a, k - 1, l + 1)
            v += Fraction(
                (l + 1) * (2 * l - 2 * a - 1) * (2 * l + 2 * a - 1),
                16 * l * (l - a + 1) * (l + a + 1),
            ) * _b(a, k - 1, l - 1)
            v += Fraction(
                (2 * l - 2 * a + 5) * (2 * l + 2 * a - 1), 16 * (l - a + 1) * (l + a + 1)
            ) * _b(a - 1, k - 1, l)
            v += Fraction(
                (2 * l - 2 * a - 1) * (2 * l + 2 * a + 5), 16 * (l - a + 1) * (l + a + 1)
            ) * _b(a + 1, k - 1, l)
        out.append(v)
    return tuple(out)


def pfd_row_from_moments(a: int, k: int) -> tuple[Fraction, ...]:
    """Independent route to the coefficient row: exact linear solve.

    Evaluates the oracle moments at k+1 distinct integer n and inverts the
    resulting (Cauchy-like) system.  Used to cross-check `pfd_row`.
    """
    a = abs(a)
    ns = list(range(a + 1, a + k + 2))
    rows = [
        [Fraction(1, 2 * n - 2 * l - 1) - Fraction(1, 2 * n + 2 * l + 3) for l in range(k + 1)]
        for n in ns
    ]
    rhs = []
    for n in ns:
        m = moment_exact(n - a, n + a, k)
        if not m.is_real:
            raise ArithmeticError(f"moment ({n - a},{n + a},{k}) is not real")
        rhs.append(m.re)
    return tuple(solve_linear_system(rows, rhs))


def pfd_moment(a: int, k: int, n: int) -> Fraction:
    """m(n-a, n+a, k) through the partial fraction decomposition."""
    row = pfd_row(abs(a), k)
    pos = sum(row[l] / Fraction(2 * n - 2 * l - 1) for l in range(k + 1))
    neg = sum(row[l] / Fraction(2 * n + 2 * l + 3) for l in range(k + 1))
    return pos - neg


def weighted_row_sum(a: int, k: int) -> Fraction:
    """B(a,k) = sum_l (l+1) b(a,k,l) from the coefficient table."""
    row = pfd_row(abs(a), k)
    return sum(Fraction(l + 1) * row[l] for l in range(k + 1))


def _comb0(n: int, r: int) -> int:
    return math.comb(n, r) if 0 <= r <= n else 0


def weighted_row_sum_closed(a: int, k: int) -> Fraction:
    """Closed binomial form of B(a,k); reduces to 4^{-k} C_k at a = 0."""
    a = abs(a)
    if a == 0 and k == 0:
        return Fraction(1)
    central = Fraction(_comb0(2 * k, k + a))
    wings = Fraction(_comb0(2 * k, k + a - 1) + _comb0(2 * k, k + a + 1), 2)
    return (central - wings) / Fraction(4**k)


def weighted_row_sum_recursed(a: int, k: int) -> Fraction:
    """B(a,k) by the (1/4, 1/2, 1/4) stencil on the previous k-row."""
    a = abs(a)
    row = {0: Fraction(1), 1: Fraction(-1, 2), -1: Fraction(-1, 2)}
    for level in range(1, k + 1):
        prev = row

        def get(i):
            return prev.get(i, Fraction(0))

        width = level + 1
        row = {
            i: get(i - 1) / 4 + get(i) / 2 + get(i + 1) / 4
            for i in range(-width, width + 1)
        }
    return row.get(a, Fraction(0))


def heaviside_residue(a: int, k: int, c: int) -> Fraction:
    """Residue bookkeeping value d(a,k,c); symmetric in (a, c).

    d(a,k,0) = -sum_l b(a,k,l)/(l+1) and d(a,k,c) = b(a,k,c-1)/(2c) for
    c >= 1.  The symmetry d(a,k,c) = d(c,k,a) encodes the row constraints.
    """
    if c < 0:
        raise ValueError("c must be nonnegative")
    if c == 0:
        row = pfd_row(abs(a), k)
        return -sum(row[l] / Fraction(l + 1) for l in range(k + 1))
    return _b(a, k, c - 1) / Fraction(2 * c)


def loop_even_moment(k: int, N: int) -> Fraction:
    """Exact 2k-th moment of the rescaled diagonal kernel at truncation N.

    Evaluates N * (1/(2k+1) - 1/(2k+3) - (1/2) sum_{n=1}^{N-1} m(n,n,k))
    with the diagonal moments taken from the partial fraction form, which
    has no degree cap.
    """
    if N < 1:
        raise ValueError("N must be positive")
    diag = sum((pfd_moment(0, k, n) for n in range(1, N)), Fraction(0))
    return N * (Fraction(1, 2 * k + 1) - Fraction(1, 2 * k + 3) - diag / 2)


def loop_even_moment_tail(k: int, N: int) -> Fraction:
    """The same moment, as the explicit finite tail sum.

    Algebraically identical to `loop_even_moment`; the equality of both
    routes is a regression target.
    """
    row = pfd_row(0, k)
    total = Fraction(0)
    for l in range(k + 1):
        for n in range(1, 2 * l + 3):
            total += row[l] / Fraction(2 * N + 2 * n - 2 * l - 3)
    return Fraction(N, 2) * total


def loop_odd_moment(k: int, N: int) -> Fraction:
    """Odd moments of the diagonal kernel vanish identically."""
    if N < 1:
        raise ValueError("N must be positive")
    if k < 0:
        raise ValueError("k must be nonnegative")
    return Fraction(0)


def loop_moment_limit(k: int) -> Fraction:
    """Large-N limit of the 2k-th moment: (1/2) 4^{-k} C_k."""
    return Fraction(catalan_number(k), 2 * 4**k)


def loop_moment_gap_constant(k: int) -> Fraction:
    """Constant c_k with |moment(N) - limit| <= c_k / N for N >= 2k + 1.

    Each tail term b/(2N+c) deviates from its limit b/2 by at most
    |b c| / (2 (2N+c)), and 2N + c >= N in the admissible range.
    """
    row = pfd_row(0, k)
    total = Fraction(0)
    for l in range(k + 1):
        for n in range(1, 2 * l + 3):
            total += abs(row[l]) * abs(2 * n - 2 * l - 3)
    return total / 2


def idat0_identity_holds(k: int) -> bool:
    """Check sum_l (1/(2l+1) + 1/(2l+3)) b(0,k,l) = 2/(2k+1) - 2/(2k+3)."""
    row = pfd_row(0, k)
    lhs = sum((Fraction(1, 2 * l + 1) + Fraction(1, 2 * l + 3)) * row[l] for l in range(k + 1))
    return lhs == Fraction(2, 2 * k + 1) - Fraction(2, 2 * k + 3)
