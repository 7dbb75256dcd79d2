"""Exact arithmetic building blocks.

Dense polynomials over the rationals, Gaussian-rational scalars (a + bi with
rational a, b), and polynomials with Gaussian-rational coefficients.  Floats
are rejected at the boundary so precision bugs cannot creep into the exact
layer unnoticed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

RatLike = Union[int, Fraction]

__all__ = [
    "RationalPoly",
    "GaussRational",
    "GaussRationalPoly",
    "as_fraction",
    "solve_linear_system",
    "invert_matrix",
]


def as_fraction(value: RatLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"exact arithmetic needs int or Fraction, got {type(value).__name__}")


class RationalPoly:
    """Dense polynomial over Q, coefficients in ascending degree order.

    Trailing zero coefficients are trimmed on construction, so the leading
    coefficient is nonzero unless the polynomial is zero (empty tuple).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RatLike] = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        """Degree of the polynomial, -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == RationalPoly([other])
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"RationalPoly({[str(c) for c in self.coeffs]})"

    def __neg__(self) -> "RationalPoly":
        return RationalPoly([-c for c in self.coeffs])

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return RationalPoly([
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
        ])

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RationalPoly):
            if not self.coeffs or not other.coeffs:
                return RationalPoly()
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, ci in enumerate(self.coeffs):
                if ci == 0:
                    continue
                for j, cj in enumerate(other.coeffs):
                    out[i + j] += ci * cj
            return RationalPoly(out)
        return RationalPoly([c * as_fraction(other) for c in self.coeffs])

    def __rmul__(self, other):
        return self.__mul__(other)

    def times_x_power(self, j: int) -> "RationalPoly":
        if not self.coeffs:
            return self
        return RationalPoly((Fraction(0),) * j + self.coeffs)

    def compose_affine(self, a: RatLike, b: RatLike) -> "RationalPoly":
        """Return p(a*x + b), exactly."""
        arg = RationalPoly([b, a])
        out = RationalPoly()
        for c in reversed(self.coeffs):
            out = out * arg + RationalPoly([c])
        return out

    def derivative(self) -> "RationalPoly":
        return RationalPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def antiderivative(self) -> "RationalPoly":
        """Antiderivative vanishing at 0."""
        return RationalPoly([Fraction(0)] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def definite_integral(self, lo: RatLike = -1, hi: RatLike = 1) -> Fraction:
        anti = self.antiderivative()
        return anti(as_fraction(hi)) - anti(as_fraction(lo))

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc


@dataclass(frozen=True)
class GaussRational:
    """Gaussian rational scalar re + im*i."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", as_fraction(self.re))
        object.__setattr__(self, "im", as_fraction(self.im))

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __add__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussRational":
        return GaussRational(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, GaussRational):
            return GaussRational(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        c = as_fraction(other)
        return GaussRational(self.re * c, self.im * c)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def times_i(self) -> "GaussRational":
        return GaussRational(-self.im, self.re)


@dataclass(frozen=True)
class GaussRationalPoly:
    """Polynomial with Gaussian-rational coefficients, stored as (re, im) parts."""

    re: RationalPoly
    im: RationalPoly

    @staticmethod
    def from_real(p: RationalPoly) -> "GaussRationalPoly":
        return GaussRationalPoly(p, RationalPoly())

    @staticmethod
    def from_imag(p: RationalPoly) -> "GaussRationalPoly":
        return GaussRationalPoly(RationalPoly(), p)

    @property
    def degree(self) -> int:
        return max(self.re.degree, self.im.degree)

    @property
    def is_real(self) -> bool:
        return self.im.is_zero()

    @property
    def is_imaginary(self) -> bool:
        return self.re.is_zero()

    def __add__(self, other: "GaussRationalPoly") -> "GaussRationalPoly":
        return GaussRationalPoly(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussRationalPoly") -> "GaussRationalPoly":
        return GaussRationalPoly(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussRationalPoly":
        return GaussRationalPoly(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, GaussRationalPoly):
            return GaussRationalPoly(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return GaussRationalPoly(self.re * other, self.im * other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def times_i(self) -> "GaussRationalPoly":
        return GaussRationalPoly(-self.im, self.re)

    def times_x_power(self, j: int) -> "GaussRationalPoly":
        return GaussRationalPoly(self.re.times_x_power(j), self.im.times_x_power(j))

    def definite_integral(self, lo: RatLike = -1, hi: RatLike = 1) -> GaussRational:
        return GaussRational(self.re.definite_integral(lo, hi), self.im.definite_integral(lo, hi))

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            return GaussRational(self.re(x), self.im(x))
        return complex(self.re(float(x)), self.im(float(x)))


def solve_linear_system(
    rows: Sequence[Sequence[RatLike]], rhs: Sequence[RatLike]
) -> list[Fraction]:
    """Solve a square rational system exactly by Gauss-Jordan elimination."""
    m = len(rhs)
    aug = [[as_fraction(x) for x in rows[i]] + [as_fraction(rhs[i])] for i in range(m)]
    for col in range(m):
        piv = next((r for r in range(col, m) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[i][m] for i in range(m)]


def invert_matrix(rows: Sequence[Sequence[RatLike]]) -> list[list[Fraction]]:
    """Exact inverse of a square rational matrix."""
    n = len(rows)
    cols = []
    for j in range(n):
        e = [Fraction(1) if i == j else Fraction(0) for i in range(n)]
        cols.append(solve_linear_system(rows, e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]
