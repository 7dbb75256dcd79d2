"""Factorial Hankel system: exact inverse, conditioning polynomials,
representation equivalence."""

import math
from fractions import Fraction

import pytest

from kolmoloop.errors import CapacityError
from kolmoloop.exact import RationalPoly, invert_matrix
from kolmoloop.hankel import (
    build_hankel_system,
    cond_poly_closed,
    cond_poly_from_inverse,
    cond_value,
    endpoint_weight,
    hankel_covariance,
    nilpotent_exponential,
)
from kolmoloop.kernels import loop_covariance_exact


def test_entries_at_small_sizes():
    sys1 = build_hankel_system(1)
    assert sys1.V1 == ((Fraction(1),),)
    assert sys1.V1inv == ((Fraction(1),),)
    assert sys1.cond_polys[0] == RationalPoly([0, 1])  # bridge: alpha_1(t) = t

    sys2 = build_hankel_system(2)
    assert sys2.V1 == (
        (Fraction(1), Fraction(-1, 2)),
        (Fraction(1, 2), Fraction(-1, 6)),
    )


def test_inverse_against_direct_inversion():
    for N in (2, 3, 5):
        sys_ = build_hankel_system(N)
        direct = invert_matrix([list(r) for r in sys_.V1])
        assert tuple(tuple(row) for row in direct) == sys_.V1inv


@pytest.mark.parametrize("N", range(1, 13))
def test_inverse_identity_up_to_twelve(N):
    # build_hankel_system verifies V1 @ V1inv == I internally
    sys_ = build_hankel_system(N)
    assert sys_.N == N


def test_capacity_cap():
    with pytest.raises(CapacityError):
        build_hankel_system(40)


@pytest.mark.parametrize("N", range(1, 11))
def test_cond_poly_two_routes(N):
    sys_ = build_hankel_system(N)
    for l in range(1, N + 1):
        assert cond_poly_from_inverse(sys_, l) == sys_.cond_polys[l - 1]
        assert sys_.cond_polys[l - 1].degree <= N


def test_cond_values():
    sys1 = build_hankel_system(1)
    assert cond_value(sys1, 1, Fraction(1, 3)) == Fraction(1, 3)
    sys5 = build_hankel_system(5)
    for l in range(1, 6):
        assert cond_value(sys5, l, Fraction(0)) == 0  # every term carries t^k, k >= 1


def test_exponential_of_shift_is_its_series():
    for N in range(1, 11):
        closed = nilpotent_exponential(N)
        # direct series: A is nilpotent, so the sum terminates at A^{N-1}
        a = [[Fraction(1) if k == l + 1 else Fraction(0) for l in range(N)] for k in range(N)]
        term = [[Fraction(1) if i == j else Fraction(0) for j in range(N)] for i in range(N)]
        series = [row[:] for row in term]
        for power in range(1, N):
            term = [
                [sum(term[i][k] * a[k][j] for k in range(N)) / power for j in range(N)]
                for i in range(N)
            ]
            # dividing each matrix product by `power` accumulates A^p / p!
            series = [
                [series[i][j] + term[i][j] for j in range(N)] for i in range(N)
            ]
        assert tuple(tuple(r) for r in series) == closed
        for k in range(N):
            for l in range(N):
                expect = Fraction(1, math.factorial(k - l)) if k >= l else Fraction(0)
                assert closed[k][l] == expect


def test_endpoint_weight_closed_form():
    # int_0^t (1-r)^{l-1}/(l-1)! dr via the antiderivative
    for l in range(1, 7):
        base = RationalPoly([1])
        for _ in range(l - 1):
            base = base * RationalPoly([1, -1])
        integrand = base * Fraction(1, math.factorial(l - 1))
        for t in (Fraction(0), Fraction(1, 3), Fraction(1)):
            assert endpoint_weight(l, t) == integrand.antiderivative()(t)


def test_endpoint_moment_matrix():
    sys3 = build_hankel_system(3)
    for k in range(3):
        for l in range(3):
            expect = Fraction(1, math.factorial(k) * math.factorial(l) * (k + l + 1))
            assert sys3.W11[k][l] == expect


class TestCovariance:
    def test_bridge(self):
        assert hankel_covariance(1, Fraction(1, 4), Fraction(3, 4)) == Fraction(1, 16)

    def test_pinned(self):
        for N in (1, 3, 6):
            assert hankel_covariance(N, Fraction(0), Fraction(2, 5)) == 0
            assert hankel_covariance(N, Fraction(2, 5), Fraction(1)) == 0

    def test_matches_orthogonal_expansion_at_two(self):
        lhs = hankel_covariance(2, Fraction(1, 2), Fraction(1, 2))
        assert lhs == loop_covariance_exact(2, Fraction(1, 2), Fraction(1, 2))

    @pytest.mark.parametrize("N", range(1, 9))
    def test_representation_equivalence(self, N):
        pts = [Fraction(i, 8) for i in range(9)]
        for i, s in enumerate(pts):
            for t in pts[i:]:
                assert hankel_covariance(N, s, t) == loop_covariance_exact(N, s, t)


def test_closed_poly_formula_spot_values():
    # N=3: first row of V(t) V(1)^{-1} computed by hand-expanded product
    sys3 = build_hankel_system(3)
    for l in range(1, 4):
        expanded = RationalPoly(
            [Fraction(0)]
            + [
                Fraction((-1) ** (k - 1), math.factorial(k)) * sys3.V1inv[k - 1][l - 1]
                for k in range(1, 4)
            ]
        )
        assert cond_poly_closed(3, l) == expanded
