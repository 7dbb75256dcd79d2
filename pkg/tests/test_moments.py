"""Moment engine: oracle values, dual routes, Catalan structure."""

from fractions import Fraction

import pytest

from kolmoloop.errors import SingularRecursionError
from kolmoloop.exact import GaussRational
from kolmoloop.moments import (
    catalan_number,
    heaviside_residue,
    idat0_identity_holds,
    loop_even_moment,
    loop_even_moment_tail,
    loop_moment_gap_constant,
    loop_moment_limit,
    loop_odd_moment,
    moment_exact,
    moment_recursed,
    pfd_moment,
    pfd_row,
    pfd_row_from_moments,
    weighted_row_sum,
    weighted_row_sum_closed,
    weighted_row_sum_recursed,
)


class TestOracle:
    def test_diagonal_base(self):
        # m(n,n,0) = 1/(2n-1) - 1/(2n+3) at n = 1
        assert moment_exact(1, 1, 0) == Fraction(4, 5)

    def test_zero_index(self):
        # m(0,0,k) = 2/(2k+3) - 2/(2k+1), here k = 1
        assert moment_exact(0, 0, 1) == Fraction(-4, 15)

    def test_wide_band_vanishes(self):
        # zero whenever k <= a-2; here a = 3, k = 1
        assert moment_exact(0, 6, 1) == 0

    def test_offdiagonal_base(self):
        assert moment_exact(1, 3, 0) == Fraction(-2, 21)

    def test_odd_parity_keys_can_be_imaginary(self):
        val = moment_exact(0, 1, 0)
        assert val == GaussRational(Fraction(0), Fraction(4, 3))

    def test_even_parity_keys_real(self):
        for p in range(-4, 5):
            for q in range(-4, 5):
                if (p + q) % 2 == 0:
                    assert moment_exact(p, q, 1).is_real

    def test_negative_index_symmetry(self):
        # m(-p-1, -q-1, k) = m(p, q, k)
        for (p, q, k) in [(1, 1, 0), (2, 4, 1), (0, 2, 2)]:
            assert moment_exact(-p - 1, -q - 1, k) == moment_exact(p, q, k)


class TestRecursion:
    @pytest.mark.parametrize("p,q", [(2, 2), (1, 3), (0, 2), (3, 5)])
    def test_matches_oracle(self, p, q):
        for k in (1, 2, 3):
            assert moment_recursed(p, q, k) == moment_exact(p, q, k)

    def test_base_case_is_oracle(self):
        assert moment_recursed(0, 0, 0) == moment_exact(0, 0, 0)

    def test_negative_indices(self):
        for (p, q, k) in [(-2, 2, 1), (-3, -1, 2), (-4, 2, 2)]:
            assert moment_recursed(p, q, k) == moment_exact(p, q, k)

    def test_even_parity_block(self):
        # even p+q keeps the recursion away from the singular lines
        for p in range(-6, 7):
            for q in range(-6, 7):
                if (p + q) % 2 != 0:
                    continue
                for k in (1, 2, 3, 4):
                    assert moment_recursed(p, q, k) == moment_exact(p, q, k)

    def test_odd_parity_far_from_singular_lines(self):
        # odd p+q is fine when |p+q - s| > 2(k-1) for both s in {-3, 1}
        for (p, q, k) in [(3, 4, 2), (2, 5, 2), (-4, -3, 2), (4, 5, 3)]:
            assert moment_recursed(p, q, k) == moment_exact(p, q, k)

    def test_singular_line_refused(self):
        with pytest.raises(SingularRecursionError):
            moment_recursed(0, 1, 1)
        with pytest.raises(SingularRecursionError):
            moment_recursed(-1, -2, 1)


class TestCoefficientRows:
    def test_k0_initial_conditions(self):
        assert pfd_row(0, 0) == (Fraction(1),)
        assert pfd_row(1, 0) == (Fraction(-1, 2),)
        assert pfd_row(5, 0) == (Fraction(0),)

    def test_symmetric_in_sign(self):
        assert pfd_row(-2, 3) == pfd_row(2, 3)

    def test_row_01(self):
        assert pfd_row(0, 1) == (Fraction(3, 16), Fraction(1, 32))

    def test_row_11(self):
        assert pfd_row(1, 1) == (Fraction(-1, 8), Fraction(1, 16))

    @pytest.mark.parametrize("a", range(0, 7))
    @pytest.mark.parametrize("k", range(0, 7))
    def test_recurrences_match_linear_solve(self, a, k):
        assert pfd_row(a, k) == pfd_row_from_moments(a, k)

    def test_row_02_weighted_sum_is_catalan(self):
        row = pfd_row(0, 2)
        assert sum(Fraction(l + 1) * c for l, c in enumerate(row)) == Fraction(1, 8)


class TestPartialFractionForm:
    def test_diagonal_example(self):
        assert pfd_moment(0, 0, 1) == Fraction(4, 5)

    def test_band_one_example(self):
        assert pfd_moment(1, 0, 2) == Fraction(-2, 21)

    def test_wide_band_zero(self):
        assert pfd_moment(3, 0, 5) == 0

    def test_negative_band_uses_symmetry(self):
        assert pfd_moment(-2, 1, 4) == pfd_moment(2, 1, 4)

    def test_oracle_equivalence_block(self):
        for a in range(0, 5):
            for k in range(0, 5):
                for n in range(a + 1, a + 9):
                    assert pfd_moment(a, k, n) == moment_exact(n - a, n + a, k)


class TestRowConstraints:
    @pytest.mark.parametrize("k", range(0, 7))
    def test_zero_row_ties_to_band_rows(self, k):
        # b(0,k,a-1) + 2a sum_l b(a,k,l)/(l+1) = 0
        for a in range(1, 7):
            lhs = pfd_row(0, k)[a - 1] if a - 1 <= k else Fraction(0)
            total = sum(c / Fraction(l + 1) for l, c in enumerate(pfd_row(a, k)))
            assert lhs + 2 * a * total == 0

    @pytest.mark.parametrize("k", range(0, 7))
    def test_cross_band_symmetry(self, k):
        # b(c,k,a-1)/a = b(a,k,c-1)/c
        for a in range(1, 7):
            for c in range(1, 7):
                b_ca = pfd_row(c, k)[a - 1] if a - 1 <= k else Fraction(0)
                b_ac = pfd_row(a, k)[c - 1] if c - 1 <= k else Fraction(0)
                assert b_ca * c == b_ac * a

    def test_residue_symmetry(self):
        for k in range(0, 7):
            for a in range(0, 7):
                for c in range(0, 7):
                    assert heaviside_residue(a, k, c) == heaviside_residue(c, k, a)


class TestCatalanSums:
    def test_catalan_numbers(self):
        assert [catalan_number(k) for k in range(7)] == [1, 1, 2, 5, 14, 42, 132]

    def test_closed_form_values(self):
        assert weighted_row_sum_closed(0, 2) == Fraction(1, 8)
        assert weighted_row_sum_closed(1, 0) == Fraction(-1, 2)
        assert weighted_row_sum_closed(4, 2) == 0
        assert weighted_row_sum_closed(2, 1) == Fraction(-1, 8)

    def test_recursion_values(self):
        assert weighted_row_sum_recursed(0, 1) == Fraction(1, 4)
        assert weighted_row_sum_recursed(2, 1) == Fraction(-1, 8)
        assert weighted_row_sum_recursed(0, 3) == Fraction(5, 64)

    @pytest.mark.parametrize("a", range(0, 9))
    @pytest.mark.parametrize("k", range(0, 9))
    def test_three_routes_agree(self, a, k):
        closed = weighted_row_sum_closed(a, k)
        assert weighted_row_sum(a, k) == closed
        assert weighted_row_sum_recursed(a, k) == closed

    def test_vanishes_past_band(self):
        for a in range(2, 9):
            for k in range(0, a - 1):
                assert weighted_row_sum_closed(a, k) == 0

    def test_zero_band_is_scaled_catalan(self):
        for k in range(0, 11):
            assert weighted_row_sum_closed(0, k) == Fraction(catalan_number(k), 4**k)

    def test_scaled_triangle_stencil(self):
        # 4^k B(a,k) satisfies the (1,2,1) stencil of the Catalan triangle
        for k in range(1, 9):
            for a in range(0, 9):
                lhs = 4**k * weighted_row_sum_closed(a, k)
                rhs = (
                    4 ** (k - 1) * weighted_row_sum_closed(a - 1, k - 1)
                    + 2 * 4 ** (k - 1) * weighted_row_sum_closed(a, k - 1)
                    + 4 ** (k - 1) * weighted_row_sum_closed(a + 1, k - 1)
                )
                assert lhs == rhs

    def test_semicircle_moment_recurrence(self):
        # the limits (1/2) 4^{-k} C_k satisfy C_{k+1} = 2(2k+1)/(k+2) C_k
        for k in range(0, 10):
            assert catalan_number(k + 1) * (k + 2) == 2 * (2 * k + 1) * catalan_number(k)
            assert loop_moment_limit(k) == Fraction(catalan_number(k), 2 * 4**k)


class TestDiagonalKernelMoments:
    def test_first_step_even_moment(self):
        # empty diagonal sum at N = 1
        assert loop_even_moment(0, 1) == Fraction(2, 3)

    def test_odd_moments_vanish(self):
        for k in range(0, 6):
            for N in (1, 7, 40):
                assert loop_odd_moment(k, N) == 0

    @pytest.mark.parametrize("k", range(0, 5))
    def test_tail_form_identity(self, k):
        for N in (1, 10, 50, 137):
            assert loop_even_moment(k, N) == loop_even_moment_tail(k, N)

    @pytest.mark.parametrize("k", range(0, 5))
    def test_convergence_rate_to_limit(self, k):
        ck = loop_moment_gap_constant(k)
        for N in (50, 100, 200):
            gap = abs(loop_even_moment(k, N) - loop_moment_limit(k))
            assert gap <= ck / N

    def test_limit_values(self):
        assert loop_moment_limit(0) == Fraction(1, 2)
        assert loop_moment_limit(1) == Fraction(1, 8)


@pytest.mark.parametrize("k", range(0, 9))
def test_alternating_weight_identity(k):
    assert idat0_identity_holds(k)


def test_moment_key_validates_caps():
    from kolmoloop.errors import CapacityError
    from kolmoloop.moments import MomentKey

    key = MomentKey(1, 1, 3)
    assert (key.p, key.q, key.k) == (1, 1, 3)
    with pytest.raises(ValueError):
        MomentKey(0, 0, -1)
    with pytest.raises(CapacityError):
        MomentKey(0, 0, 99)
