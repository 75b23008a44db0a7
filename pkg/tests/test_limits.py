from fractions import Fraction
from math import comb

import mpmath
import pytest

from urnlab.limits import (
    FINITE_SUM,
    SERIES,
    SHIFTED_SQUARE,
    SQUARE,
    TRIANGULAR,
    euler_phi_cubed,
    fixed_blacks_density,
    fixed_blacks_moment,
    fixed_blacks_moment_gammaform,
    fixed_whites_moment,
    fixed_whites_pmf,
    jacobi_triple_product,
    limit_cdf,
    limit_moment,
    limit_moment_product,
    theta,
)
from urnlab.numerics import FLOAT
from urnlab.oracle import absorption_pmf
from urnlab.weights import linear, square, two_color

ALL_FAMILIES = (SQUARE, TRIANGULAR, SHIFTED_SQUARE)


def mpf_close(a, b, tol):
    return abs(a - b) < tol


class TestFixedBlacksMoment:
    def test_single_factor(self):
        assert fixed_blacks_moment(1, 1) == Fraction(1, 2)

    def test_two_factors(self):
        assert fixed_blacks_moment(2, 1) == Fraction(2, 5)

    def test_strictly_decreasing_in_order_and_count(self):
        for m in range(1, 51):
            for s in range(1, 11):
                here = fixed_blacks_moment(m, s)
                assert fixed_blacks_moment(m, s + 1) < here
                assert fixed_blacks_moment(m + 1, s) < here

    def test_gamma_form_cross_check(self):
        for m, s in [(1, 1), (4, 2), (10, 5), (25, 3)]:
            exact = fixed_blacks_moment(m, s)
            viag = fixed_blacks_moment_gammaform(m, s)
            target = mpmath.mpf(exact.numerator) / exact.denominator
            assert mpf_close(viag, target, 1e-10)

    def test_approaches_sinh_limit(self):
        w1 = float(limit_moment(1, SQUARE))
        gap = abs(fixed_blacks_moment(1000, 1, mode=FLOAT) - w1)
        assert gap < 1e-2

    def test_tail_gap_scales_with_order(self):
        for s in range(1, 4):
            ws = float(limit_moment(s, SQUARE))
            gap = abs(fixed_blacks_moment(1000, s, mode=FLOAT) - ws)
            assert gap < 1e-2 * s

    def test_exact_finite_identity_against_oracle(self):
        # for unit-linear first color and square second color the factorial
        # moment ratio E(X^(s falling)) / n^(s falling) is the same finite
        # product exactly, already at finite n, m
        from urnlab.numerics import falling_factorial

        for n in range(1, 8):
            for m in range(1, 8):
                dist = absorption_pmf(two_color("I", linear(1), square(), n, m))
                for s in range(1, min(n, 4) + 1):
                    lhs = dist.factorial_moment(s)
                    rhs = falling_factorial(n, s) * fixed_blacks_moment(m, s)
                    assert lhs == rhs


class TestFixedBlacksDensity:
    def test_uniform_for_single_black(self):
        for q in (Fraction(0), Fraction(3, 10), Fraction(1)):
            assert fixed_blacks_density(1, q) == 1

    def test_integrates_to_one_exactly(self):
        # termwise integral of q^(l^2-1) is 1/l^2, so the integral reduces
        # to the alternating binomial-ratio sum, checked exactly to m = 20
        for m in range(1, 21):
            integral = 2 * sum(
                (1 if (ell - 1) % 2 == 0 else -1)
                * Fraction(comb(m, ell), comb(m + ell, m))
                for ell in range(1, m + 1)
            )
            assert integral == 1

    def test_first_moment_integral_matches_product(self):
        # termwise, integral of q * f_m(q) dq = sum of l^2/(l^2+1) weights
        for m in range(1, 16):
            integral = 2 * sum(
                (1 if (ell - 1) % 2 == 0 else -1)
                * Fraction(comb(m, ell), comb(m + ell, m))
                * Fraction(ell * ell, ell * ell + 1)
                for ell in range(1, m + 1)
            )
            assert integral == fixed_blacks_moment(m, 1)

    def test_range_guard(self):
        with pytest.raises(ValueError):
            fixed_blacks_density(2, Fraction(11, 10))


class TestFixedWhitesPmf:
    def test_single_survivor(self):
        with mpmath.workprec(300):
            want = mpmath.pi / mpmath.sinh(mpmath.pi)
            assert mpf_close(fixed_whites_pmf(1, 1), want, mpmath.mpf(10) ** -25)

    def test_complement(self):
        with mpmath.workprec(300):
            want = 1 - mpmath.pi / mpmath.sinh(mpmath.pi)
            assert mpf_close(fixed_whites_pmf(1, 0), want, mpmath.mpf(10) ** -25)

    def test_normalization_tight(self):
        # the pmf values are exact to far beyond 1e-20; sum them at matching
        # precision (mpmath rounds at operation time, not storage time)
        with mpmath.workprec(300):
            for n in range(1, 11):
                total = sum(fixed_whites_pmf(n, k) for k in range(n + 1))
                assert abs(total - 1) < mpmath.mpf(10) ** -20

    def test_series_matches_finite_sum_at_zero(self):
        # the series route needs the overall factor 2 (as implemented);
        # terms decay like ell^(-2n) so the tolerance is taken accordingly
        loose = fixed_whites_pmf(1, 0, method=SERIES, tol=1e-9)
        assert mpf_close(loose, fixed_whites_pmf(1, 0), 2e-9)
        tight = fixed_whites_pmf(3, 0, method=SERIES, tol=1e-25)
        assert mpf_close(tight, fixed_whites_pmf(3, 0), 1e-24)

    def test_series_refused_for_positive_k(self):
        with pytest.raises(ValueError, match="finite-sum"):
            fixed_whites_pmf(2, 1, method=SERIES)

    def test_series_budget_guard(self):
        with pytest.raises(ValueError, match="loosen tol"):
            fixed_whites_pmf(1, 0, method=SERIES, tol=1e-25, max_terms=1000)


class TestFixedWhitesMoment:
    def test_support_01_all_orders(self):
        with mpmath.workprec(300):
            p1 = fixed_whites_pmf(1, 1)
            for s in (1, 2, 3, 5):
                assert mpf_close(fixed_whites_moment(1, s), p1, mpmath.mpf(10) ** -24)

    def test_matches_pmf_summation(self):
        with mpmath.workprec(300):
            for n, s in [(1, 1), (3, 2), (4, 3), (2, 4)]:
                direct = sum(
                    mpmath.mpf(k) ** s * fixed_whites_pmf(n, k) for k in range(n + 1)
                )
                assert mpf_close(fixed_whites_moment(n, s), direct, 1e-15)


class TestLimitMoment:
    def test_square_value(self):
        with mpmath.workprec(300):
            want = mpmath.pi / mpmath.sinh(mpmath.pi)
            assert mpf_close(limit_moment(1, SQUARE), want, mpmath.mpf(10) ** -25)

    def test_shifted_square_value(self):
        with mpmath.workprec(300):
            want = 1 / mpmath.cosh(mpmath.pi)
            assert mpf_close(
                limit_moment(1, SHIFTED_SQUARE), want, mpmath.mpf(10) ** -25
            )
        assert abs(float(limit_moment(1, SHIFTED_SQUARE)) - 0.086266) < 1e-6

    def test_closed_forms_match_weight_products(self):
        # includes the triangular 2 s pi / cosh(...) variant, taken verbatim
        # and validated here against the defining product
        for family in ALL_FAMILIES:
            for s in (1, 2, 3, 5):
                closed = limit_moment(s, family)
                prod = limit_moment_product(s, family, tol=1e-13)
                assert mpf_close(closed, prod, 1e-11), (family, s)

    def test_square_is_limit_of_fixed_blacks(self):
        for s in (1, 2):
            gap = abs(
                float(limit_moment(s, SQUARE))
                - fixed_blacks_moment(10_000, s, mode=FLOAT)
            )
            assert gap < 1e-3

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            limit_moment(1, "cubic")


class TestThetaFunctions:
    def test_theta_at_zero(self):
        assert theta(0) == 1

    def test_theta_equals_triple_product(self):
        for tenths in range(1, 10):
            q = Fraction(tenths, 10)
            assert mpf_close(theta(q), jacobi_triple_product(q), 1e-12)

    def test_euler_cube_equals_alternating_series(self):
        q = Fraction(1, 2)
        series = mpmath.mpf(0)
        for ell in range(0, 60):
            term = (2 * ell + 1) * mpmath.mpf(0.5) ** (ell * (ell + 1) // 2)
            series += term if ell % 2 == 0 else -term
        assert mpf_close(euler_phi_cubed(q), series, 1e-12)

    def test_domain_guard(self):
        with pytest.raises(ValueError):
            theta(1)
        with pytest.raises(ValueError):
            jacobi_triple_product(Fraction(3, 2))


class TestLimitCdf:
    def test_zero_and_one(self):
        for family in ALL_FAMILIES:
            assert limit_cdf(0, family) == 0
            assert limit_cdf(1, family) == 1

    def test_near_one_square(self):
        assert limit_cdf(Fraction(99, 100), SQUARE) > mpmath.mpf("0.999")

    def test_monotone_on_kilopoint_grid(self):
        for family in ALL_FAMILIES:
            last = mpmath.mpf(-1)
            for i in range(0, 1001):
                value = limit_cdf(Fraction(i, 1000), family, tol=1e-25, bits=96)
                assert value - last > -mpmath.mpf(10) ** -20, (family, i)
                last = value

    def test_shifted_square_series_sign_is_the_increasing_one(self):
        # with the printed parity the partial sums are negative; the
        # corrected parity gives a genuine CDF rising to 1
        v = limit_cdf(Fraction(1, 2), SHIFTED_SQUARE)
        assert 0 < v < 1

    def test_triangular_cdf_consistent_with_euler_cube(self):
        for tenths in range(1, 10):
            q = Fraction(tenths, 10)
            assert mpf_close(limit_cdf(q, TRIANGULAR), 1 - euler_phi_cubed(q), 1e-12)
