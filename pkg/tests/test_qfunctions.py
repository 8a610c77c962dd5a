from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qoscillator.exact_ring import (
    NotDivisible,
    PPoly,
    TruncatedSeries,
    Z,
    ZINV,
    ZLaurent,
    qpow,
    qr,
)
from qoscillator.qfunctions import (
    LowerParameterPole,
    P_polynomial,
    QPower,
    QuarterExponent,
    continuous_big_q_hermite,
    continuous_q_hermite,
    curly_E_q,
    finite_pochhammer_series,
    infinite_pochhammer,
    phi,
    q_binomial,
    q_exponential,
    q_laguerre,
    q_pochhammer,
    qfactorial,
    qpoch_scalar,
    wall_polynomial,
)

A = ZLaurent.var("a")
X = ZLaurent.var("x")
Q = qr(1)
ONE_Z = ZLaurent.const(1)


def _pascal_binomial(n: int, k: int) -> PPoly:
    # q-Pascal rule [n k] = [n-1 k-1] + q^k [n-1 k], independent of the division route
    if k < 0 or k > n:
        return PPoly()
    if k == 0 or k == n:
        return PPoly.const(1)
    return _pascal_binomial(n - 1, k - 1) + qpow(k) * _pascal_binomial(n - 1, k)


class TestPochhammer:
    def test_empty_product(self):
        assert q_pochhammer(A, 0) == ONE_Z

    def test_two_factors(self):
        assert q_pochhammer(A, 2) == (1 - A) * (1 - A.scale(Q))

    def test_q_base(self):
        expected = (1 - qr(1)) * (1 - qr(2)) * (1 - qr(3))
        assert q_pochhammer(Q, 3) == ZLaurent.const(expected)
        assert qfactorial(3) == expected

    def test_negative_length(self):
        with pytest.raises(ValueError):
            q_pochhammer(A, -1)

    def test_infinite_product_matches_euler(self):
        # (t;q)_inf = sum (-1)^n q^{n(n-1)/2} t^n/(q;q)_n
        s = infinite_pochhammer(1, 10)
        for n in range(11):
            expected = qr(Fraction(n * (n - 1), 2)) * (-1) ** n / qfactorial(n)
            assert s[n] == ZLaurent.const(expected)

    def test_finite_product_is_honest(self):
        s = finite_pochhammer_series(A, 2, 3)
        assert s[1] == -(A + A.scale(Q))
        assert s[2] == (A * A).scale(Q)
        assert s[3].is_zero()


class TestBinomial:
    @pytest.mark.parametrize(
        "n,k,expected",
        [(5, 0, {0: 1}), (2, 1, {0: 1, 4: 1}), (4, 2, {0: 1, 4: 1, 8: 2, 12: 1, 16: 1})],
    )
    def test_examples(self, n, k, expected):
        assert q_binomial(n, k) == PPoly(expected)

    @pytest.mark.parametrize("n", range(13))
    def test_matches_pascal_rule(self, n):
        for k in range(n + 1):
            assert q_binomial(n, k) == _pascal_binomial(n, k)

    def test_symmetry(self):
        for n in range(21):
            for k in range(n + 1):
                assert q_binomial(n, k) == q_binomial(n, n - k)

    def test_q_to_one_gives_ordinary_binomial(self):
        for n in range(13):
            for k in range(n + 1):
                assert sum(q_binomial(n, k).terms.values()) == comb(n, k)

    def test_out_of_range_is_zero(self):
        assert q_binomial(3, 4).is_zero()


class TestExponentials:
    def test_mu_zero_second_order(self):
        s = q_exponential(0, 1, 2)
        assert s[1] == ZLaurent.const(1 / (1 - Q))
        assert s[2] == ZLaurent.const(1 / ((1 - Q) * (1 - qr(2))))

    def test_mu_half_first_order(self):
        assert q_exponential("1/2", 1, 1)[1] == ZLaurent.const(qr(Fraction(1, 2)) / (1 - Q))

    def test_zero_argument(self):
        for mu in ("0", "1/4", "1/2", "3/4"):
            assert q_exponential(mu, 0, 4) == TruncatedSeries.const(1, 4)

    def test_small_e_is_reciprocal_product(self):
        assert q_exponential(0, 1, 12) == infinite_pochhammer(1, 12).reciprocal()

    def test_mu_half_is_a_product(self):
        # E^(1/2)(t) = (-q^{1/2} t; q)_inf
        assert q_exponential("1/2", 1, 12) == infinite_pochhammer(-qr(Fraction(1, 2)), 12)

    def test_mu_half_with_inverse_root_is_not_the_product(self):
        assert q_exponential("1/2", 1, 12) != infinite_pochhammer(-qr(Fraction(-1, 2)), 12)

    def test_curly_E_at_zero_is_quarter_exponential(self):
        assert curly_E_q(0, 12) == q_exponential("1/4", 1, 12)

    def test_curly_E_order_zero(self):
        assert curly_E_q(A, 0) == TruncatedSeries.const(1, 0)

    def test_curly_E_first_coefficient(self):
        expected = ((1 - A * Z) * (1 - A * ZINV)).scale(qr(Fraction(1, 4)) / (1 - Q))
        assert curly_E_q(A, 1)[1] == expected

    def test_quarter_exponent_parse(self):
        assert QuarterExponent.parse("3/4") == QuarterExponent(3)
        with pytest.raises(ValueError):
            QuarterExponent.parse("1/3")


class TestHypergeometric:
    def test_terminates_at_zero(self):
        assert phi([QPower(0), A], [QPower(3)], X) == ONE_Z

    @pytest.mark.parametrize("j", range(4))
    def test_two_phi_one_first_degree(self, j):
        # 2phi1(q^-1, 0; a q | q; q x) = 1 - x/(1 - a q) at a = q^j
        got = phi([QPower(-1), 0], [QPower(j + 1)], X.scale(Q))
        assert got == ONE_Z - X.scale(1 / (1 - qr(j + 1)))

    def test_formal_lower_parameter_is_not_polynomial(self):
        with pytest.raises(NotDivisible):
            phi([QPower(-1), 0], [A.scale(Q)], X.scale(Q))

    def test_one_phi_one_series_argument(self):
        order = 1
        tz = TruncatedSeries.linear(0, Z, order)
        t_over_z = TruncatedSeries.linear(0, ZINV, order)
        got = phi([0], [tz], t_over_z)
        assert got == TruncatedSeries([1, ZINV.scale(-1 / (1 - Q))], order)

    def test_lower_pole(self):
        with pytest.raises(LowerParameterPole):
            phi([QPower(-3)], [QPower(-1)], X)

    def test_nonterminating_needs_order(self):
        with pytest.raises(ValueError):
            phi([A], [], X)

    def test_qpower_termination_tag(self):
        assert QPower(-4).terminates_at == 4
        assert QPower(2).terminates_at is None
        assert QPower(Fraction(-1, 2)).terminates_at is None


class TestHermite:
    def test_low_degrees(self):
        assert continuous_q_hermite(0) == ONE_Z
        assert continuous_q_hermite(1) == Z + ZINV
        assert continuous_q_hermite(2) == Z**2 + ZLaurent.const(1 + Q) + ZINV**2

    @pytest.mark.parametrize("n", [0, 3, 8, 20])
    def test_symmetric_and_monic(self, n):
        h = continuous_q_hermite(n)
        assert h.is_symmetric()
        assert h.degree("z") == n
        assert h.coeff(z=n).is_one()

    def test_three_term_recurrence(self):
        # 2x H_n = H_{n+1} + (1 - q^n) H_{n-1}
        for n in range(1, 10):
            lhs = (Z + ZINV) * continuous_q_hermite(n)
            rhs = continuous_q_hermite(n + 1) + continuous_q_hermite(n - 1).scale(1 - qr(n))
            assert lhs == rhs

    def test_big_hermite_low_degrees(self):
        assert continuous_big_q_hermite(0) == ONE_Z
        assert continuous_big_q_hermite(1) == Z + ZINV - A

    @pytest.mark.parametrize("n", range(17))
    def test_big_hermite_at_zero(self, n):
        assert continuous_big_q_hermite(n).subs("a", 0) == continuous_q_hermite(n)

    def test_big_hermite_symmetric(self):
        assert continuous_big_q_hermite(6).is_symmetric()


class TestOtherFamilies:
    @pytest.mark.parametrize("n", range(5))
    def test_wall_at_origin(self, n):
        assert wall_polynomial(n, 2).subs("x", 0) == ONE_Z

    def test_wall_first_degree(self):
        assert wall_polynomial(1, 0) == ONE_Z - X.scale(1 / (1 - Q))

    @pytest.mark.parametrize("n,rho", [(0, 0), (2, 1), (3, 3)])
    def test_laguerre_at_origin(self, n, rho):
        expected = qpoch_scalar(qr(rho + 1), n) / qfactorial(n)
        assert q_laguerre(n, rho).subs("x", 0) == ZLaurent.const(expected)

    def test_laguerre_first_degree(self):
        assert q_laguerre(1, 0) == ONE_Z - X.scale(Q / (1 - Q))

    def test_laguerre_negative_rho(self):
        with pytest.raises(ValueError):
            q_laguerre(1, -1)

    def test_P_first_degree_plain(self):
        assert P_polynomial(1, 0, 0, 0) == ONE_Z - X.scale(1 / (Q * (1 - Q)))

    @pytest.mark.parametrize("mu", ["0", "1/4", "1/2", "3/4"])
    @pytest.mark.parametrize("nu", ["0", "1/2"])
    def test_P_first_degree(self, mu, nu):
        s = Fraction(mu) + Fraction(nu)
        assert P_polynomial(1, mu, nu, 0) == ONE_Z - X.scale(qr(s - 1) / (1 - Q))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 12), st.integers(0, 12))
def test_q_binomial_absorption(n, k):
    # [n+1 k+1](1 - q^{k+1}) = [n k](1 - q^{n+1})
    lhs = q_binomial(n + 1, k + 1) * (1 - qpow(k + 1))
    rhs = q_binomial(n, k) * (1 - qpow(n + 1))
    assert lhs == rhs
