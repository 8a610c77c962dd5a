from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qoscillator.exact_ring import (
    NotDivisible,
    OrderMismatch,
    PPoly,
    PRational,
    TruncatedSeries,
    Z,
    ZINV,
    ZLaurent,
    ZeroConstantTerm,
    AsymmetricElement,
    laurent_divide_exact,
    qpow,
    qr,
    ring_add,
    ring_mul,
    series_reciprocal,
    substitute_numeric,
)
from qoscillator.qfunctions import infinite_pochhammer, qfactorial

P = PPoly.monomial(1)


def test_ppoly_additive_inverse():
    assert (P**2 + (-(P**2))).is_zero()


def test_ppoly_cancellation():
    assert (1 + P**4) + (1 - P**4) == PPoly.const(2)


def test_ppoly_product():
    assert (1 - P**4) * (1 + P**4) == 1 - P**8


def test_laurent_sum_and_product():
    assert (Z + ZINV) + (Z - ZINV) == Z.scale(2)
    assert Z * ZINV == ZLaurent.const(1)


def test_ring_helpers_dispatch():
    assert ring_add(P, P) == PPoly.const(2) * P
    assert ring_mul(Z, ZINV) == ZLaurent.const(1)


def test_qpow_rejects_eighth_powers():
    with pytest.raises(ValueError):
        qpow(Fraction(1, 8))


def test_negative_power_needs_monomial():
    assert (P**3) ** -1 == PPoly.monomial(-3)
    with pytest.raises(Exception):
        (1 + P) ** -1


class TestPRational:
    def test_canonical_form_cancels_common_factor(self):
        x = PRational(1 - P**8, 1 - P**4)
        assert x.is_polynomial()
        assert x.as_ppoly() == 1 + P**4

    def test_denominator_is_monic_with_unit_constant(self):
        x = PRational(PPoly.const(3), PPoly({2: 2, 5: 4}))
        d = x.den.terms
        assert min(d) == 0
        assert d[max(d)] == 1

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            PRational(1) / PRational(0)

    def test_one_over_one_minus_q(self):
        x = 1 / (1 - qr(1))
        assert x * (1 - qr(1)) == PRational(1)


class TestTruncatedSeries:
    def test_product_truncates(self):
        a = TruncatedSeries.linear(1, 1, 1)
        b = TruncatedSeries.linear(1, -1, 1)
        assert a * b == TruncatedSeries.const(1, 1)

    def test_product_takes_min_order(self):
        a = TruncatedSeries([1, 1, 1], 2)
        b = TruncatedSeries([1, 1], 1)
        assert (a * b).order == 1

    def test_add_mismatched_orders(self):
        with pytest.raises(OrderMismatch):
            TruncatedSeries([1], 1) + TruncatedSeries([1], 2)

    def test_geometric_reciprocal(self):
        r = series_reciprocal(TruncatedSeries.linear(1, -1, 2))
        assert r == TruncatedSeries([1, 1, 1], 2)

    def test_reciprocal_of_one(self):
        assert series_reciprocal(TruncatedSeries.const(1, 5)) == TruncatedSeries.const(1, 5)

    def test_reciprocal_needs_unit(self):
        with pytest.raises(ZeroConstantTerm):
            series_reciprocal(TruncatedSeries.linear(0, 1, 3))
        with pytest.raises(ZeroConstantTerm):
            series_reciprocal(TruncatedSeries.linear(1 + Z, 1, 3))

    def test_reciprocal_of_infinite_product(self):
        # 1/(t;q)_inf = sum t^n/(q;q)_n
        r = infinite_pochhammer(1, 3).reciprocal()
        expected = TruncatedSeries([ZLaurent.const(1 / qfactorial(n)) for n in range(4)], 3)
        assert r == expected


class TestDivision:
    def test_difference_of_squares(self):
        assert laurent_divide_exact(Z**2 - ZINV**2, Z - ZINV) == Z + ZINV

    def test_self_division(self):
        assert laurent_divide_exact(Z - ZINV, Z - ZINV) == ZLaurent.const(1)

    def test_parity_mismatch(self):
        with pytest.raises(NotDivisible):
            laurent_divide_exact(Z, Z - ZINV)

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            laurent_divide_exact(Z, ZLaurent())


class TestNumeric:
    def test_ppoly(self):
        assert substitute_numeric(P**4, 0.25) == pytest.approx(0.25)

    def test_quarter_power(self):
        assert substitute_numeric(P, 0.0625) == pytest.approx(0.5)

    def test_real_x_uses_chebyshev(self):
        assert substitute_numeric(Z + ZINV, 0.3, real_x=0.5) == pytest.approx(1.0)

    def test_hermite_two(self):
        h2 = Z**2 + ZLaurent.const(1 + qr(1)) + ZINV**2
        assert substitute_numeric(h2, 0.5, real_x=1.0) == pytest.approx(3.5)

    def test_asymmetric_needs_complex_z(self):
        with pytest.raises(AsymmetricElement):
            substitute_numeric(Z, 0.5, real_x=0.1)
        assert substitute_numeric(Z, 0.5, z_val=2j) == pytest.approx(2j)

    def test_params_are_substituted(self):
        f = Z + ZINV - ZLaurent.var("a")
        assert substitute_numeric(f, 0.5, real_x=0.25, params={"a": 0.2}) == pytest.approx(0.3)

    def test_unknown_param(self):
        with pytest.raises(KeyError):
            substitute_numeric(Z + ZINV, 0.5, real_x=0.1, params={"nope": 1.0})

    def test_q_out_of_range(self):
        with pytest.raises(ValueError):
            substitute_numeric(P, 1.0)


# --------------------------------------------------------------------------
# properties
# --------------------------------------------------------------------------

small_int = st.integers(-6, 6)
coeffs = st.integers(-20, 20)
ppolys = st.dictionaries(st.integers(-6, 10), coeffs, max_size=4).map(PPoly)
nonzero_ppolys = ppolys.filter(lambda x: not x.is_zero())
prationals = st.builds(PRational, ppolys, nonzero_ppolys)
zlaurents = st.dictionaries(
    st.tuples(st.integers(-3, 3), st.integers(0, 2)), prationals, max_size=4
).map(ZLaurent)
nonzero_zlaurents = zlaurents.filter(lambda x: not x.is_zero())


@settings(max_examples=40, deadline=None)
@given(prationals, prationals, prationals)
def test_prational_ring_axioms(x, y, w):
    assert (x + y) + w == x + (y + w)
    assert x * y == y * x
    assert x * (y + w) == x * y + x * w


@settings(max_examples=40, deadline=None)
@given(prationals, prationals)
def test_prational_equality_is_cross_multiplication(x, y):
    assert (x == y) == ((x.num * y.den) == (y.num * x.den))
    assert PRational(x.num, x.den) == x


@settings(max_examples=30, deadline=None)
@given(zlaurents, zlaurents, zlaurents)
def test_zlaurent_ring_axioms(x, y, w):
    assert (x * y) * w == x * (y * w)
    assert x + y == y + x
    assert x * (y + w) == x * y + x * w


@settings(max_examples=30, deadline=None)
@given(zlaurents, nonzero_zlaurents)
def test_exact_division_round_trip(a, b):
    assert laurent_divide_exact(a * b, b) == a


@settings(max_examples=25, deadline=None)
@given(st.lists(zlaurents, min_size=1, max_size=5), st.integers(-2, 2), st.integers(1, 5))
def test_series_reciprocal_is_inverse(tail, z_power, c0):
    head = ZLaurent.monomial(qr(1) * c0, z=z_power)
    s = TruncatedSeries([head] + tail, len(tail))
    assert s * series_reciprocal(s) == TruncatedSeries.const(1, s.order)


@settings(max_examples=40, deadline=None)
@given(
    st.dictionaries(st.integers(0, 8), st.integers(-1000, 1000), max_size=5).map(
        lambda d: PPoly({4 * e: c for e, c in d.items()})
    ),
    st.dictionaries(st.integers(0, 8), st.integers(-1000, 1000), max_size=5).map(
        lambda d: PPoly({4 * e: c for e, c in d.items()})
    ),
    st.floats(0.05, 0.95),
)
def test_substitution_is_a_homomorphism(x, y, q):
    sx, sy = substitute_numeric(x, q), substitute_numeric(y, q)
    assert substitute_numeric(x * y, q) == pytest.approx(sx * sy, rel=1e-12, abs=1e-9)
    assert substitute_numeric(x + y, q) == pytest.approx(sx + sy, rel=1e-12, abs=1e-9)
