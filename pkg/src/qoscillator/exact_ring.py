"""Exact arithmetic kernel.

Everything lives over the rationals with a single base variable ``p`` where
``q = p**4``; quarter-integer powers of ``q`` are therefore plain integer
powers of ``p``.

* :class:`PPoly`          Laurent polynomial in ``p``.
* :class:`PRational`      rational function in ``p``, kept in canonical form.
* :class:`ZLaurent`       sparse polynomial over :class:`PRational` in the
                          Laurent variable ``z`` and the formal parameters
                          ``a, alpha, beta, lam, x``.
* :class:`TruncatedSeries` power series in one expansion variable with
                          :class:`ZLaurent` coefficients.

All values are immutable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping, Union

import flint

BigRational = Fraction

_FQ = flint.fmpq_poly
_ONE_POLY = _FQ([1])
_ZERO_POLY = _FQ([])


class NotDivisible(ArithmeticError):
    """Raised when an exact quotient does not exist."""


class ZeroConstantTerm(ArithmeticError):
    """Raised when inverting a series whose constant term is not a unit."""


class AsymmetricElement(ValueError):
    """Raised when a real-x substitution is asked of a non z<->1/z symmetric element."""


class OrderMismatch(ValueError):
    pass


def _fmpq(c) -> flint.fmpq:
    if isinstance(c, flint.fmpq):
        return c
    if isinstance(c, int):
        return flint.fmpq(c)
    c = Fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


def _to_fraction(c: flint.fmpq) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def _valuation(poly: _FQ) -> int:
    for i, c in enumerate(poly.coeffs()):
        if c != 0:
            return i
    return 0


# --------------------------------------------------------------------------
# PPoly
# --------------------------------------------------------------------------


class PPoly:
    """Laurent polynomial in ``p`` with rational coefficients.

    Stored as ``p**shift * poly`` with ``poly`` a flint ``fmpq_poly`` whose
    constant term is nonzero (or ``poly == 0`` and ``shift == 0``).
    """

    __slots__ = ("_shift", "_poly", "_hash")

    def __init__(self, terms: Mapping[int, object] | None = None):
        terms = {e: Fraction(c) for e, c in (terms or {}).items() if c != 0}
        if not terms:
            self._shift, self._poly = 0, _ZERO_POLY
        else:
            lo, hi = min(terms), max(terms)
            coeffs = [0] * (hi - lo + 1)
            for e, c in terms.items():
                coeffs[e - lo] = _fmpq(c)
            self._shift, self._poly = lo, _FQ(coeffs)
        self._hash = None

    @classmethod
    def _raw(cls, shift: int, poly: _FQ) -> "PPoly":
        """Build from ``p**shift * poly``, renormalizing the valuation."""
        obj = cls.__new__(cls)
        if poly.is_zero():
            obj._shift, obj._poly = 0, _ZERO_POLY
        else:
            v = _valuation(poly)
            if v:
                poly = poly.right_shift(v)
            obj._shift, obj._poly = shift + v, poly
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, exponent: int, coeff=1) -> "PPoly":
        if coeff == 0:
            return cls()
        return cls._raw(exponent, _FQ([_fmpq(coeff)]))

    @classmethod
    def const(cls, c) -> "PPoly":
        return cls.monomial(0, c)

    @property
    def terms(self) -> dict[int, Fraction]:
        return {
            self._shift + i: _to_fraction(c)
            for i, c in enumerate(self._poly.coeffs())
            if c != 0
        }

    def is_zero(self) -> bool:
        return self._poly.is_zero()

    def is_one(self) -> bool:
        return self._shift == 0 and self._poly.is_one()

    def min_exponent(self) -> int:
        return self._shift

    def max_exponent(self) -> int:
        return self._shift + max(self._poly.degree(), 0)

    def is_monomial(self) -> bool:
        return self._poly.degree() == 0

    def _aligned(self, other: "PPoly"):
        s = min(self._shift, other._shift)
        a = self._poly.left_shift(self._shift - s) if self._shift > s else self._poly
        b = other._poly.left_shift(other._shift - s) if other._shift > s else other._poly
        return s, a, b

    def __add__(self, other):
        other = _as_ppoly(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        s, a, b = self._aligned(other)
        return PPoly._raw(s, a + b)

    __radd__ = __add__

    def __neg__(self):
        return PPoly._raw(self._shift, -self._poly)

    def __sub__(self, other):
        other = _as_ppoly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_ppoly(other)
        if other is NotImplemented:
            return other
        return PPoly._raw(self._shift + other._shift, self._poly * other._poly)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise NotDivisible("negative power of a non-monomial PPoly")
            c = self._poly.coeffs()[0]
            return PPoly._raw(self._shift * k, _FQ([c**k]))
        return PPoly._raw(self._shift * k, self._poly**k)

    def __eq__(self, other):
        other = _as_ppoly(other)
        if other is NotImplemented:
            return False
        return self._shift == other._shift and self._poly == other._poly

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._shift, tuple(self._poly.coeffs())))
        return self._hash

    def divide_exact(self, other: "PPoly") -> "PPoly":
        other = _as_ppoly(other)
        if other.is_zero():
            raise ZeroDivisionError("PPoly division by zero")
        quo, rem = divmod(self._poly, other._poly)
        if not rem.is_zero():
            raise NotDivisible("PPoly quotient is not a Laurent polynomial")
        return PPoly._raw(self._shift - other._shift, quo)

    def __repr__(self):
        return f"PPoly({self.terms!r})"


def _as_ppoly(x) -> PPoly:
    if isinstance(x, PPoly):
        return x
    if isinstance(x, (int, Rational)):
        return PPoly.const(x)
    return NotImplemented


def qpow(e) -> PPoly:
    """``q**e`` for ``e`` a multiple of 1/4, as a :class:`PPoly`."""
    e4 = Fraction(e) * 4
    if e4.denominator != 1:
        raise ValueError(f"q-exponent {e} is not a quarter-integer")
    return PPoly.monomial(int(e4))


# --------------------------------------------------------------------------
# PRational
# --------------------------------------------------------------------------


class PRational:
    """Rational function ``num/den`` in ``p``.

    Canonical form: ``gcd(num, den) = 1``, ``den`` monic with lowest
    ``p``-exponent 0.  Equality is structural on the canonical form.
    """

    __slots__ = ("num", "_den", "_hash")

    def __init__(self, num=0, den=1):
        num = _as_ppoly(num)
        den = _as_ppoly(den)
        if num is NotImplemented or den is NotImplemented:
            raise TypeError("PRational parts must be PPoly or rational numbers")
        if den.is_zero():
            raise ZeroDivisionError("PRational with zero denominator")
        shift = num._shift - den._shift
        self._set(shift, num._poly, den._poly, reduce=True)

    def _set(self, shift: int, n: _FQ, d: _FQ, reduce: bool):
        if n.is_zero():
            self.num, self._den = PPoly(), _ONE_POLY
            self._hash = None
            return
        if reduce and not d.is_one():
            g = n.gcd(d)
            if not g.is_one():
                n = n // g
                d = d // g
        lc = d.leading_coefficient()
        if lc != 1:
            n = n / lc
            d = d / lc
        self.num = PPoly._raw(shift, n)
        self._den = d
        self._hash = None

    @classmethod
    def _make(cls, shift: int, n: _FQ, d: _FQ, reduce: bool = True) -> "PRational":
        obj = cls.__new__(cls)
        obj._set(shift, n, d, reduce)
        return obj

    @classmethod
    def _from_ppoly(cls, x: PPoly) -> "PRational":
        obj = cls.__new__(cls)
        obj.num, obj._den, obj._hash = x, _ONE_POLY, None
        return obj

    @property
    def den(self) -> PPoly:
        return PPoly._raw(0, self._den)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self._den.is_one() and self.num.is_one()

    def is_polynomial(self) -> bool:
        return self._den.is_one()

    def __add__(self, other):
        other = _as_prational(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        s, a, c = self.num._aligned(other.num)
        if self._den == other._den:
            return PRational._make(s, a + c, self._den, reduce=not self._den.is_one())
        return PRational._make(s, a * other._den + c * self._den, self._den * other._den)

    __radd__ = __add__

    def __neg__(self):
        obj = PRational.__new__(PRational)
        obj.num, obj._den, obj._hash = -self.num, self._den, None
        return obj

    def __sub__(self, other):
        other = _as_prational(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_prational(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return PRational()
        a, b = self.num._poly, self._den
        c, d = other.num._poly, other._den
        shift = self.num._shift + other.num._shift
        if b.is_one() and d.is_one():
            return PRational._from_ppoly(PPoly._raw(shift, a * c))
        if not d.is_one():
            g = a.gcd(d)
            if not g.is_one():
                a, d = a // g, d // g
        if not b.is_one():
            g = c.gcd(b)
            if not g.is_one():
                c, b = c // g, b // g
        return PRational._make(shift, a * c, b * d, reduce=False)

    __rmul__ = __mul__

    def inverse(self) -> "PRational":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero PRational")
        return PRational._make(-self.num._shift, self._den, self.num._poly, reduce=False)

    def __truediv__(self, other):
        other = _as_prational(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_prational(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return PRational._make(self.num._shift * k, self.num._poly**k, self._den**k, reduce=False)

    def __eq__(self, other):
        other = _as_prational(other)
        if other is NotImplemented:
            return False
        return self.num == other.num and self._den == other._den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, tuple(self._den.coeffs())))
        return self._hash

    def as_ppoly(self) -> PPoly:
        if not self._den.is_one():
            raise NotDivisible("PRational is not a Laurent polynomial")
        return self.num

    def cross_equal(self, other: "PRational") -> bool:
        """Equality by cross multiplication, independent of canonical form."""
        other = _as_prational(other)
        return self.num * other.den == other.num * self.den

    def __repr__(self):
        if self._den.is_one():
            return f"PRational({self.num.terms!r})"
        return f"PRational({self.num.terms!r}, {self.den.terms!r})"


def _as_prational(x) -> PRational:
    if isinstance(x, PRational):
        return x
    if isinstance(x, PPoly):
        return PRational._from_ppoly(x)
    if isinstance(x, (int, Rational)):
        return PRational._from_ppoly(PPoly.const(x))
    return NotImplemented


def as_prational(x) -> PRational:
    r = _as_prational(x)
    if r is NotImplemented:
        raise TypeError(f"cannot convert {type(x).__name__} to PRational")
    return r


ZERO = PRational()
ONE = PRational(1)


def qr(e) -> PRational:
    """``q**e`` as a :class:`PRational` (``e`` a multiple of 1/4)."""
    return PRational._from_ppoly(qpow(e))


# --------------------------------------------------------------------------
# ZLaurent
# --------------------------------------------------------------------------

VARS = ("z", "a", "alpha", "beta", "lam", "x")
NVARS = len(VARS)
_VIDX = {v: i for i, v in enumerate(VARS)}
_ZERO_KEY = (0,) * NVARS

Scalar = Union[int, Fraction, PPoly, PRational]


def _key(**exps: int) -> tuple:
    k = [0] * NVARS
    for name, e in exps.items():
        k[_VIDX[name]] = e
    return tuple(k)


def _addk(k1: tuple, k2: tuple) -> tuple:
    return tuple(x + y for x, y in zip(k1, k2))


class ZLaurent:
    """Sparse polynomial over :class:`PRational`.

    Keys are exponent tuples over ``VARS``: the first slot (``z``) may be
    negative, the formal parameters are meant to be polynomial.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        clean = {}
        for k, c in (terms or {}).items():
            c = as_prational(c)
            if not c.is_zero():
                if len(k) != NVARS:
                    k = tuple(k) + (0,) * (NVARS - len(k))
                clean[k] = c
        self.terms: dict[tuple, PRational] = clean
        self._hash = None

    @classmethod
    def _wrap(cls, terms: dict) -> "ZLaurent":
        obj = cls.__new__(cls)
        obj.terms, obj._hash = terms, None
        return obj

    @classmethod
    def const(cls, c) -> "ZLaurent":
        return cls({_ZERO_KEY: c})

    @classmethod
    def monomial(cls, coeff=1, **exps: int) -> "ZLaurent":
        return cls({_key(**exps): coeff})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "ZLaurent":
        return cls.monomial(1, **{name: power})

    def coeff(self, **exps: int) -> PRational:
        return self.terms.get(_key(**exps), ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ZERO_KEY in self.terms)

    def scalar(self) -> PRational:
        if not self.is_scalar():
            raise ValueError("ZLaurent is not a scalar")
        return self.terms.get(_ZERO_KEY, ZERO)

    def degree(self, name: str = "z") -> int:
        i = _VIDX[name]
        return max(k[i] for k in self.terms)

    def min_degree(self, name: str = "z") -> int:
        i = _VIDX[name]
        return min(k[i] for k in self.terms)

    def __add__(self, other):
        other = _as_zl(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v.is_zero():
                    del out[k]
                else:
                    out[k] = v
        return ZLaurent._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return ZLaurent._wrap({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = _as_zl(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "ZLaurent":
        c = as_prational(c)
        if c.is_zero():
            return ZLaurent()
        if c.is_one():
            return self
        return ZLaurent._wrap({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Rational, PPoly, PRational)):
            return self.scale(other)
        other = _as_zl(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return ZLaurent()
        if other.is_scalar():
            return self.scale(other.terms[_ZERO_KEY])
        if self.is_scalar():
            return other.scale(self.terms[_ZERO_KEY])
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = _addk(k1, k2)
                v = c1 * c2
                prev = out.get(k)
                out[k] = v if prev is None else prev + v
        return ZLaurent._wrap({k: v for k, v in out.items() if not v.is_zero()})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1:
                raise NotDivisible("negative power of a non-monomial ZLaurent")
            (key, c), = self.terms.items()
            return ZLaurent._wrap({tuple(e * k for e in key): c**k})
        result = ZLaurent.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Rational, PPoly, PRational)):
            return self.scale(as_prational(other).inverse())
        return laurent_divide_exact(self, _as_zl(other))

    def __eq__(self, other):
        other = _as_zl(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def map_z(self, factor: Callable[[int], PRational]) -> "ZLaurent":
        """Multiply each ``z**k`` term by ``factor(k)`` (shift operators)."""
        return ZLaurent._wrap(
            {k: c * factor(k[0]) for k, c in self.terms.items()}
        ).prune()

    def prune(self) -> "ZLaurent":
        if all(not c.is_zero() for c in self.terms.values()):
            return self
        return ZLaurent._wrap({k: c for k, c in self.terms.items() if not c.is_zero()})

    def is_symmetric(self) -> bool:
        for k, c in self.terms.items():
            mirror = (-k[0],) + k[1:]
            if self.terms.get(mirror) != c:
                return False
        return True

    def subs(self, name: str, value) -> "ZLaurent":
        """Substitute a formal parameter (not ``z``) by a ZLaurent value."""
        i = _VIDX[name]
        if i == 0:
            raise ValueError("use map_z for z substitutions")
        value = _as_zl(value)
        grouped: dict[int, dict] = {}
        for k, c in self.terms.items():
            e = k[i]
            rest = k[:i] + (0,) + k[i + 1 :]
            grouped.setdefault(e, {})[rest] = c
        out = ZLaurent()
        for e, part in grouped.items():
            out = out + ZLaurent._wrap(part) * (value**e)
        return out

    def truncate(self, name: str, max_degree: int) -> "ZLaurent":
        i = _VIDX[name]
        return ZLaurent._wrap({k: c for k, c in self.terms.items() if k[i] <= max_degree})

    def sorted_terms(self):
        """Terms by descending z-exponent, then ascending exponents of the rest."""
        return sorted(self.terms.items(), key=lambda kv: (-kv[0][0],) + kv[0][1:])

    def __repr__(self):
        return f"ZLaurent({len(self.terms)} terms)"


def _as_zl(x) -> ZLaurent:
    if isinstance(x, ZLaurent):
        return x
    if isinstance(x, (int, Rational, PPoly, PRational)):
        return ZLaurent.const(x)
    return NotImplemented


def as_zlaurent(x) -> ZLaurent:
    r = _as_zl(x)
    if r is NotImplemented:
        raise TypeError(f"cannot convert {type(x).__name__} to ZLaurent")
    return r


Z = ZLaurent.var("z")
ZINV = ZLaurent.var("z", -1)


def laurent_divide_exact(num: ZLaurent, den: ZLaurent) -> ZLaurent:
    """Exact quotient ``num/den``; raises :class:`NotDivisible` otherwise.

    Multivariate division by the lex-leading term (``z`` first).  Laurent in
    ``z`` is handled by bounding the quotient's lowest ``z``-power by
    ``minz(num) - minz(den)``; the formal parameters must be non-negative.
    """
    num, den = as_zlaurent(num), as_zlaurent(den)
    if den.is_zero():
        raise ZeroDivisionError("division by the zero ZLaurent")
    if num.is_zero():
        return ZLaurent()
    if den.is_scalar():
        return num.scale(den.scalar().inverse())
    for k in list(num.terms) + list(den.terms):
        if any(e < 0 for e in k[1:]):
            raise ValueError("formal parameters must appear with non-negative exponents")
    low_z = num.min_degree("z") - den.min_degree("z")
    max_other = [num.degree(v) - den.min_degree(v) for v in VARS[1:]]
    lead_d = max(den.terms)
    inv_lc = den.terms[lead_d].inverse()
    dterms = list(den.terms.items())
    rem = dict(num.terms)
    quot = {}
    while rem:
        lead_r = max(rem)
        e = tuple(r - d for r, d in zip(lead_r, lead_d))
        if e[0] < low_z or any(x < 0 or x > m for x, m in zip(e[1:], max_other)):
            raise NotDivisible("no exact Laurent quotient")
        c = rem[lead_r] * inv_lc
        quot[e] = c
        for k, v in dterms:
            kk = _addk(e, k)
            val = rem.get(kk, ZERO) - c * v
            if val.is_zero():
                rem.pop(kk, None)
            else:
                rem[kk] = val
    return ZLaurent._wrap(quot)


# --------------------------------------------------------------------------
# TruncatedSeries
# --------------------------------------------------------------------------


class TruncatedSeries:
    """Power series ``sum_{n<=order} coeffs[n] * t**n`` with ZLaurent coefficients."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Iterable, order: int):
        if order < 0:
            raise ValueError("series order must be non-negative")
        cs = [as_zlaurent(c) for c in coeffs][: order + 1]
        cs += [ZLaurent()] * (order + 1 - len(cs))
        self.order = order
        self.coeffs: tuple[ZLaurent, ...] = tuple(cs)

    @classmethod
    def const(cls, c, order: int) -> "TruncatedSeries":
        return cls([c], order)

    @classmethod
    def linear(cls, c0, c1, order: int) -> "TruncatedSeries":
        return cls([c0, c1], order)

    def __getitem__(self, n: int) -> ZLaurent:
        return self.coeffs[n]

    def _check(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.const(other, self.order)

    def __add__(self, other):
        other = self._check(other)
        if other.order != self.order:
            raise OrderMismatch(f"series orders differ: {self.order} vs {other.order}")
        return TruncatedSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = as_zlaurent(other)
            return TruncatedSeries([c * other for c in self.coeffs], self.order)
        n = min(self.order, other.order)
        out = []
        for k in range(n + 1):
            acc = ZLaurent()
            for i in range(k + 1):
                a, b = self.coeffs[i], other.coeffs[k - i]
                if a.terms and b.terms:
                    acc = acc + a * b
            out.append(acc)
        return TruncatedSeries(out, n)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        result = TruncatedSeries.const(1, self.order)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    __hash__ = None

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs[: order + 1], min(order, self.order))

    def reciprocal(self) -> "TruncatedSeries":
        return series_reciprocal(self)

    def map(self, fn: Callable[[ZLaurent], ZLaurent]) -> "TruncatedSeries":
        return TruncatedSeries([fn(c) for c in self.coeffs], self.order)

    def __repr__(self):
        return f"TruncatedSeries(order={self.order})"


def series_reciprocal(s: TruncatedSeries) -> TruncatedSeries:
    """``r`` with ``r * s = 1`` through ``s.order``.

    The constant coefficient must be a unit: a single nonzero term in ``z``
    alone (no formal parameters).
    """
    c0 = s.coeffs[0]
    if len(c0.terms) != 1:
        raise ZeroConstantTerm("constant coefficient is not a unit")
    (key, val), = c0.terms.items()
    if any(key[1:]):
        raise ZeroConstantTerm("constant coefficient involves a formal parameter")
    inv0 = ZLaurent._wrap({(-key[0],) + key[1:]: val.inverse()})
    out = [inv0]
    for n in range(1, s.order + 1):
        acc = ZLaurent()
        for k in range(1, n + 1):
            a = s.coeffs[k]
            if a.terms:
                acc = acc + a * out[n - k]
        out.append(-(acc * inv0))
    return TruncatedSeries(out, s.order)


def ring_add(x, y):
    return x + y


def ring_mul(x, y):
    return x * y


# --------------------------------------------------------------------------
# numeric substitution
# --------------------------------------------------------------------------


def _exact_sum(terms: Mapping[int, Fraction], qf: Fraction) -> Fraction:
    """sum c_j q**j exactly; integer arithmetic with one final division."""
    if not terms:
        return Fraction(0)
    n, d = qf.numerator, qf.denominator
    lo, hi = min(terms), max(terms)
    span = hi - lo
    lcm = 1
    for c in terms.values():
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    acc = 0
    npow = [1]
    for _ in range(span):
        npow.append(npow[-1] * n)
    dpow = [1]
    for _ in range(span):
        dpow.append(dpow[-1] * d)
    for e, c in terms.items():
        j = e - lo
        acc += (c.numerator * (lcm // c.denominator)) * npow[j] * dpow[span - j]
    val = Fraction(acc, lcm * dpow[span])
    return val * qf**lo


def _split_residues(x: PPoly) -> dict[int, dict[int, Fraction]]:
    out: dict[int, dict[int, Fraction]] = {}
    for e, c in x.terms.items():
        r = e % 4
        out.setdefault(r, {})[(e - r) // 4] = c
    return out


def _ppoly_exact(x: PPoly, qf: Fraction) -> Fraction | None:
    """Exact value if ``x`` only involves integer powers of q."""
    parts = _split_residues(x)
    if set(parts) - {0}:
        return None
    return _exact_sum(parts.get(0, {}), qf)


def _ppoly_float(x: PPoly, q_val: float, qf: Fraction) -> float:
    p = q_val**0.25
    total = 0.0
    for r, part in _split_residues(x).items():
        total += float(_exact_sum(part, qf)) * p**r
    return total


def _prational_exact(x: PRational, qf: Fraction) -> Fraction | None:
    n = _ppoly_exact(x.num, qf)
    d = _ppoly_exact(x.den, qf)
    if n is None or d is None:
        return None
    return n / d


def _prational_float(x: PRational, q_val: float, qf: Fraction) -> float:
    exact = _prational_exact(x, qf)
    if exact is not None:
        return float(exact)
    return _ppoly_float(x.num, q_val, qf) / _ppoly_float(x.den, q_val, qf)


def _chebyshev_T(k: int, x):
    t0, t1 = type(x)(1), x
    if k == 0:
        return t0
    for _ in range(k - 1):
        t0, t1 = t1, 2 * x * t1 - t0
    return t1


def substitute_numeric(
    expr,
    q_val: float,
    z_val: complex | None = None,
    *,
    real_x: float | None = None,
    params: Mapping[str, float] | None = None,
):
    """Evaluate ``expr`` at ``p = q_val**(1/4)``.

    ``PPoly``/``PRational`` need only ``q_val``.  A ``ZLaurent`` needs either
    a complex ``z_val`` or a ``real_x`` (then ``z**k + z**-k -> 2 T_k(x)``,
    which requires the element to be z<->1/z symmetric).  ``params`` gives
    values for formal parameters (missing ones are taken as 0).

    Whenever only integer powers of q occur and all inputs are real, the
    evaluation is carried out in exact rational arithmetic and rounded once;
    this sidesteps the cancellation that expanded q-polynomials suffer near
    ``q = 1``.
    """
    if not 0.0 < q_val < 1.0:
        raise ValueError("q_val must lie in (0, 1)")
    qf = Fraction(q_val)
    if isinstance(expr, (int, Rational)):
        return float(expr)
    if isinstance(expr, PPoly):
        exact = _ppoly_exact(expr, qf)
        return float(exact) if exact is not None else _ppoly_float(expr, q_val, qf)
    if isinstance(expr, PRational):
        return _prational_float(expr, q_val, qf)
    expr = as_zlaurent(expr)
    params = dict(params or {})
    unknown = set(params) - set(VARS[1:])
    if unknown:
        raise KeyError(f"unknown formal parameters: {sorted(unknown)}")

    if (z_val is None) == (real_x is None):
        raise ValueError("give exactly one of z_val or real_x")

    if real_x is not None:
        if not expr.is_symmetric():
            raise AsymmetricElement("real-x substitution needs a z<->1/z symmetric element")
        all_real = all(isinstance(v, (int, float, Rational)) for v in params.values())
        if all_real:
            pvals = {k: Fraction(v) for k, v in params.items()}
            xf = Fraction(real_x)
            total = Fraction(0)
            ok = True
            for key, c in expr.terms.items():
                if key[0] < 0:
                    continue
                cv = _prational_exact(c, qf)
                if cv is None:
                    ok = False
                    break
                mono = Fraction(1)
                for name, e in zip(VARS[1:], key[1:]):
                    if e:
                        mono *= pvals.get(name, Fraction(0)) ** e
                if not mono:
                    continue
                basis = 2 * _chebyshev_T(key[0], xf) if key[0] else Fraction(1)
                total += cv * mono * basis
            if ok:
                return float(total)
        total = 0.0
        for key, c in expr.terms.items():
            if key[0] < 0:
                continue
            mono = 1.0
            for name, e in zip(VARS[1:], key[1:]):
                if e:
                    mono *= params.get(name, 0.0) ** e
            basis = 2 * _chebyshev_T(key[0], float(real_x)) if key[0] else 1.0
            total += _prational_float(c, q_val, qf) * mono * basis
        return total

    z = complex(z_val)
    total = 0j
    for key, c in expr.terms.items():
        mono = z ** key[0]
        for name, e in zip(VARS[1:], key[1:]):
            if e:
                mono *= params.get(name, 0.0) ** e
        total += _prational_float(c, q_val, qf) * mono
    return total


__all__ = [
    "AsymmetricElement",
    "BigRational",
    "NotDivisible",
    "ONE",
    "OrderMismatch",
    "PPoly",
    "PRational",
    "TruncatedSeries",
    "VARS",
    "Z",
    "ZERO",
    "ZINV",
    "ZLaurent",
    "ZeroConstantTerm",
    "as_prational",
    "as_zlaurent",
    "laurent_divide_exact",
    "qpow",
    "qr",
    "ring_add",
    "ring_mul",
    "series_reciprocal",
    "substitute_numeric",
]
