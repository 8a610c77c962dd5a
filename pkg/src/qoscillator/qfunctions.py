"""q-combinatorial quantities and the polynomial families built from them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

from .exact_ring import (
    ONE,
    PPoly,
    PRational,
    TruncatedSeries,
    Z,
    ZINV,
    ZLaurent,
    ZeroConstantTerm,
    as_prational,
    as_zlaurent,
    laurent_divide_exact,
    qr,
)


class LowerParameterPole(ArithmeticError):
    """A lower parameter makes ``(b;q)_k`` vanish inside the summation range."""


@dataclass(frozen=True, order=True)
class QuarterExponent:
    """The rational ``k/4``; used for the exponents mu and nu."""

    k: int

    @classmethod
    def parse(cls, text: str | int | Fraction) -> "QuarterExponent":
        value = Fraction(text)
        k4 = value * 4
        if k4.denominator != 1:
            raise ValueError(f"{text!r} is not a multiple of 1/4")
        return cls(int(k4))

    @property
    def value(self) -> Fraction:
        return Fraction(self.k, 4)

    def __str__(self):
        return str(self.value)


MU_VALUES = tuple(QuarterExponent(k) for k in range(4))


def _qe(mu) -> QuarterExponent:
    return mu if isinstance(mu, QuarterExponent) else QuarterExponent.parse(mu)


@dataclass(frozen=True)
class QPower:
    """Structured parameter ``q**exponent``.

    ``QPower(-n)`` with ``n >= 0`` marks a terminating series.
    """

    exponent: Fraction | int

    def value(self) -> PRational:
        return qr(self.exponent)

    @property
    def terminates_at(self) -> int | None:
        e = Fraction(self.exponent)
        if e <= 0 and e.denominator == 1:
            return int(-e)
        return None


Param = Union[QPower, ZLaurent, PRational, PPoly, TruncatedSeries, int, Fraction]


@dataclass(frozen=True)
class HypergeometricSpec:
    upper: Sequence[Param]
    lower: Sequence[Param] = ()
    argument: Param = field(default_factory=lambda: ZLaurent.var("x"))


# --------------------------------------------------------------------------
# Pochhammer symbols and q-binomials
# --------------------------------------------------------------------------


def _one_minus(base: ZLaurent, k) -> ZLaurent:
    return 1 - base.scale(qr(k))


def q_pochhammer(base, n: int) -> ZLaurent:
    """(base; q)_n as a finite product."""
    if n < 0:
        raise ValueError("q_pochhammer needs n >= 0")
    base = as_zlaurent(base)
    out = ZLaurent.const(1)
    for k in range(n):
        out = out * _one_minus(base, k)
    return out


def qpoch_scalar(base, n: int) -> PRational:
    base = as_prational(base)
    out = ONE
    for k in range(n):
        out = out * (1 - base * qr(k))
    return out


@lru_cache(maxsize=None)
def qfactorial(n: int) -> PRational:
    """(q;q)_n."""
    return qpoch_scalar(qr(1), n)


@lru_cache(maxsize=None)
def q_binomial(n: int, k: int) -> PPoly:
    """Gaussian binomial coefficient as an exact polynomial in q."""
    if k < 0 or k > n:
        return PPoly()
    num = qfactorial(n).as_ppoly()
    den = (qfactorial(k) * qfactorial(n - k)).as_ppoly()
    return num.divide_exact(den)


def infinite_pochhammer(coeff, order: int) -> TruncatedSeries:
    """(coeff*t; q)_inf as a series in t, exact through ``order``.

    No finite product is exact here: every factor ``1 - coeff q^k t`` feeds
    the t^1 coefficient.  The coefficients come instead from the product's
    functional equation f(t) = (1 - coeff t) f(q t), i.e.
    f_n (1 - q^n) = -coeff q^(n-1) f_(n-1).
    """
    coeff = as_zlaurent(coeff)
    out = [ZLaurent.const(1)]
    for n in range(1, order + 1):
        out.append((out[-1] * coeff).scale(-qr(n - 1) / (1 - qr(n))))
    return TruncatedSeries(out, order)


def finite_pochhammer_series(coeff, length: int, order: int) -> TruncatedSeries:
    """(coeff*t; q)_length as a series in t (an honest finite product)."""
    coeff = as_zlaurent(coeff)
    out = TruncatedSeries.const(1, order)
    for k in range(length):
        out = out * TruncatedSeries.linear(1, -coeff.scale(qr(k)), order)
    return out


# --------------------------------------------------------------------------
# q-exponentials
# --------------------------------------------------------------------------


def q_exponential(mu, coeff, order: int) -> TruncatedSeries:
    """E_q^(mu)(coeff * t) = sum q^{mu n^2}/(q;q)_n (coeff t)^n, truncated."""
    mu = _qe(mu)
    coeff = as_zlaurent(coeff)
    out = []
    power = ZLaurent.const(1)
    for n in range(order + 1):
        out.append(power.scale(qr(mu.value * n * n) / qfactorial(n)))
        power = power * coeff
    return TruncatedSeries(out, order)


def curly_E_q(a_param, order: int) -> TruncatedSeries:
    """The Ismail-Zhang q-exponential as a series in b (e^{+-i theta} -> z^{+-1})."""
    a_param = as_zlaurent(a_param)
    out = []
    for n in range(order + 1):
        shift = a_param.scale(qr(Fraction(1 - n, 2)))
        c = q_pochhammer(shift * Z, n) * q_pochhammer(shift * ZINV, n)
        out.append(c.scale(qr(Fraction(n * n, 4)) / qfactorial(n)))
    return TruncatedSeries(out, order)


# --------------------------------------------------------------------------
# basic hypergeometric series
# --------------------------------------------------------------------------


def _param_value(param):
    if isinstance(param, QPower):
        return ZLaurent.const(param.value())
    if isinstance(param, TruncatedSeries):
        return param
    return as_zlaurent(param)


def basic_hypergeometric(spec: HypergeometricSpec, order: int | None = None):
    """Finite sum of the r-phi-s series.

    Terminates at ``n`` when some upper parameter is ``QPower(-n)``;
    otherwise ``order`` bounds the sum.  If any parameter or the argument is
    a :class:`TruncatedSeries` the result is a series of that order,
    otherwise a :class:`ZLaurent`.
    """
    r, s = len(spec.upper), len(spec.lower)
    stops = [
        p.terminates_at for p in spec.upper
        if isinstance(p, QPower) and p.terminates_at is not None
    ]
    bound = min(stops) if stops else None
    if order is not None:
        bound = order if bound is None else min(bound, order)

    upper = [_param_value(p) for p in spec.upper]
    lower = [_param_value(p) for p in spec.lower]
    arg = _param_value(spec.argument)
    pieces = upper + lower + [arg]
    series_orders = [x.order for x in pieces if isinstance(x, TruncatedSeries)]
    if bound is None and series_orders:
        # exact only when the argument has no constant term
        if not isinstance(arg, TruncatedSeries) or not arg[0].is_zero():
            raise ValueError("non-terminating series needs an argument of order >= 1")
        bound = min(series_orders)
    if bound is None:
        raise ValueError("non-terminating series needs a truncation order")

    balance = 1 + s - r

    def sign_factor(k: int) -> PRational:
        base = qr(Fraction(k * (k - 1), 2)) * (-1) ** k
        return base**balance

    if series_orders:
        N = min(series_orders) if order is None else min(series_orders + [order])

        def lift(x):
            return x.truncate(N) if isinstance(x, TruncatedSeries) else TruncatedSeries.const(x, N)

        upper_s = [lift(x) for x in upper]
        lower_s = [lift(x) for x in lower]
        arg_s = lift(arg)
        total = TruncatedSeries.const(0, N)
        num = TruncatedSeries.const(1, N)
        den = TruncatedSeries.const(1, N)
        power = TruncatedSeries.const(1, N)
        for k in range(bound + 1):
            if k:
                shift = qr(k - 1)
                for u in upper_s:
                    num = num * (1 - u * ZLaurent.const(shift))
                for b in lower_s:
                    den = den * (1 - b * ZLaurent.const(shift))
                power = power * arg_s
            try:
                inv = den.reciprocal()
            except ZeroConstantTerm as exc:
                raise LowerParameterPole(f"lower parameter pole at k={k}") from exc
            c = sign_factor(k) / qfactorial(k)
            total = total + num * inv * power * ZLaurent.const(c)
        return total

    total = ZLaurent()
    num = ZLaurent.const(1)
    den = ZLaurent.const(1)
    power = ZLaurent.const(1)
    for k in range(bound + 1):
        if k:
            for u in upper:
                num = num * _one_minus(u, k - 1)
            for b in lower:
                den = den * _one_minus(b, k - 1)
            power = power * arg
        if den.is_zero():
            raise LowerParameterPole(f"lower parameter pole at k={k}")
        term = (num * power).scale(sign_factor(k) / qfactorial(k))
        if den.is_scalar():
            term = term.scale(den.scalar().inverse())
        else:
            term = laurent_divide_exact(term, den)
        total = total + term
    return total


def phi(upper, lower, argument, order: int | None = None):
    return basic_hypergeometric(HypergeometricSpec(tuple(upper), tuple(lower), argument), order)


# --------------------------------------------------------------------------
# polynomial families
# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def continuous_q_hermite(n: int) -> ZLaurent:
    """H_n(x|q) = sum_k [n k]_q z^{n-2k}."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    return ZLaurent({(n - 2 * k,): q_binomial(n, k) for k in range(n + 1)})


@lru_cache(maxsize=None)
def continuous_big_q_hermite(n: int) -> ZLaurent:
    """H_n(x;a|q) = z^n 2phi0(q^-n, a z; -; q, q^n z^-2), polynomial in a."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    a = ZLaurent.var("a")
    series = phi([QPower(-n), a * Z], [], ZINV**2 * qr(n))
    return series * Z**n


def _formal(arg) -> ZLaurent:
    return ZLaurent.var("x") if arg is None else as_zlaurent(arg)


def wall_polynomial(n: int, a_power: int, arg=None) -> ZLaurent:
    """Little q-Laguerre p_n(arg; q^a_power | q) = 2phi1(q^-n, 0; a q | q; q arg)."""
    return phi([QPower(-n), 0], [QPower(a_power + 1)], _formal(arg).scale(qr(1)))


def q_laguerre(n: int, rho: int, arg=None) -> ZLaurent:
    """L_n^(rho)(arg; q) for integer rho >= 0."""
    if rho < 0:
        raise ValueError("rho must be a non-negative integer")
    pref = qpoch_scalar(qr(rho + 1), n) / qfactorial(n)
    series = phi([QPower(-n)], [QPower(rho + 1)], _formal(arg).scale(-qr(n + rho + 1)))
    return series.scale(pref)


def P_polynomial(n: int, mu, nu, gamma: int, arg=None) -> ZLaurent:
    """sum_k q^{k^2(mu+nu) + 2 nu gamma k} (q^-n;q)_k / ((q;q)_k (q^{gamma+1};q)_k) arg^k."""
    mu, nu = _qe(mu), _qe(nu)
    x = _formal(arg)
    total = ZLaurent()
    power = ZLaurent.const(1)
    for k in range(n + 1):
        low = qpoch_scalar(qr(gamma + 1), k)
        if low.is_zero():
            raise LowerParameterPole(f"(q^{gamma + 1};q)_{k} vanishes")
        c = (
            qr(k * k * (mu.value + nu.value) + 2 * nu.value * gamma * k)
            * qpoch_scalar(qr(-n), k)
            / (qfactorial(k) * low)
        )
        total = total + power.scale(c)
        power = power * x
    return total


__all__ = [
    "HypergeometricSpec",
    "LowerParameterPole",
    "MU_VALUES",
    "P_polynomial",
    "QPower",
    "QuarterExponent",
    "basic_hypergeometric",
    "continuous_big_q_hermite",
    "continuous_q_hermite",
    "curly_E_q",
    "finite_pochhammer_series",
    "infinite_pochhammer",
    "phi",
    "q_binomial",
    "q_exponential",
    "q_laguerre",
    "q_pochhammer",
    "qfactorial",
    "qpoch_scalar",
    "wall_polynomial",
]
