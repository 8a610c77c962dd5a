"""Floating-point evaluation of the exact objects and the q -> 1 limit checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

from .exact_ring import ZLaurent, qr, substitute_numeric
from .qfunctions import (
    QuarterExponent,
    continuous_big_q_hermite,
    continuous_q_hermite,
    q_binomial,
    q_exponential,
)
from .reports import IdentityReport, Stopwatch, finish

LIMIT_IDENTITIES = ("eq6", "eq32", "eq33", "qexp_limit", "eq31_shadow")
DEFAULT_Q_SEQUENCE = tuple(1 - 10.0**-j for j in range(1, 5))
DEFAULT_X_POINTS = (-0.9, -0.5, 0.0, 0.5, 0.9)
QEXP_ORDER = 30


class NumericOverflow(ArithmeticError):
    pass


@dataclass(frozen=True)
class LimitCheckSpec:
    identity: str
    n: int = 0
    x_points: tuple = DEFAULT_X_POINTS
    a_value: float = 0.0
    q_sequence: tuple = DEFAULT_Q_SEQUENCE
    tolerance: float = 1e-2
    mu: QuarterExponent = field(default_factory=lambda: QuarterExponent(0))
    # errors below this are rounding noise and never break monotonicity
    noise_floor: float = 1e-12

    def __post_init__(self):
        if self.identity not in LIMIT_IDENTITIES:
            raise ValueError(f"unknown limit identity {self.identity!r}")
        qs = list(self.q_sequence)
        if not qs or any(not 0 < q < 1 for q in qs):
            raise ValueError("q_sequence must lie in (0, 1)")
        if any(b <= a for a, b in zip(qs, qs[1:])):
            raise ValueError("q_sequence must be strictly increasing")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if any(not -1 <= x <= 1 for x in self.x_points):
            raise ValueError("x points must lie in [-1, 1]")


def classical_hermite(n: int, x: float) -> float:
    """Physicists' Hermite polynomial by the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be >= 0")
    h0, h1 = 1.0, 2.0 * x
    if n == 0:
        return h0
    for k in range(1, n):
        h0, h1 = h1, 2.0 * x * h1 - 2.0 * k * h0
    return h1


def relative_error(approx: float, exact: float) -> float:
    if not math.isfinite(approx):
        raise NumericOverflow(f"non-finite value {approx}")
    diff = abs(approx - exact)
    return diff / abs(exact) if exact != 0 else diff


def scaled_q_hermite(n: int, x: float, q: float) -> float:
    """((1-q)/2)^{-n/2} H_n(x sqrt((1-q)/2) | q)."""
    s = math.sqrt((1 - q) / 2)
    return substitute_numeric(continuous_q_hermite(n), q, real_x=x * s) / s**n


def scaled_big_q_hermite(n: int, x: float, a: float, q: float) -> float:
    """((1-q)/2)^{-n/2} H_n(x sqrt((1-q)/2); a sqrt(2(1-q)) | q)."""
    s = math.sqrt((1 - q) / 2)
    value = substitute_numeric(
        continuous_big_q_hermite(n), q, real_x=x * s, params={"a": a * math.sqrt(2 * (1 - q))}
    )
    return value / s**n


def classical_shift_expansion(n: int, x: float, a: float) -> float:
    """sum_k (-1)^{n-k} (2a)^{n-k} C(n,k) H_k(x)."""
    return sum(
        (-1) ** (n - k) * (2 * a) ** (n - k) * comb(n, k) * classical_hermite(k, x)
        for k in range(n + 1)
    )


def scaled_connection_rhs(n: int, x: float, a: float, q: float) -> float:
    """Scaled right side of the big/continuous q-Hermite connection formula."""
    s = math.sqrt((1 - q) / 2)
    a_s = a * math.sqrt(2 * (1 - q))
    total = 0.0
    for k in range(n + 1):
        c = substitute_numeric(qr(k * (k - 1) // 2) * q_binomial(n, k), q)
        h = substitute_numeric(continuous_q_hermite(n - k), q, real_x=x * s)
        total += (-1) ** k * a_s**k * c * h
    return total / s**n


@lru_cache(maxsize=256)
def _qexp_coefficients(mu: QuarterExponent, q: float, order: int) -> tuple[float, ...]:
    series = q_exponential(mu, ZLaurent.const(1 - qr(1)), order)
    return tuple(substitute_numeric(c.scalar(), q) for c in series.coeffs)


def q_exponential_value(mu: QuarterExponent, x: float, q: float, order: int = QEXP_ORDER) -> float:
    """E_q^(mu)((1-q) x) summed through ``order``."""
    return sum(c * x**n for n, c in enumerate(_qexp_coefficients(mu, q, order)))


def _point_error(spec: LimitCheckSpec, x: float, q: float) -> float:
    n, a = spec.n, spec.a_value
    if spec.identity == "eq6":
        return relative_error(scaled_q_hermite(n, x, q), classical_hermite(n, x))
    if spec.identity == "eq33":
        return relative_error(scaled_big_q_hermite(n, x, a, q), classical_hermite(n, x - a))
    if spec.identity == "eq32":
        return relative_error(classical_shift_expansion(n, x, a), classical_hermite(n, x - a))
    if spec.identity == "eq31_shadow":
        return relative_error(scaled_connection_rhs(n, x, a, q), classical_shift_expansion(n, x, a))
    if spec.identity == "qexp_limit":
        return relative_error(q_exponential_value(spec.mu, x, q), math.exp(x))
    raise ValueError(spec.identity)


def limit_errors(spec: LimitCheckSpec) -> list[float]:
    """Worst relative error over the x points, one entry per q."""
    return [max(_point_error(spec, x, q) for x in spec.x_points) for q in spec.q_sequence]


def check_limit(spec: LimitCheckSpec) -> IdentityReport:
    """Pass when the last error is within tolerance and the last three errors
    do not increase (beyond ``noise_floor``)."""
    watch = Stopwatch()
    with watch.running():
        errors = limit_errors(spec)
        tail = errors[-3:]
        monotone = all(b <= a + spec.noise_floor for a, b in zip(tail, tail[1:]))
        failure = None
        if errors[-1] > spec.tolerance or not monotone:
            failure = {
                "at": {"q": spec.q_sequence[-1]},
                "stage": "tolerance" if errors[-1] > spec.tolerance else "monotone gate",
                "errors": [float(f"{e:.6e}") for e in errors],
            }
    params = {
        "n": spec.n,
        "x_points": list(spec.x_points),
        "a_value": spec.a_value,
        "q_sequence": list(spec.q_sequence),
        "tolerance": spec.tolerance,
    }
    if spec.identity == "qexp_limit":
        params["mu"] = str(spec.mu)
    return finish(
        spec.identity,
        params,
        f"relative error {errors[-1]:.3e} at q = {spec.q_sequence[-1]}; "
        f"monotone over last {len(tail)} q values: {monotone}",
        failure,
        watch,
    )


def default_limit_specs(max_n: int = 6) -> list[LimitCheckSpec]:
    specs = []
    for n in range(max_n + 1):
        specs.append(LimitCheckSpec("eq6", n))
        for a in (0.0, 0.3):
            specs.append(LimitCheckSpec("eq33", n, a_value=a))
            specs.append(LimitCheckSpec("eq31_shadow", n, a_value=a))
    for n in range(max(max_n, 8) + 1):
        for a in (0.0, 0.3):
            specs.append(LimitCheckSpec("eq32", n, a_value=a, tolerance=1e-10))
    for k in range(4):
        specs.append(LimitCheckSpec("qexp_limit", x_points=(-0.9, -0.5, 0.0, 0.5, 0.9, 1.0), mu=QuarterExponent(k)))
    return specs


__all__ = [
    "DEFAULT_Q_SEQUENCE",
    "DEFAULT_X_POINTS",
    "LIMIT_IDENTITIES",
    "LimitCheckSpec",
    "NumericOverflow",
    "check_limit",
    "classical_hermite",
    "classical_shift_expansion",
    "default_limit_specs",
    "limit_errors",
    "q_exponential_value",
    "scaled_big_q_hermite",
    "scaled_connection_rhs",
    "scaled_q_hermite",
]
