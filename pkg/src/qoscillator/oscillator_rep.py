"""The q-oscillator representation on xi_n, its difference-operator model on
Laurent polynomials in z, and matrix elements of U^(mu,nu)(alpha, beta)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exact_ring import (
    ONE,
    ZERO,
    PRational,
    TruncatedSeries,
    Z,
    ZINV,
    ZLaurent,
    as_zlaurent,
    laurent_divide_exact,
    qr,
)
from .qfunctions import (
    P_polynomial,
    QuarterExponent,
    continuous_q_hermite,
    q_binomial,
    qfactorial,
)


class WindowTooSmall(ValueError):
    """Truncation window cannot produce an uncontaminated entry."""


GENERATORS = ("A+", "A-", "K")


def _qe(mu) -> QuarterExponent:
    return mu if isinstance(mu, QuarterExponent) else QuarterExponent.parse(mu)


# --------------------------------------------------------------------------
# truncated matrices
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RepVector:
    dim: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        for n, c in self.coeffs.items():
            if not 0 <= n < self.dim:
                raise IndexError(f"basis index {n} outside dimension {self.dim}")
        object.__setattr__(
            self, "coeffs", {n: c for n, c in self.coeffs.items() if not c.is_zero()}
        )

    @classmethod
    def basis(cls, n: int, dim: int) -> "RepVector":
        return cls(dim, {n: ONE})


@dataclass(frozen=True)
class GeneratorMatrix:
    """Sparse ``dim x dim`` matrix; entries are PRational or ZLaurent."""

    dim: int
    entries: dict
    tag: str = ""

    def __post_init__(self):
        object.__setattr__(
            self, "entries", {k: v for k, v in self.entries.items() if not v.is_zero()}
        )

    def __getitem__(self, mn):
        return self.entries.get(mn, ZERO)

    def __add__(self, other: "GeneratorMatrix") -> "GeneratorMatrix":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out[k] + v if k in out else v
        return GeneratorMatrix(self.dim, out, f"({self.tag}+{other.tag})")

    def __sub__(self, other: "GeneratorMatrix") -> "GeneratorMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "GeneratorMatrix":
        return GeneratorMatrix(self.dim, {k: v * c for k, v in self.entries.items()}, self.tag)

    def __matmul__(self, other: "GeneratorMatrix") -> "GeneratorMatrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        by_row: dict[int, list] = {}
        for (j, n), v in other.entries.items():
            by_row.setdefault(j, []).append((n, v))
        out: dict = {}
        for (m, j), u in self.entries.items():
            for n, v in by_row.get(j, ()):
                w = u * v
                out[(m, n)] = out[(m, n)] + w if (m, n) in out else w
        return GeneratorMatrix(self.dim, out, f"{self.tag}{other.tag}")

    def apply(self, vec: RepVector) -> RepVector:
        out: dict = {}
        for (m, n), v in self.entries.items():
            c = vec.coeffs.get(n)
            if c is not None:
                out[m] = out.get(m, ZERO) + v * c
        return RepVector(self.dim, out)

    @classmethod
    def identity(cls, dim: int) -> "GeneratorMatrix":
        return cls(dim, {(n, n): ONE for n in range(dim)}, "I")

    def nonzero_entries(self):
        return sorted(self.entries)


def a_plus_coeff(n: int) -> PRational:
    """A+ xi_n = (this) xi_{n+1}."""
    return -qr(Fraction(-(n + 1), 2))


def a_minus_coeff(n: int) -> PRational:
    """A- xi_n = (this) xi_{n-1}."""
    return qr(Fraction(n, 2) + 1) * (1 - qr(-n)) / (1 - qr(1))


def k_coeff(n: int) -> PRational:
    return qr(Fraction(-n, 2))


def generator_matrix(which: str, dim: int) -> GeneratorMatrix:
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    if which == "A+":
        entries = {(n + 1, n): a_plus_coeff(n) for n in range(dim - 1)}
    elif which == "A-":
        entries = {(n - 1, n): a_minus_coeff(n) for n in range(1, dim)}
    elif which == "K":
        entries = {(n, n): k_coeff(n) for n in range(dim)}
    else:
        raise ValueError(f"unknown generator {which!r}")
    return GeneratorMatrix(dim, entries, which)


def commutation_defects(dim: int) -> dict[str, GeneratorMatrix]:
    """The three algebra relations as matrices that should vanish.

    The first is only meaningful on rows/cols < dim-1 (A+ leaves the window).
    """
    ap, am, k = (generator_matrix(g, dim) for g in GENERATORS)
    eye = GeneratorMatrix.identity(dim)
    return {
        "A-A+ - q^-1 A+A- = 1": am @ ap - (ap @ am).scale(qr(-1)) - eye,
        "K A+ = q^-1/2 A+ K": k @ ap - (ap @ k).scale(qr(Fraction(-1, 2))),
        "K A- = q^1/2 A- K": k @ am - (am @ k).scale(qr(Fraction(1, 2))),
    }


# --------------------------------------------------------------------------
# difference-operator realization
# --------------------------------------------------------------------------


def _half_shift(f: ZLaurent, sign: int) -> ZLaurent:
    # T_z^{+-1/2}: z^k -> q^{+-k/2} z^k
    return f.map_z(lambda k: qr(Fraction(sign * k, 2)))


def _shift(f: ZLaurent, sign: int) -> ZLaurent:
    return f.map_z(lambda k: qr(sign * k))


_Z_DIFF = Z - ZINV


def apply_realization(which: str, f) -> ZLaurent:
    """Apply A+, A-, K, tau, Dz+ or Dz- to a Laurent polynomial in z."""
    f = as_zlaurent(f)
    if which == "tau":
        return laurent_divide_exact(_half_shift(f, 1) - _half_shift(f, -1), _Z_DIFF)
    if which == "A-":
        num = _half_shift(f, 1) - _half_shift(f, -1)
        return laurent_divide_exact(num.scale(qr(1) / (1 - qr(1))), _Z_DIFF)
    if which == "A+":
        num = ZINV**2 * _half_shift(f, 1) - Z**2 * _half_shift(f, -1)
        return laurent_divide_exact(num, _Z_DIFF).scale(qr(Fraction(-1, 2)))
    if which == "K":
        num = Z * _half_shift(f, -1) - ZINV * _half_shift(f, 1)
        return laurent_divide_exact(num, _Z_DIFF)
    if which == "Dz+":
        return ZINV * (f - _shift(f, 1))
    if which == "Dz-":
        return ZINV * (f - _shift(f, -1))
    raise ValueError(f"unknown operator {which!r}")


def expected_action(which: str, n: int, basis=continuous_q_hermite) -> ZLaurent:
    """Right-hand side of the representation with xi_k -> basis(k)."""
    if which == "A+":
        return basis(n + 1).scale(a_plus_coeff(n))
    if which == "A-":
        return basis(n - 1).scale(a_minus_coeff(n)) if n else ZLaurent()
    if which == "K":
        return basis(n).scale(k_coeff(n))
    raise ValueError(which)


# --------------------------------------------------------------------------
# matrix elements of U^(mu,nu)
# --------------------------------------------------------------------------

ALPHA = ZLaurent.var("alpha")
BETA = ZLaurent.var("beta")


@dataclass(frozen=True)
class MatrixElementResult:
    m: int
    n: int
    mu: QuarterExponent
    nu: QuarterExponent
    value: ZLaurent


# Outer exponent of the m >= n branch.  "printed" keeps the factor (n-m)
# exactly as typeset; "oracle" uses (m-n), the orientation confirmed by the
# truncated-matrix expansion (see tests/test_oscillator_rep.py).
ORIENTATIONS = ("oracle", "printed")


def matrix_element_closed_form(mu, nu, m: int, n: int, orientation: str = "oracle") -> MatrixElementResult:
    mu, nu = _qe(mu), _qe(nu)
    if m < 0 or n < 0:
        raise ValueError("indices must be non-negative")
    xarg = (ALPHA * BETA).scale(-(1 - qr(1)))
    if m <= n:
        d = n - m
        pref = qr(d * ((nu.value + Fraction(1, 4)) * d - Fraction(n, 2) - Fraction(1, 4)))
        pref = pref * PRational(q_binomial(n, m))
        poly = P_polynomial(m, mu, nu, d, xarg)
        value = ((-BETA) ** d) * poly.scale(pref)
    else:
        d = m - n
        if orientation == "oracle":
            outer = d
        elif orientation == "printed":
            outer = -d
        else:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")
        e = outer * ((mu.value - Fraction(1, 4)) * d - Fraction(n, 2) - Fraction(1, 4))
        pref = qr(e) / qfactorial(d)
        poly = P_polynomial(n, nu, mu, d, xarg)
        value = (ALPHA.scale(-(1 - qr(1))) ** d) * poly.scale(pref)
    return MatrixElementResult(m, n, mu, nu, value)


def _exp_matrix(mu: QuarterExponent, X: GeneratorMatrix, order: int) -> GeneratorMatrix:
    """sum_{k<=order} q^{mu k^2}/(q;q)_k X^k on the truncation."""
    total = GeneratorMatrix.identity(X.dim)
    total = GeneratorMatrix(X.dim, {k: as_zlaurent(v) for k, v in total.entries.items()})
    power = total
    for k in range(1, order + 1):
        power = power @ X
        if not power.entries:
            break
        total = total + power.scale(qr(mu.value * k * k) / qfactorial(k))
    return total


@lru_cache(maxsize=64)
def _oracle_matrix(mu: QuarterExponent, nu: QuarterExponent, dim: int, order: int) -> GeneratorMatrix:
    one_minus_q = 1 - qr(1)
    ap = generator_matrix("A+", dim)
    am = generator_matrix("A-", dim)
    X = GeneratorMatrix(dim, {k: ALPHA.scale(v * one_minus_q) for k, v in ap.entries.items()})
    Y = GeneratorMatrix(
        dim, {k: BETA.scale(v * one_minus_q / qr(1)) for k, v in am.entries.items()}
    )
    return _exp_matrix(mu, X, order) @ _exp_matrix(nu, Y, order)


def matrix_element_oracle(mu, nu, m: int, n: int, dim: int, order: int) -> ZLaurent:
    """Entry (m, n) of E^(mu)((1-q) alpha A+) E^(nu)((beta/q)(1-q) A-) on a
    ``dim``-dimensional truncation with both exponentials cut at ``order``."""
    mu, nu = _qe(mu), _qe(nu)
    if dim <= max(m, n) + order:
        raise WindowTooSmall(f"need dim > max(m, n) + order = {max(m, n) + order}")
    if order < m + n:
        raise WindowTooSmall(f"need order >= m + n = {m + n}")
    return as_zlaurent(_oracle_matrix(mu, nu, dim, order)[(m, n)])


def oracle_window(size: int) -> tuple[int, int]:
    """(dim, order) large enough for every entry with m, n <= size."""
    order = 2 * size
    return size + order + 1, order


# --------------------------------------------------------------------------
# actions used by the derivations
# --------------------------------------------------------------------------


def apply_U_to_vacuum(mu, order: int, hermite=continuous_q_hermite) -> TruncatedSeries:
    """U^(mu,0)(alpha/(1-q), 0) . 1 as a series in alpha, from the H_m expansion."""
    mu = _qe(mu)
    out = []
    for m in range(order + 1):
        c = (-qr(Fraction(-1, 4))) ** m * qr((mu.value - Fraction(1, 4)) * m * m) / qfactorial(m)
        out.append(hermite(m).scale(c))
    return TruncatedSeries(out, order)


def apply_U_to_vacuum_realized(mu, order: int) -> TruncatedSeries:
    """Same quantity computed by iterating the A+ difference operator on 1."""
    mu = _qe(mu)
    out = []
    f = ZLaurent.const(1)
    for m in range(order + 1):
        out.append(f.scale(qr(mu.value * m * m) / qfactorial(m)))
        f = apply_realization("A+", f)
    return TruncatedSeries(out, order)


def apply_E_A_minus_to_hermite(n: int, hermite=continuous_q_hermite) -> ZLaurent:
    """E_q^(1/4)((beta(1-q)/q) A-) H_n, summed through the A- realization.

    A- lowers degree, so the series stops after n+1 terms.
    """
    f = hermite(n)
    total = ZLaurent()
    coeff = BETA.scale((1 - qr(1)) / qr(1))
    power = ZLaurent.const(1)
    for k in range(n + 1):
        total = total + (power * f).scale(qr(Fraction(k * k, 4)) / qfactorial(k))
        f = apply_realization("A-", f)
        power = power * coeff
    if not f.is_zero():
        raise ArithmeticError("A- failed to annihilate after n+1 steps")
    return total


__all__ = [
    "ALPHA",
    "BETA",
    "GENERATORS",
    "GeneratorMatrix",
    "MatrixElementResult",
    "ORIENTATIONS",
    "RepVector",
    "WindowTooSmall",
    "a_minus_coeff",
    "a_plus_coeff",
    "apply_E_A_minus_to_hermite",
    "apply_U_to_vacuum",
    "apply_U_to_vacuum_realized",
    "apply_realization",
    "commutation_defects",
    "expected_action",
    "generator_matrix",
    "k_coeff",
    "matrix_element_closed_form",
    "matrix_element_oracle",
    "oracle_window",
]
