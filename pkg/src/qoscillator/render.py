"""Human-readable text for exact objects (q-powers shown, p hidden)."""

from __future__ import annotations

from fractions import Fraction

from .exact_ring import VARS, PPoly, PRational, ZLaurent, as_prational


def _qmono(e4: int) -> str:
    f = Fraction(e4, 4)
    if f == 0:
        return ""
    if f == 1:
        return "q"
    if f.denominator == 1:
        return f"q^{f.numerator}"
    return f"q^({f})"


def _scaled(c: Fraction, mono: str) -> str:
    if not mono:
        return str(c)
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    if c.denominator == 1:
        return f"{c}{mono}"
    return f"({c}){mono}" if c > 0 else f"-({-c}){mono}"


def _join(parts: list[str], sep_plus: str, sep_minus: str) -> str:
    out = parts[0]
    for s in parts[1:]:
        out += sep_minus + s[1:] if s.startswith("-") else sep_plus + s
    return out


def format_ppoly(x: PPoly) -> str:
    terms = sorted(x.terms.items())
    if not terms:
        return "0"
    return _join([_scaled(c, _qmono(e)) for e, c in terms], "+", "-")


def format_prational(x) -> str:
    x = as_prational(x)
    if x.is_polynomial():
        return format_ppoly(x.num)
    num, den = x.num, x.den
    if den.terms[0] < 0:
        num, den = -num, -den
    return f"({format_ppoly(num)})/({format_ppoly(den)})"


def _zmono(key: tuple) -> str:
    parts = []
    for name, e in zip(VARS, key):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _coeff_term(c: PRational, mono: str) -> str:
    if c.is_polynomial() and len(c.num.terms) == 1:
        (e, v), = c.num.terms.items()
        head = _scaled(v, _qmono(e))
        if not mono:
            return head
        if head in ("1", "-1"):
            return mono if head == "1" else "-" + mono
        return f"{head}*{mono}"
    body = f"({format_prational(c)})" if c.is_polynomial() else format_prational(c)
    return f"{body}*{mono}" if mono else body


def format_zlaurent(x: ZLaurent) -> str:
    """Terms by descending z-power then ascending parameter powers."""
    if x.is_zero():
        return "0"
    return _join([_coeff_term(c, _zmono(k)) for k, c in x.sorted_terms()], " + ", " - ")


def format_any(x) -> str:
    if isinstance(x, ZLaurent):
        return format_zlaurent(x)
    if isinstance(x, PPoly):
        return format_ppoly(x)
    return format_prational(x)
