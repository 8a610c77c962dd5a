"""Exact q-oscillator algebra models and q-orthogonal polynomial identities."""

from .exact_ring import (
    PPoly,
    PRational,
    TruncatedSeries,
    ZLaurent,
    laurent_divide_exact,
    series_reciprocal,
    substitute_numeric,
)

__version__ = "0.1.0"

__all__ = [
    "PPoly",
    "PRational",
    "TruncatedSeries",
    "ZLaurent",
    "laurent_divide_exact",
    "series_reciprocal",
    "substitute_numeric",
]
