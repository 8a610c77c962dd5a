"""Verdict records shared by the exact verifiers and the numeric limit checks."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any

from .exact_ring import PRational, TruncatedSeries
from .render import _zmono, format_prational


@dataclass
class IdentityReport:
    identity_id: str
    params: dict[str, Any]
    status: str
    checked: str
    counterexample: dict[str, Any] | None = None
    elapsed_ms: int = 0

    def __post_init__(self):
        if self.status not in ("pass", "fail"):
            raise ValueError(f"bad status {self.status!r}")
        if (self.status == "fail") != (self.counterexample is not None):
            raise ValueError("a failing report needs a counterexample, a passing one none")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "identity": self.identity_id,
            "params": self.params,
            "status": self.status,
            "checked": self.checked,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        out["elapsed_ms"] = self.elapsed_ms
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    def sort_key(self):
        return (self.identity_id, json.dumps(self.params, sort_keys=True))


class Stopwatch:
    def __init__(self):
        self.ms = 0

    @contextmanager
    def running(self):
        t0 = time.perf_counter()
        try:
            yield self
        finally:
            self.ms = int((time.perf_counter() - t0) * 1000)


def leading_difference(diff) -> dict[str, Any]:
    """First nonzero term of a difference (z-descending order)."""
    if isinstance(diff, TruncatedSeries):
        for n, c in enumerate(diff.coeffs):
            if not c.is_zero():
                out = leading_difference(c)
                out["t_power"] = n
                return out
        raise ValueError("difference is zero")
    if isinstance(diff, PRational):
        return {"monomial": "1", "coefficient": format_prational(diff)}
    key, c = diff.sorted_terms()[0]
    return {"monomial": _zmono(key) or "1", "coefficient": format_prational(c)}


def is_zero(diff) -> bool:
    if isinstance(diff, TruncatedSeries):
        return all(c.is_zero() for c in diff.coeffs)
    return diff.is_zero()


def finish(identity_id, params, checked, failure, watch) -> IdentityReport:
    """Build a report; ``failure`` is None or a counterexample dict."""
    return IdentityReport(
        identity_id=identity_id,
        params=params,
        status="pass" if failure is None else "fail",
        checked=checked,
        counterexample=failure,
        elapsed_ms=watch.ms,
    )


__all__ = ["IdentityReport", "Stopwatch", "finish", "is_zero", "leading_difference"]
