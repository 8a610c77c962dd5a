"""Acceptance criteria 1-10, one verdict line each.

Every test records ``criterion N: PASS|FAIL ...`` both on stdout and in the
pytest terminal summary.
"""

from __future__ import annotations

import time

import pytest

from qoscillator import identity_engine as ie
from qoscillator.exact_ring import PRational, ZLaurent
from qoscillator.numeric_limits import LimitCheckSpec, check_limit, default_limit_specs
from qoscillator.qfunctions import MU_VALUES, continuous_q_hermite

from .conftest import ACCEPTANCE_LINES


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def test_criterion_01_connection_formula():
    report, secs = timed(ie.verify_connection_formula, 12)
    ok = report.passed and secs < 10
    record(1, ok, f"connection formula exact for n <= 12 with derivation replay ({secs:.1f}s, budget 10s)")
    assert report.passed, report.counterexample
    assert secs < 10


def test_criterion_02_generating_functions():
    t0 = time.perf_counter()
    reports = [ie.verify_generating_function(which, 16) for which in ("eq37", "eq40")]
    secs = time.perf_counter() - t0
    ok = all(r.passed for r in reports) and secs < 30
    record(2, ok, f"both generating functions exact through t^16 ({secs:.1f}s, budget 30s)")
    for r in reports:
        assert r.passed, r.counterexample
    assert secs < 30


def test_criterion_03_algebra_relations():
    report = ie.verify_commutation(32)
    record(3, report.passed, "algebra relations on the 32-dim truncation, A-A+ relation on rows/cols < 31")
    assert report.passed, report.counterexample


def test_criterion_04_realization():
    report = ie.verify_realization(20)
    record(4, report.passed, "A+, A-, K difference operators on H_n match the basis action, n <= 20")
    assert report.passed, report.counterexample


def test_criterion_05_matrix_elements():
    report, secs = timed(ie.verify_matrix_elements, 8, MU_VALUES)
    orientation = report.params["upper_branch_outer_factor"]
    ok = report.passed and secs < 60 and orientation == "(m-n)"
    record(
        5,
        ok,
        f"closed form = truncated oracle for m, n <= 8, all mu, nu; outer factor {orientation}, "
        f"printed (n-m) wrong on {report.params['printed_orientation_mismatches']} entries ({secs:.1f}s, budget 60s)",
    )
    assert report.passed, report.counterexample
    assert secs < 60


def test_criterion_06_specializations():
    wall = ie.verify_specialization("eq19_wall", 10, 4)
    lag = ie.verify_specialization("eq21_laguerre", 10, 4)
    reading = lag.params["argument_reading"]
    ok = wall.passed and lag.passed and reading != "unresolved"
    record(6, ok, f"Wall and q-Laguerre specializations for n <= 10, gamma <= 4 (argument reading: {reading})")
    assert wall.passed, wall.counterexample
    assert lag.passed, lag.counterexample


def test_criterion_07_eigenfunctions():
    report = ie.verify_eigenfunctions(12)
    record(7, report.passed, "eigenfunction properties exact to series order 12")
    assert report.passed, report.counterexample


def test_criterion_08_q_binomial_and_transformation():
    qbin = ie.verify_q_binomial_theorem(12)
    trans = ie.verify_transformation_formula(8)
    ok = qbin.passed and trans.passed and trans.params["c_powers"] == [9, 10, 11, 12, 13]
    record(8, ok, "q-binomial theorem to order 12; transformation for n <= 8 at c = q^9..q^13")
    assert qbin.passed, qbin.counterexample
    assert trans.passed, trans.counterexample


def test_criterion_09_classical_limits():
    specs = default_limit_specs(max_n=6)
    reports = [check_limit(s) for s in specs]
    bad = [(s.identity, s.n, s.a_value) for s, r in zip(specs, reports) if not r.passed]
    shift = [s for s in specs if s.identity == "eq32"]
    ok = (
        not bad
        and all(s.q_sequence[-1] == pytest.approx(1 - 1e-4) for s in specs)
        and all(s.tolerance <= 1e-10 for s in shift)
        and max(s.n for s in shift) == 8
    )
    record(
        9,
        ok,
        f"{len(reports)} limit checks at q = 1 - 1e-4 with the monotone gate; "
        f"classical shift identity to 1e-10 for n <= 8; failures: {bad or 'none'}",
    )
    assert not bad


def _corrupted(n_bad: int = 5):
    def table(n: int) -> ZLaurent:
        h = continuous_q_hermite(n)
        if n == n_bad:
            h = h + ZLaurent.monomial(PRational(1), z=n_bad - 2)
        return h

    return table


def test_criterion_10_fault_sensitivity():
    bad = _corrupted()
    conn = ie.verify_connection_formula(12, hermite=bad)
    gen = ie.verify_generating_function("eq37", 16, hermite=bad)
    ok = (
        conn.status == "fail"
        and conn.counterexample["at"] == {"n": 5}
        and gen.status == "fail"
        and gen.counterexample.get("t_power") == 5
    )
    where = (
        f"connection formula at n={conn.counterexample and conn.counterexample['at'].get('n')}, "
        f"generating function at t^{gen.counterexample and gen.counterexample.get('t_power')}"
    )
    record(10, ok, f"corrupting one coefficient of H_5 is caught: {where}")
    assert ok


def test_limit_gate_is_not_vacuous():
    # sanity for criterion 9: a far-from-one sequence must not pass
    assert not check_limit(LimitCheckSpec("eq6", 6, q_sequence=(0.1, 0.2, 0.3))).passed
