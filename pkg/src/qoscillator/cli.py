"""Command-line front end: build polynomials, evaluate them, run verifiers."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import identity_engine as ie
from .exact_ring import ZLaurent, substitute_numeric
from .numeric_limits import (
    LIMIT_IDENTITIES,
    LimitCheckSpec,
    check_limit,
    default_limit_specs,
)
from .oscillator_rep import matrix_element_closed_form
from .qfunctions import (
    continuous_big_q_hermite,
    continuous_q_hermite,
    q_laguerre,
    wall_polynomial,
)
from .render import format_zlaurent
from .reports import IdentityReport

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MU_CHOICES = ("0", "1/4", "1/2", "3/4")

# identity id -> (default bound, what --n-max / --order controls)
VERIFY_IDENTITIES: dict[str, tuple[str, int]] = {
    "eq31": ("n_max", 12),
    "eq37": ("order", 16),
    "eq40": ("order", 16),
    "eq27": ("order", 12),
    "eq29": ("n_max", 8),
    "eq19_wall": ("n_max", 10),
    "eq21_laguerre": ("n_max", 10),
    "eigen": ("order", 12),
    "eq1": ("n_max", 32),
    "eq9": ("n_max", 20),
    "eq16": ("n_max", 8),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so ``run`` owns exit codes."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _nonneg(flag: str):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects an integer, got {text!r}")
        if value < 0:
            raise argparse.ArgumentTypeError(f"{flag} must be >= 0, got {value}")
        return value

    return parse


def _positive(flag: str):
    def parse(text: str) -> int:
        value = _nonneg(flag)(text)
        if value == 0:
            raise argparse.ArgumentTypeError(f"{flag} must be >= 1")
        return value

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qoscillator", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser, required=True)

    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=("json", "text"), default="text")

    def polynomial(name: str, help_text: str, *, with_m: str | None = None, with_a: bool = False):
        p = sub.add_parser(name, parents=[fmt], help=help_text)
        p.add_argument("--n", type=_nonneg("--n"), help="degree")
        if with_m:
            p.add_argument("--m", type=_nonneg("--m"), help=with_m)
        p.add_argument("--q-value", type=float, help="evaluate numerically at this q in (0,1)")
        p.add_argument("--x-value", type=float, help="argument for numeric evaluation")
        if with_a:
            p.add_argument("--a-value", type=float, default=0.0, help="value of a for numeric evaluation")
        return p

    polynomial("hermite", "continuous q-Hermite polynomial H_n(x|q)")
    polynomial("big-hermite", "continuous big q-Hermite polynomial H_n(x;a|q)", with_a=True)
    polynomial("wall", "Wall polynomial p_n(x; q^m | q)", with_m="parameter exponent m (a = q^m)")
    polynomial("laguerre", "q-Laguerre polynomial L_n^(m)(x; q)", with_m="order rho = m")

    me = sub.add_parser("matrix-element", parents=[fmt], help="closed-form matrix element of U^(mu,nu)")
    me.add_argument("--m", type=_nonneg("--m"))
    me.add_argument("--n", type=_nonneg("--n"))
    me.add_argument("--mu", choices=MU_CHOICES)
    me.add_argument("--nu", choices=MU_CHOICES)

    jobs = _Parser(add_help=False)
    jobs.add_argument("--jobs", type=_positive("--jobs"), default=1)

    ver = sub.add_parser("verify", parents=[fmt], help="run one exact verifier")
    ver.add_argument("--identity", choices=sorted(VERIFY_IDENTITIES))
    ver.add_argument("--n-max", type=_nonneg("--n-max"))
    ver.add_argument("--order", type=_nonneg("--order"))

    lim = sub.add_parser("limit", parents=[fmt], help="run q -> 1 limit checks")
    lim.add_argument("--identity", choices=LIMIT_IDENTITIES)
    lim.add_argument("--n", type=_nonneg("--n"))
    lim.add_argument("--x-value", type=float)
    lim.add_argument("--a-value", type=float)
    lim.add_argument("--mu", choices=MU_CHOICES)

    everything = sub.add_parser("all", parents=[fmt, jobs], help="run every verifier and limit check")
    everything.add_argument("--n-max", type=_nonneg("--n-max"))
    everything.add_argument("--order", type=_nonneg("--order"))
    return parser


def _require(args, *flags: str) -> None:
    for flag in flags:
        if getattr(args, flag.lstrip("-").replace("-", "_")) is None:
            raise UsageError(f"qoscillator {args.subcommand}: missing required flag {flag}")


# --------------------------------------------------------------------------
# construction commands
# --------------------------------------------------------------------------


def _polynomial_output(args, expr: ZLaurent, params: dict[str, Any], numeric_params: dict[str, float], z_symmetric: bool):
    out: dict[str, Any] = {"object": args.subcommand, "params": params, "expression": format_zlaurent(expr)}
    if args.q_value is not None:
        if not 0 < args.q_value < 1:
            raise UsageError("--q-value must lie in (0, 1)")
        if args.x_value is None:
            raise UsageError(f"qoscillator {args.subcommand}: --q-value needs --x-value")
        if z_symmetric:
            if not -1 <= args.x_value <= 1:
                raise UsageError("--x-value must lie in [-1, 1] (x = cos theta)")
            value = substitute_numeric(expr, args.q_value, real_x=args.x_value, params=numeric_params)
        else:
            # z-free: any z works, and the value is real
            value = substitute_numeric(expr, args.q_value, z_val=1, params={**numeric_params, "x": args.x_value}).real
        out["numeric"] = {"q": args.q_value, "x": args.x_value, **numeric_params, "value": value}
    return out


def _cmd_polynomial(args) -> tuple[int, list[dict]]:
    _require(args, "--n")
    if args.subcommand in ("wall", "laguerre"):
        _require(args, "--m")
    n = args.n
    if args.subcommand == "hermite":
        return EXIT_OK, [_polynomial_output(args, continuous_q_hermite(n), {"n": n}, {}, True)]
    if args.subcommand == "big-hermite":
        return EXIT_OK, [
            _polynomial_output(args, continuous_big_q_hermite(n), {"n": n}, {"a": args.a_value}, True)
        ]
    if args.subcommand == "wall":
        return EXIT_OK, [_polynomial_output(args, wall_polynomial(n, args.m), {"n": n, "m": args.m}, {}, False)]
    return EXIT_OK, [_polynomial_output(args, q_laguerre(n, args.m), {"n": n, "m": args.m}, {}, False)]


def _cmd_matrix_element(args) -> tuple[int, list[dict]]:
    _require(args, "--m", "--n", "--mu", "--nu")
    res = matrix_element_closed_form(args.mu, args.nu, args.m, args.n)
    params = {"m": args.m, "n": args.n, "mu": args.mu, "nu": args.nu}
    return EXIT_OK, [{"object": "matrix-element", "params": params, "expression": format_zlaurent(res.value)}]


# --------------------------------------------------------------------------
# verification commands
# --------------------------------------------------------------------------


def _single_verifier(identity: str, bound: int) -> IdentityReport:
    if identity == "eq31":
        return ie.verify_connection_formula(bound)
    if identity in ("eq37", "eq40"):
        return ie.verify_generating_function(identity, bound)
    if identity == "eq27":
        return ie.verify_q_binomial_theorem(bound)
    if identity == "eq29":
        return ie.verify_transformation_formula(bound)
    if identity in ("eq19_wall", "eq21_laguerre"):
        return ie.verify_specialization(identity, bound, min(bound, 4))
    if identity == "eigen":
        return ie.verify_eigenfunctions(bound)
    if identity == "eq1":
        return ie.verify_commutation(max(bound, 2))
    if identity == "eq9":
        return ie.verify_realization(bound)
    if identity == "eq16":
        return ie.verify_matrix_elements(bound)
    raise UsageError(f"unknown identity {identity!r}")


def _cmd_verify(args) -> tuple[int, list[dict]]:
    _require(args, "--identity")
    kind, default = VERIFY_IDENTITIES[args.identity]
    given = args.n_max if kind == "n_max" else args.order
    other = "--order" if kind == "n_max" else "--n-max"
    if (args.order if kind == "n_max" else args.n_max) is not None:
        raise UsageError(f"qoscillator verify: {other} does not apply to {args.identity}")
    report = _single_verifier(args.identity, default if given is None else given)
    return _exit_for([report]), [report.to_dict()]


def _cmd_limit(args) -> tuple[int, list[dict]]:
    specs = [s for s in default_limit_specs() if args.identity in (None, s.identity)]
    if args.n is not None:
        specs = [s for s in specs if s.n == args.n or s.identity == "qexp_limit"]
        if not specs and args.identity is not None:
            specs = [LimitCheckSpec(args.identity, args.n)]
    if args.mu is not None:
        specs = [s for s in specs if s.identity != "qexp_limit" or str(s.mu) == args.mu]
    if args.a_value is not None:
        if not -1 <= args.a_value <= 1:
            raise UsageError("--a-value must lie in [-1, 1]")
        seen = set()
        rebuilt = []
        for s in specs:
            new = LimitCheckSpec(
                s.identity, s.n, s.x_points, args.a_value, s.q_sequence, s.tolerance, s.mu, s.noise_floor
            )
            if new not in seen:
                seen.add(new)
                rebuilt.append(new)
        specs = rebuilt
    if args.x_value is not None:
        if not -1 <= args.x_value <= 1:
            raise UsageError("--x-value must lie in [-1, 1]")
        specs = [
            LimitCheckSpec(s.identity, s.n, (args.x_value,), s.a_value, s.q_sequence, s.tolerance, s.mu, s.noise_floor)
            for s in specs
        ]
    if not specs:
        raise UsageError("qoscillator limit: the flags select no limit check")
    reports = sorted((check_limit(s) for s in specs), key=IdentityReport.sort_key)
    return _exit_for(reports), [r.to_dict() for r in reports]


def _cmd_all(args) -> tuple[int, list[dict]]:
    if args.n_max is None and args.order is None:
        cfg = ie.VerifyConfig()
    else:
        base = ie.VerifyConfig()
        cfg = ie.VerifyConfig.scaled(
            base.n_max if args.n_max is None else args.n_max,
            base.order if args.order is None else args.order,
        )
    reports = ie.verify_all(cfg, jobs=args.jobs)
    return _exit_for(reports), [r.to_dict() for r in reports]


def _exit_for(reports: Sequence[IdentityReport]) -> int:
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def _params_text(params: dict[str, Any]) -> str:
    return " ".join(f"{k}={json.dumps(v) if isinstance(v, (list, dict)) else v}" for k, v in params.items())


def render_text(record: dict[str, Any]) -> str:
    if "status" in record:
        head = f"{record['status'].upper()}  {record['identity']}  {_params_text(record['params'])}"
        lines = [head, f"  checked: {record['checked']}"]
        if "counterexample" in record:
            lines.append(f"  counterexample: {json.dumps(record['counterexample'])}")
        return "\n".join(lines)
    lines = [record["expression"]]
    if "numeric" in record:
        lines.append(f"value = {record['numeric']['value']!r}")
    return "\n".join(lines)


def render(records: list[dict[str, Any]], fmt: str) -> str:
    if fmt == "json":
        # one JSON object per line
        return "\n".join(json.dumps(r) for r in records)
    return "\n".join(render_text(r) for r in records)


COMMANDS = {
    "hermite": _cmd_polynomial,
    "big-hermite": _cmd_polynomial,
    "wall": _cmd_polynomial,
    "laguerre": _cmd_polynomial,
    "matrix-element": _cmd_matrix_element,
    "verify": _cmd_verify,
    "limit": _cmd_limit,
    "all": _cmd_all,
}


def run(argv: Sequence[str] | None = None, out=None) -> int:
    """Parse ``argv``, execute, print to ``out`` (stdout); return the exit code."""
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if any(a in ("-h", "--help") for a in argv):
            try:
                parser.parse_args(argv)
            except SystemExit:
                pass
            return EXIT_OK
        args = parser.parse_args(argv)
        code, records = COMMANDS[args.subcommand](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=out)
        return EXIT_USAGE
    print(render(records, args.format), file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
