"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import json
import sys

from .combinat import Partition, PartitionError, omega_weight
from .ring import SeriesCap, series_log
from .symfun import DeskScaleError, NotInSpanError, WEIGHT_KINDS, p_basis_decompose, schur, weighted_sum
from .verify import (
    IdentityCheck,
    ParameterError,
    SamplingError,
    UnknownIdentityError,
    reports_to_json,
    run_check,
    run_suite,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _partition(text: str) -> Partition:
    try:
        return Partition.parse(text)
    except PartitionError as exc:
        raise UsageError(str(exc)) from None


def cmd_omega(args) -> int:
    print(omega_weight(_partition(args.partition)))
    return EXIT_OK


def cmd_schur(args) -> int:
    lam = _partition(args.partition)
    if args.vars < 1:
        raise UsageError("--vars must be positive")
    if lam.length > args.vars:
        raise UsageError(f"partition has {lam.length} parts but only {args.vars} variables")
    print(schur(lam, args.vars))
    return EXIT_OK


def cmd_expand(args) -> int:
    m = 2 * args.n
    if args.n < 1 or args.degree < 0:
        raise UsageError("--n must be positive and --degree nonnegative")
    q_order = args.q_order if args.kind == "macdonald" else None
    value = weighted_sum(args.kind, m, args.degree, q_order).value
    if args.log:
        value = series_log(value, SeriesCap(args.degree))
        if q_order is not None:
            value = value.truncate_var("q", q_order)
    if args.basis == "p":
        if m < args.degree:
            raise UsageError(f"power-sum coordinates need 2n >= degree ({m} < {args.degree})")
        print(p_basis_decompose(value, args.degree, m))
    else:
        print(value)
    return EXIT_OK


def _print_report(r) -> None:
    shown = {k: v for k, v in sorted(r.params.items())}
    print(f"{r.id} [{r.engine}] {json.dumps(shown, sort_keys=True)}: {r.status}")
    if r.witness:
        print(f"  witness: {json.dumps(r.witness, sort_keys=True)}")


def cmd_check(args) -> int:
    params = {
        key: getattr(args, key)
        for key in ("n", "N", "degree", "trials", "q_order")
        if getattr(args, key) is not None
    }
    params["seed"] = args.seed
    if args.mutate:
        params["mutate"] = True
    report = run_check(IdentityCheck(args.id, params, args.engine))
    if args.json:
        sys.stdout.write(json.dumps(report.to_dict(args.timing), indent=2, sort_keys=True) + "\n")
    else:
        _print_report(report)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_suite(args) -> int:
    out = None
    if args.out:
        try:
            out = open(args.out, "w")
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
    reports = run_suite(args.level, args.seed, jobs=args.jobs)
    text = reports_to_json(reports, args.timing)
    if out is not None:
        with out:
            out.write(text)
    if args.json:
        sys.stdout.write(text)
    else:
        for r in reports:
            _print_report(r)
        failed = sum(1 for r in reports if not r.passed)
        print(f"{len(reports)} checks, {len(reports) - failed} passed, {failed} failed")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pfaffsym", description="Exact Pfaffian and symmetric-function identity checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("omega", help="four-parameter weight of a partition")
    p.add_argument("partition", help='comma-separated parts, "" for the empty partition')
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("schur", help="Schur polynomial in x1..xM")
    p.add_argument("partition")
    p.add_argument("--vars", type=int, required=True, metavar="M")
    p.set_defaults(func=cmd_schur)

    p = sub.add_parser("expand", help="truncated weighted Schur sum in 2n variables")
    p.add_argument("--kind", choices=WEIGHT_KINDS, default="stanley-omega")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--q-order", type=int, default=3, dest="q_order")
    p.add_argument("--log", action="store_true", help="take the logarithm first")
    p.add_argument("--basis", choices=("monomial", "p"), default="monomial")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("check", help="run one registered identity")
    p.add_argument("id")
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int, dest="N")
    p.add_argument("--degree", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--q-order", type=int, dest="q_order")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--engine", choices=("symbolic", "randomized", "series"))
    p.add_argument("--mutate", action="store_true", help="run the negative control")
    p.add_argument("--json", action="store_true")
    p.add_argument("--timing", action="store_true", help="report real elapsed_ms")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("suite", help="run the smoke or full suite")
    p.add_argument("--level", choices=("smoke", "full"), default="smoke")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="report real elapsed_ms")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UnknownIdentityError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (UsageError, ParameterError, DeskScaleError, NotInSpanError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except SamplingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
