"""Command-line entry point: ``weitzenbock <subcommand> ...``.

Standard output carries results only; progress goes to standard error.
Exit codes: 0 success, 1 failed check or non-member, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .casimir import ReconstructionError, standard_casimir, tau, tau_decompose
from .oracle import cross_check
from .poly import PolyError, format_poly, normalize_primitive, parse_poly
from .solver import (
    SolverConfig,
    compute_kernel,
    read_result,
    result_table,
    result_to_json,
    verify_result,
    write_result,
)
from .subalgebra import is_member

log = logging.getLogger("weitzenbock")


class _StderrHandler(logging.StreamHandler):
    """Writes to whatever sys.stderr is at emit time."""

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


_HANDLER = _StderrHandler()
_HANDLER.setFormatter(logging.Formatter("%(levelname)s %(message)s"))

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _non_negative(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _positive(text: str) -> int:
    v = _non_negative(text)
    if v == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="weitzenbock", description="Kernel of the Weitzenboeck derivation via Casimir elements.")
    p.add_argument("-q", "--quiet", action="store_true", help="suppress progress messages")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("kernel", help="compute a generating set of the kernel")
    k.add_argument("--n", type=_non_negative, required=True)
    k.add_argument("--max-rounds", type=_positive, default=10)
    k.add_argument("--degree-cap", type=_positive, default=None)
    k.add_argument("--no-minimize", action="store_true")
    k.add_argument("--out", type=Path, default=None, help="JSON output; a .txt table is written beside it")
    k.add_argument("--threads", type=_positive, default=None)

    t = sub.add_parser("tau", help="print the normalized tau_I image of a polynomial")
    t.add_argument("--n", type=_non_negative, required=True)
    t.add_argument("--i", type=_non_negative, required=True)
    t.add_argument("--poly", required=True)

    d = sub.add_parser("delta", help="print the standard Casimir element of level M")
    d.add_argument("--n", type=_non_negative, required=True)
    d.add_argument("--m", type=_non_negative, required=True)

    m = sub.add_parser("member", help="test membership in the subalgebra of a generator file")
    m.add_argument("--n", type=_non_negative, required=True)
    m.add_argument("--poly", required=True)
    m.add_argument("--gens", type=Path, required=True)

    c = sub.add_parser("decompose", help="tau decomposition c(0..n) with reconstruction check")
    c.add_argument("--n", type=_non_negative, required=True)
    c.add_argument("--poly", required=True)

    o = sub.add_parser("oracle", help="compare slice dimensions against brute-force nullspaces")
    o.add_argument("--n", type=_non_negative, required=True)
    o.add_argument("--deg-max", type=_non_negative, default=6)
    o.add_argument("--gens", type=Path, required=True)
    o.add_argument("--json", action="store_true", help="emit the report as JSON")
    o.add_argument("--threads", type=_positive, default=None)

    v = sub.add_parser("verify", help="re-check every generator of a result file")
    v.add_argument("--gens", type=Path, required=True)
    v.add_argument("--oracle-degree", type=_non_negative, default=None)
    return p


def _threads(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("WK_THREADS")
    if env:
        try:
            v = int(env)
        except ValueError:
            raise UsageError(f"WK_THREADS must be a positive integer, got {env!r}") from None
        if v < 1:
            raise UsageError(f"WK_THREADS must be a positive integer, got {env!r}")
        return v
    return os.cpu_count() or 1


def _load(path: Path, n: int | None = None):
    try:
        result = read_result(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: not a generator file ({exc})") from None
    if n is not None and result.n != n:
        raise UsageError(f"{path} holds generators for n={result.n}, not n={n}")
    return result


def _poly(text: str, n: int):
    try:
        return parse_poly(text, n)
    except PolyError as exc:
        raise UsageError(f"--poly: {exc}") from None


def cmd_kernel(args) -> int:
    config = SolverConfig(args.n, args.max_rounds, args.degree_cap, not args.no_minimize, _threads(args.threads))
    result = compute_kernel(config)
    if args.out is not None:
        json_path, table_path = write_result(result, args.out)
        log.info("wrote %s and %s", json_path, table_path)
        sys.stdout.write(result_table(result))
    else:
        sys.stdout.write(result_to_json(result))
    if not result.closed:
        log.warning("closure not reached; the generator set may be incomplete")
    return EXIT_OK


def cmd_tau(args) -> int:
    z = _poly(args.poly, args.n)
    out = tau(args.i, z, args.n)
    print(format_poly(normalize_primitive(out)) if out else "0")
    return EXIT_OK


def cmd_delta(args) -> int:
    print(format_poly(standard_casimir(args.m, args.n)))
    return EXIT_OK


def cmd_member(args) -> int:
    z = _poly(args.poly, args.n)
    result = _load(args.gens, args.n)
    if not z:
        raise UsageError("--poly: the zero polynomial is trivially a member")
    rep = is_member(z, result.generators, args.n)
    if rep is None:
        print("not a member")
        return EXIT_FAIL
    print("member")
    for line in rep.describe():
        print(f"  {line}")
    return EXIT_OK


def cmd_decompose(args) -> int:
    z = _poly(args.poly, args.n)
    try:
        dec = tau_decompose(z, args.n)
    except ReconstructionError as exc:
        print(f"reconstruction failed: {exc}")
        return EXIT_FAIL
    for i, ci in enumerate(dec.c):
        print(f"c({i}) = {format_poly(ci)}")
    print("reconstruction: ok")
    return EXIT_OK


def cmd_oracle(args) -> int:
    result = _load(args.gens, args.n)
    report = cross_check(result.generators, args.n, args.deg_max, threads=_threads(args.threads))
    sys.stdout.write(report.to_json() if args.json else report.text())
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_verify(args) -> int:
    result = _load(args.gens)
    report = verify_result(result, args.oracle_degree)
    print(report.text())
    return EXIT_OK if report.ok else EXIT_FAIL


COMMANDS = {
    "kernel": cmd_kernel,
    "tau": cmd_tau,
    "delta": cmd_delta,
    "member": cmd_member,
    "decompose": cmd_decompose,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if _HANDLER not in log.handlers:
        log.addHandler(_HANDLER)
    log.setLevel(logging.WARNING if args.quiet else logging.INFO)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"weitzenbock {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PolyError, ValueError) as exc:
        # includes CasimirError and SignatureError: the input is outside the operator's domain
        print(f"weitzenbock {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
