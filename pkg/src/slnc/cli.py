"""Command-line front end.

Usage:
  slnc gen-combination -N 8 -k 6 -o comb86.snc
  slnc bounds -i comb86.snc -r 3
  slnc classes -i comb86.snc -r 3 [--list]
  slnc construct -i comb86.snc -w 3 -r 3 -q 59 -o code.snc
  slnc verify -i comb86.snc -c code.snc [--mode rank|exhaustive]
  slnc encode -i net.snc -c code.snc -m "1 2" [--seed 0] [-o symbols.txt]
  slnc decode -i net.snc -c code.snc --symbols symbols.txt [--sink t1]

Every report ends with ``key=value`` lines meant for machines; the only line
that varies between identical runs is the ``time:`` line, which
``--no-timing`` removes.
"""

from __future__ import annotations

import argparse
import io
import random
import sys
import time
from pathlib import Path
from typing import NamedTuple, Sequence

from . import errors
from .bounds import bound_report, enumerate_E_r_cut, equivalence_classes
from .cuts import DEFAULT_CAP
from .gf import PrimeField
from .lnc import min_sink_capacity
from .netmodel import gen_combination, load_network, render_network
from .secure import (
    construct_secure_code,
    decode,
    encode,
    load_secure_code,
    render_secure_code,
    verify_secure_condition,
    verify_security_exhaustive,
)

EXIT_FAIL = 1
EXIT_USAGE = 2
_EXIT_CODES: list[tuple[type[Exception], int]] = [
    (errors.ParseError, 10),
    (errors.CycleError, 11),
    (errors.UnknownNodeError, 12),
    (errors.NetworkError, 13),
    (errors.UnknownEdgeError, 14),
    (errors.EmptySetError, 15),
    (errors.UnreachableEdgeError, 16),
    (errors.EnumerationCapError, 17),
    (errors.AlignmentError, 18),
    (errors.FieldError, 19),
    (errors.DimensionError, 20),
    (errors.SingularMatrixError, 21),
    (errors.RateError, 22),
    (errors.LevelError, 23),
    (errors.FieldTooSmallError, 24),
    (errors.CodeError, 25),
    (errors.DecodeError, 26),
    (errors.InstanceTooLargeError, 27),
    (errors.SNCError, 29),
    (OSError, 30),
]


class CliResult(NamedTuple):
    status: int
    stdout: str
    stderr: str


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="minimum-cut enumeration cap per target set")
    common.add_argument("--workers", type=int, default=1, help="worker processes for the E_r^cut scan")
    common.add_argument("--no-timing", action="store_true", help="omit the time: line")

    ap = argparse.ArgumentParser(prog="slnc", description="Field-size bounds and secure linear network codes")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-combination", parents=[common], help="write a combination network")
    p.add_argument("-N", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-o", "--output", required=True)

    for name, text in (("bounds", "print every field-size bound"), ("classes", "print the common-cut classes")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("-i", "--input", required=True)
        p.add_argument("-r", "--security", type=int, required=True)
        if name == "classes":
            p.add_argument("--list", action="store_true", help="print full class membership")

    p = sub.add_parser("construct", parents=[common], help="build a secure code")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-w", "--rate", type=int, required=True)
    p.add_argument("-r", "--security", type=int, required=True)
    p.add_argument("-q", "--field", type=int, required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("verify", parents=[common], help="check a secure code against E_r^cut")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-c", "--code", required=True)
    p.add_argument("--mode", choices=("rank", "exhaustive"), default="rank")

    p = sub.add_parser("encode", parents=[common], help="send one message through a secure code")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-c", "--code", required=True)
    p.add_argument("-m", "--message", required=True, help="space-separated field elements")
    p.add_argument("--seed", type=int, default=0, help="seed for the random key")
    p.add_argument("-o", "--output", help="write symbol lines here as well")

    p = sub.add_parser("decode", parents=[common], help="decode observed symbols at sinks")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-c", "--code", required=True)
    p.add_argument("--symbols", required=True, help="file of 'symbol <edge> <value>' lines")
    p.add_argument("--sink", action="append", help="sink to decode at (default: all)")
    return ap


def _read_network(path: str):
    return load_network(Path(path).read_bytes())


def _read_symbols(path: str) -> dict[str, int]:
    obs = {}
    for no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        tokens = line.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        if tokens[0] != "symbol" or len(tokens) != 3:
            raise errors.DecodeError(f"{path}:{no}: expected 'symbol <edge> <value>'")
        obs[tokens[1]] = int(tokens[2])
    return obs


def _kv(out: io.StringIO, **pairs: object) -> None:
    for k, v in pairs.items():
        out.write(f"{k}={v}\n")


def _cmd_gen(args, out: io.StringIO) -> int:
    try:
        net = gen_combination(args.N, args.k)
    except ValueError as exc:
        raise errors.NetworkError(str(exc)) from None
    Path(args.output).write_text(render_network(net), encoding="utf-8")
    _kv(out, output=args.output, edges=len(net.edges), sinks=len(net.sinks))
    return 0


def _cmd_bounds(args, out: io.StringIO) -> int:
    rep = bound_report(_read_network(args.input), args.security, cap=args.cap, workers=args.workers)
    out.write(rep.render_table())
    out.write("\n")
    out.write(rep.render_kv())
    return 0


def _cmd_classes(args, out: io.StringIO) -> int:
    part = equivalence_classes(_read_network(args.input), args.security, cap=args.cap, workers=args.workers)
    for i, (rep, members) in enumerate(zip(part.representatives, part.classes), start=1):
        out.write(f"class {i} size={len(members)} rep={','.join(rep)}\n")
        if args.list:
            for A in members:
                out.write(f"  {','.join(A)}\n")
    out.write(f"ercut={sum(len(c) for c in part.classes)}\n")
    out.write(f"classes={len(part)}\n")
    return 0


def _cmd_construct(args, out: io.StringIO) -> int:
    net = _read_network(args.input)
    field = PrimeField(args.field)
    c_min = min_sink_capacity(net)
    if args.rate + args.security > c_min:
        raise errors.RateError(f"omega + r = {args.rate + args.security} exceeds C_min = {c_min}")
    built = construct_secure_code(net, args.rate, args.security, field, cap=args.cap, workers=args.workers)
    Path(args.output).write_text(render_secure_code(built.code), encoding="utf-8")
    _kv(out, output=args.output, q=field.q, n=built.code.n, omega=args.rate, r=args.security,
        cmin=c_min, multicast="ok", multicast_hint=f"q>={len(net.sinks)}",
        classes=built.classes, secure_requirement=f"q>={built.classes}",
        wiretap_sets=built.wiretap_sets, distinct_cuts=built.distinct_keys, secure_condition="PASS")
    return 0


def _cmd_verify(args, out: io.StringIO) -> int:
    net = _read_network(args.input)
    sc = load_secure_code(Path(args.code).read_text(encoding="utf-8"), net)
    sets = enumerate_E_r_cut(net, sc.r, workers=args.workers) if sc.r else []
    if args.mode == "rank":
        ok, bad = verify_secure_condition(sc, sets)
    else:
        ok, bad = True, None
        for A in sets:
            if not verify_security_exhaustive(sc, A):
                ok, bad = False, A
                break
    out.write(f"{'PASS' if ok else 'FAIL'}\n")
    _kv(out, mode=args.mode, sets=len(sets), result="PASS" if ok else "FAIL")
    if bad is not None:
        _kv(out, counterexample=",".join(bad))
    return 0 if ok else EXIT_FAIL


def _cmd_encode(args, out: io.StringIO) -> int:
    net = _read_network(args.input)
    sc = load_secure_code(Path(args.code).read_text(encoding="utf-8"), net)
    message = [int(x) for x in args.message.split()]
    rng = random.Random(args.seed)
    key = [rng.randrange(sc.field.q) for _ in range(sc.r)]
    tx = encode(sc, message, key)
    lines = "".join(f"symbol {e} {v}\n" for e, v in sorted(tx.symbols.items()))
    if args.output:
        Path(args.output).write_text(lines, encoding="utf-8")
    out.write(lines)
    _kv(out, message=" ".join(map(str, tx.message)), key=" ".join(map(str, tx.key)))
    return 0


def _cmd_decode(args, out: io.StringIO) -> int:
    net = _read_network(args.input)
    sc = load_secure_code(Path(args.code).read_text(encoding="utf-8"), net)
    obs = _read_symbols(args.symbols)
    sinks = args.sink or list(net.sinks)
    for t in sinks:
        out.write(f"sink {t} message={' '.join(map(str, decode(sc, t, obs)))}\n")
    return 0


_COMMANDS = {
    "gen-combination": _cmd_gen,
    "bounds": _cmd_bounds,
    "classes": _cmd_classes,
    "construct": _cmd_construct,
    "verify": _cmd_verify,
    "encode": _cmd_encode,
    "decode": _cmd_decode,
}


def _exit_code(exc: Exception) -> int:
    for cls, code in _EXIT_CODES:
        if isinstance(exc, cls):
            return code
    raise exc


def run(argv: Sequence[str]) -> CliResult:
    """Execute one command and capture its report instead of printing it."""
    out, err = io.StringIO(), io.StringIO()
    try:
        args = _parser().parse_args(list(argv))
    except SystemExit as exc:
        return CliResult(EXIT_USAGE if exc.code else 0, "", "")
    start = time.perf_counter()
    try:
        status = _COMMANDS[args.command](args, out)
    except (errors.SNCError, OSError) as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return CliResult(_exit_code(exc), out.getvalue(), err.getvalue())
    if not args.no_timing:
        out.write(f"time: {time.perf_counter() - start:.2f}s\n")
    return CliResult(status, out.getvalue(), err.getvalue())


def main(argv: Sequence[str] | None = None) -> int:
    result = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(result.stdout)
    sys.stderr.write(result.stderr)
    return result.status


if __name__ == "__main__":
    raise SystemExit(main())
