"""Command-line interface: ``multcode <command> ...``.

Exit status is 0 on success, 1 when decoding fails and 2 on usage or file
format errors.  Every random choice derives from ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bench import BENCH_MODES, run_bench
from .channel import MODES, ChannelSpec
from .code import CodeParams, Codeword, encode, rate_and_distance, rate_lower_bound
from .globaldec import global_unique_decode
from .localdec import LocalConfig, Oracle, correct_at, m_line_correct, recover_low_order_jet
from .poly import MVPoly
from .sysenc import InterpolatingSet, build_interpolating_set, local_decode_message
from .unidec import ReceivedWordUV, unique_decode_uv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def rational(text: str) -> Fraction:
    """Parse ``"a/b"`` (or an integer) exactly."""
    try:
        num, _, den = text.partition("/")
        return Fraction(int(num), int(den) if den else 1)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("expected a rational 'a/b', got %r" % text)


def point(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated point, got %r" % text)


def _add_params(p: argparse.ArgumentParser):
    for name in ("q", "m", "s", "d"):
        p.add_argument("--" + name, type=int, required=True)


def _params(args) -> CodeParams:
    try:
        return CodeParams(args.q, args.m, args.s, args.d)
    except ValueError as exc:
        raise UsageError(str(exc))


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError("cannot read %s: %s" % (path, exc.strerror))


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text + "\n")
    else:
        Path(path).write_text(text + "\n", encoding="utf-8")


def _load_codeword(path: str) -> Codeword:
    try:
        return Codeword.from_json(_read(path))
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError("%s is not a codeword file: %s" % (path, exc))


def _point_for(cw: Codeword, a) -> np.ndarray:
    if len(a) != cw.params.m or any(not 0 <= x < cw.params.q for x in a):
        raise UsageError("point %r is not in F_%d^%d" % (a, cw.params.q, cw.params.m))
    return np.array(a, dtype=np.int64)


def cmd_params(args) -> int:
    p = _params(args)
    rate, dist = rate_and_distance(p)
    lines = [
        "n %d" % p.n,
        "dimension %d" % p.dim,
        "symbol_length %d" % p.sym_len,
        "rate %d/%d = %s" % (p.dim, p.sym_len * p.n, rate),
        "distance %d/%d = %s" % (p.s * p.q - p.d, p.s * p.q, dist),
        "rate_lower_bound %s" % rate_lower_bound(p),
    ]
    _write(None, "\n".join(lines))
    return EXIT_OK


def cmd_encode(args) -> int:
    p = _params(args)
    try:
        P = MVPoly.from_json(_read(args.poly))
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError("%s is not a polynomial file: %s" % (args.poly, exc))
    if P.field.q != p.q or P.m != p.m:
        raise UsageError("polynomial is over F_%d in %d variables" % (P.field.q, P.m))
    try:
        cw = encode(p, P)
    except ValueError as exc:
        raise UsageError(str(exc))
    _write(args.out, cw.to_json())
    return EXIT_OK


def cmd_corrupt(args) -> int:
    cw = _load_codeword(args.input)
    try:
        spec = ChannelSpec(args.rate, args.seed, args.mode)
    except ValueError as exc:
        raise UsageError(str(exc))
    _write(args.out, spec.apply(cw)[0].to_json())
    return EXIT_OK


def cmd_decode(args) -> int:
    cw = _load_codeword(args.input)
    p = cw.params
    if args.mode == "unique":
        if p.m != 1:
            raise UsageError("--mode unique decodes univariate codes; use --mode global for m > 1")
        res = unique_decode_uv(ReceivedWordUV.from_codeword(cw), args.radius)
        P = None if res is None else res.to_mv()
    else:
        if args.delta0 is None:
            raise UsageError("--mode global needs --delta0")
        try:
            P = global_unique_decode(cw, args.delta0)
        except ValueError as exc:
            raise UsageError(str(exc))
    if P is None:
        _write(args.out, json.dumps({"status": "failure"}))
        return EXIT_FAIL
    _write(args.out, P.to_json())
    return EXIT_OK


def _local_config(cw: Codeword, args) -> LocalConfig:
    try:
        return LocalConfig.build(cw.params, args.delta0, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_local_correct(args) -> int:
    cw = _load_codeword(args.input)
    a = _point_for(cw, args.point)
    cfg = _local_config(cw, args)
    oracle = Oracle(cw)
    run = {"main": correct_at, "line": recover_low_order_jet, "mline": m_line_correct}[args.variant]
    try:
        u = run(oracle, a, cfg)
    except ValueError as exc:
        raise UsageError(str(exc))
    if u is None:
        print(json.dumps({"status": "failure", "queries": oracle.queries}))
        return EXIT_FAIL
    print(json.dumps({"symbol": [int(x) for x in u], "queries": oracle.queries}))
    return EXIT_OK


def cmd_local_decode(args) -> int:
    cw = _load_codeword(args.input)
    try:
        iset = InterpolatingSet.from_json(cw.params, _read(args.set))
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError("%s is not an interpolating-set file: %s" % (args.set, exc))
    if not 0 <= args.index < len(iset):
        raise UsageError("index %d out of range [0, %d)" % (args.index, len(iset)))
    cfg = _local_config(cw, args)
    oracle = Oracle(cw)
    v = local_decode_message(oracle, iset, args.index, cfg)
    if v is None:
        print(json.dumps({"status": "failure", "queries": oracle.queries}))
        return EXIT_FAIL
    print(json.dumps({"value": v, "queries": oracle.queries}))
    return EXIT_OK


def cmd_interp_set(args) -> int:
    p = _params(args)
    _write(args.out, build_interpolating_set(p, method=args.method).to_json())
    return EXIT_OK


def cmd_bench(args) -> int:
    p = _params(args)
    try:
        report = run_bench(args.mode, p, args.rate, args.trials, args.seed, args.delta0, args.channel)
    except ValueError as exc:
        raise UsageError(str(exc))
    _write(args.out, report.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multcode", description="Multiplicity codes: encode, corrupt, decode.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="rate and distance of a code")
    _add_params(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("encode", help="encode a polynomial file")
    _add_params(p)
    p.add_argument("--poly", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("corrupt", help="apply the seeded symbol-error channel")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--rate", type=rational, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=MODES, default="exact")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("decode", help="decode a received word")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--mode", choices=("unique", "global"), default="unique")
    p.add_argument("--delta0", type=rational)
    p.add_argument("--radius", type=rational, help="unique mode only; default half the distance")
    p.set_defaults(func=cmd_decode)

    for name, func in (("local-correct", cmd_local_correct), ("local-decode", cmd_local_decode)):
        p = sub.add_parser(name)
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--delta0", type=rational, required=True)
        p.add_argument("--seed", type=int, default=0)
        if name == "local-correct":
            p.add_argument("--point", type=point, required=True)
            p.add_argument("--variant", choices=("main", "line", "mline"), default="main")
        else:
            p.add_argument("--set", required=True)
            p.add_argument("--index", type=int, required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("interp-set", help="write an interpolating set")
    _add_params(p)
    p.add_argument("--out")
    p.add_argument("--method", choices=("auto", "greedy", "block"), default="auto")
    p.set_defaults(func=cmd_interp_set)

    p = sub.add_parser("bench", help="seeded Monte-Carlo trials")
    _add_params(p)
    p.add_argument("--mode", choices=BENCH_MODES, required=True)
    p.add_argument("--rate", type=rational, required=True)
    p.add_argument("--delta0", type=rational, help="defaults to --rate")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--channel", choices=MODES, default="exact")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
