"""Command line driver: one task per invocation.

Exit codes: 0 success, 1 parse or validation error, 2 the reduction stopped
with a diagnosis (or ``isocheck`` found the inputs non-isomorphic), 64 usage
error.
"""
from __future__ import annotations

import argparse
import sys

from . import canon, gsf
from .generate import gen
from .graph import validate
from .reduce import InvalidStructure, Policy, UnsupportedStructure, reduce
from .seifert import PieceError, classify_piece

EXIT_OK, EXIT_INVALID, EXIT_DIAGNOSIS, EXIT_USAGE = 0, 1, 2, 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _policy(text: str) -> Policy:
    key, sep, value = text.partition("=")
    if key != "seed" or not sep:
        raise argparse.ArgumentTypeError(f"expected seed=N, got {text!r}")
    try:
        return Policy(int(value))
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="graphmfd", description="Graph structures on 3-manifolds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("validate", help="check a GSF file").add_argument("file")
    sub.add_parser("classify", help="thin type of every piece").add_argument("file")
    r = sub.add_parser("reduce", help="reduce to a canonical graph structure")
    r.add_argument("file")
    r.add_argument("--policy", type=_policy, default=Policy(),
                   help="move-selection order, seed=N (default: smallest id first)")
    r.add_argument("--trace", metavar="FILE", help="write one move per line")
    sub.add_parser("canon", help="canonical signature (hex)").add_argument("file")
    iso = sub.add_parser("isocheck", help="exit 0 iff the two structures are isomorphic")
    iso.add_argument("a")
    iso.add_argument("b")
    g = sub.add_parser("gen", help="random valid GSF")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--pieces", type=int, required=True)
    g.add_argument("--rays", type=int, default=0)
    g.add_argument("--chain-heavy", action="store_true")
    return p


def _load_valid(path: str):
    g = gsf.load(path)
    problems = validate(g)
    if problems:
        raise InvalidStructure("\n".join(problems))
    return g


def _run(args, out, err) -> int:
    if args.command == "validate":
        problems = validate(gsf.load(args.file))
        for line in problems:
            print(line, file=out)
        if not problems:
            print("valid", file=out)
        return EXIT_INVALID if problems else EXIT_OK
    if args.command == "classify":
        g = _load_valid(args.file)
        for pid, piece in g.pieces.items():
            print(f"{pid}\t{classify_piece(piece)}", file=out)
        return EXIT_OK
    if args.command == "reduce":
        outcome = reduce(_load_valid(args.file), args.policy)
        if args.trace:
            with open(args.trace, "w") as fh:
                fh.writelines(f"{m}\n" for m in outcome.trace)
        if not outcome.ok:
            print(outcome.diagnosis, file=out)
            return EXIT_DIAGNOSIS
        out.write(gsf.serialize(outcome.reduced))
        return EXIT_OK
    if args.command == "canon":
        print(canon.signature(_load_valid(args.file)).hex(), file=out)
        return EXIT_OK
    if args.command == "isocheck":
        same = canon.isomorphic(_load_valid(args.a), _load_valid(args.b))
        print("isomorphic" if same else "not isomorphic", file=out)
        return EXIT_OK if same else EXIT_DIAGNOSIS
    if args.command == "gen":
        try:
            g = gen(args.seed, args.pieces, args.rays, chain_heavy=args.chain_heavy)
        except ValueError as exc:
            raise _UsageError(f"graphmfd gen: {exc}") from None
        out.write(gsf.serialize(g))
        return EXIT_OK
    raise _UsageError(f"unknown command {args.command!r}")


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:  # --help
            return exc.code or EXIT_OK
        return _run(args, out, err)
    except _UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except gsf.ParseError as exc:
        print(f"parse error: {exc}", file=err)
        return EXIT_INVALID
    except (InvalidStructure, PieceError) as exc:
        print(f"invalid structure:\n{exc}", file=err)
        return EXIT_INVALID
    except UnsupportedStructure as exc:
        print(f"unsupported structure: {exc}", file=err)
        return EXIT_INVALID
    except OSError as exc:
        print(f"cannot read input: {exc}", file=err)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
