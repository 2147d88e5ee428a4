"""Command-line front end: ``pbmc count | incremental | gen``."""

from __future__ import annotations

import argparse
import os
import sys

from . import oracle
from .counting import InvariantError, count, validate_graded_trace
from .formula import ParseError, parse_formula, parse_var_list
from .incremental import run_script

EXIT_OK, EXIT_PARSE, EXIT_INVARIANT = 0, 1, 2


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _projection_arg(arg):
    """``--project`` takes a file path or an inline list such as ``x1,x3``."""
    if arg is None:
        return None
    if os.path.exists(arg):
        return _read(arg)
    return arg


def cmd_count(args, out) -> int:
    f = parse_formula(_read(args.path), _projection_arg(args.project))
    res = count(f)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(res.trace.to_json(indent=1))
    print(f"s mc {res.count}", file=out)
    print(res.count, file=out)
    if args.stats:
        for k, v in res.stats.items():
            print(f"c {k} {v}", file=out)
    if args.validate_trace:
        errs = validate_graded_trace(res.trace, f.xset, f.yset)
        for e in errs:
            print(f"c trace violation: {e}", file=sys.stderr)
        if errs:
            return EXIT_INVARIANT
    return EXIT_OK


def _oracle_check(formula, value):
    expected = oracle.brute_projected_count(formula)
    if expected != value:
        raise InvariantError(f"count {value} differs from brute force {expected}")


def cmd_incremental(args, out) -> int:
    text = _read(args.script)
    projection = None
    if args.project is not None:
        projection = parse_var_list(_projection_arg(args.project).replace("proj:", ""), None, args.nvars)
    check = _oracle_check if args.check else None
    for line in run_script(text.splitlines(), nvars=args.nvars, projection=projection, check=check):
        print(line, file=out, flush=True)
    return EXIT_OK


def cmd_gen(args, out) -> int:
    params = dict(nvars=args.nvars, nconstraints=args.nconstraints, max_coeff=args.max_coeff,
                  density=args.density, x_fraction=args.x_fraction, family=args.family)
    if args.session:
        text = oracle.gen_session(args.seed, args.steps, **params)
        suffix = ".inc"
    else:
        text = oracle.instance_text(args.seed, **params)
        suffix = ".pb"
    if args.output:
        path = args.output if args.output.endswith(suffix) else args.output + suffix
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pbmc", description="Exact projected and incremental PB model counting.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", help="count models of a .pb file")
    c.add_argument("path")
    c.add_argument("--project", help="projection variables: file or inline list (x1,x3)")
    c.add_argument("--trace", help="write the computation tree as JSON")
    c.add_argument("--validate-trace", action="store_true", help="fail if the tree is not X,Y-graded")
    c.add_argument("--stats", action="store_true")
    c.set_defaults(func=cmd_count)

    i = sub.add_parser("incremental", help="run an add/remove/count script")
    i.add_argument("script", nargs="?", default="-")
    i.add_argument("--nvars", type=int)
    i.add_argument("--project")
    i.add_argument("--check", action="store_true", help="compare every count with brute force")
    i.set_defaults(func=cmd_incremental)

    g = sub.add_parser("gen", help="write a random instance or session script")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--nvars", type=int, default=10)
    g.add_argument("--nconstraints", type=int, default=5)
    g.add_argument("--max-coeff", type=int, default=5)
    g.add_argument("--density", type=float, default=0.4)
    g.add_argument("--x-fraction", type=float, default=0.5)
    g.add_argument("--family", choices=oracle.FAMILIES)
    g.add_argument("--session", action="store_true", help="emit an incremental script")
    g.add_argument("--steps", type=int, default=5)
    g.add_argument("-o", "--output", help="output path (suffix added if missing)")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ParseError, KeyError, ValueError, OSError) as e:
        msg = e.args[0] if isinstance(e, KeyError) else e
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_PARSE
    except InvariantError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
