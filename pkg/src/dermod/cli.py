"""
Command-line entry point.

Exit codes: 0 ok, 1 usage or parse error, 2 invariant violation, 3 non-flat input.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Sequence

from . import __version__
from .errors import DermodError, InvalidPointError, InvalidSpaceError, NonFlatError, NotAComplexError, ParseError
from .exactlin import format_rational
from .moduli import (
    Connection,
    bracket_on_tangent,
    parse_connection,
    random_flat_connection,
    tangent_cohomology,
    triangulation_invariance,
    trivial_connection,
)
from .rbg import run_resolution_checks
from .scomplex import BUILTIN_SPACES, SemiSimplicialSet, builtin_space, parse_space, validate
from .suite import run_suite

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_NONFLAT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def load_space(source: str, basepoint: str | None = None) -> SemiSimplicialSet:
    """A path to a space file, or a built-in name such as ``torus`` or ``circle:3``."""
    space = parse_space(_read(source)) if os.path.isfile(source) else builtin_space(source)
    if basepoint is not None:
        space = space.with_basepoint(basepoint)
    return space


def load_connection(source: str, space: SemiSimplicialSet, r: int | None, seed: int) -> Connection:
    if source == "trivial":
        return trivial_connection(space, r or 1)
    if source == "random":
        return random_flat_connection(space, r or 1, random.Random(seed))
    conn = parse_connection(_read(source))
    if r is not None and conn.r != r:
        raise ParseError(f"connection file has r = {conn.r} but --r {r} was given")
    return conn


def _emit(report: dict, fmt: str, human: Sequence[str]) -> None:
    if fmt == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        for line in human:
            print(line)


def _dims_lines(dims: Sequence[int], label: str = "H") -> list[str]:
    return [f"  {label}^{k} = {d}" for k, d in enumerate(dims)]


# -- verbs ------------------------------------------------------------------

def cmd_spaces(args) -> int:
    report = {"spaces": [{"name": k, "description": v} for k, v in BUILTIN_SPACES.items()]}
    _emit(report, args.format, [f"{k:<12} {v}" for k, v in BUILTIN_SPACES.items()])
    return EXIT_OK


def cmd_validate(args) -> int:
    space = load_space(args.space, args.basepoint)
    rep = validate(space)
    report = {"space": space.name, "ok": rep.ok, "message": rep.message,
              "simplex": rep.simplex.id if rep.simplex else None,
              "counts": space.counts(), "basepoint": space.basepoint}
    human = [f"{space.name}: {'ok' if rep.ok else 'INVALID'}",
             f"  simplices per dimension: {space.counts()}"]
    if not rep.ok:
        human.append(f"  {rep.message}")
    _emit(report, args.format, human)
    return EXIT_OK if rep.ok else EXIT_INVARIANT


def cmd_tangent(args) -> int:
    space = load_space(args.space, args.basepoint)
    conn = load_connection(args.connection, space, args.r, args.seed)
    rep = tangent_cohomology(space, conn, pre_quotient=args.pre_quotient, bases=args.bases)
    report = rep.to_dict()
    report["seed"] = args.seed
    human = [f"{space.name} (basepoint {rep.basepoint}), r = {rep.r}, connection {rep.connection}",
             "tangent cohomology:"] + _dims_lines(rep.dims)
    if rep.pre_quotient_dims is not None:
        human += ["before the gauge quotient:"] + _dims_lines(rep.pre_quotient_dims)
    human.append(f"linearized freeness: {rep.linearized_free}")
    human.append(f"Euler characteristic consistent: {rep.euler_consistent}")
    if rep.representatives is not None:
        for k, reps in rep.representatives.items():
            for v in reps:
                human.append(f"  rep H^{k}: [{' '.join(format_rational(x) for x in v)}]")
    _emit(report, args.format, human)
    return EXIT_OK if rep.linearized_free and rep.euler_consistent else EXIT_INVARIANT


def cmd_resolution_check(args) -> int:
    rep = run_resolution_checks(args.n, args.r, seed=args.seed, samples=args.samples)
    checks = {
        "d_squared": rep.d_squared,
        "faces_commute_with_d": rep.faces_commute,
        "face_identities": rep.face_identities,
        "degeneracies_commute_with_d": rep.degeneracies_commute,
        "degeneracy_identities": rep.degeneracy_identities,
        "gauge_commutes_with_d": rep.gauge_commutes,
        "gauge_composition": rep.gauge_composition,
        "injectivity": rep.injectivity,
        "tangent_at_flat_points": rep.tangent,
    }
    report = {"n": args.n, "r": args.r, "seed": args.seed, "ok": rep.ok, "checks": checks,
              "generators_by_degree": {str(k): v for k, v in sorted(rep.generators_by_degree.items())},
              "tangent_dims": list(rep.tangent_dims)}
    human = [f"RB_{args.n}GL({args.r}): {'all checks pass' if rep.ok else 'FAILED'}"]
    human += [f"  {'ok  ' if v else 'FAIL'} {k}" for k, v in checks.items()]
    human.append(f"  generators by degree: {dict(sorted(rep.generators_by_degree.items()))}")
    if rep.tangent_dims:
        human.append(f"  tangent dims at sampled flat points: {list(rep.tangent_dims)}")
    _emit(report, args.format, human)
    return EXIT_OK if rep.ok else EXIT_INVARIANT


def cmd_bracket(args) -> int:
    space = load_space(args.space, args.basepoint)
    conn = load_connection(args.connection, space, args.r, args.seed)
    table = bracket_on_tangent(space, conn)
    anti, jac = table.antisymmetric(), table.jacobi()
    report = table.to_dict()
    report.update({"space": space.name, "basepoint": space.basepoint, "connection": conn.digest(),
                   "antisymmetric": anti, "jacobi": jac, "seed": args.seed})
    human = [f"{space.name} (basepoint {space.basepoint}), r = {conn.r}, connection {conn.digest()}"]
    human += _dims_lines([table.dims[k] for k in sorted(table.dims)])
    nonzero = report["constants"]
    if not nonzero:
        human.append("  all brackets vanish on cohomology")
    for c in nonzero:
        (a, i), (b, j) = c["left"], c["right"]
        human.append(f"  [H^{a}_{i}, H^{b}_{j}] = ({', '.join(c['value'])})")
    human.append(f"graded antisymmetry: {anti}")
    human.append(f"graded Jacobi: {jac}")
    _emit(report, args.format, human)
    return EXIT_OK if anti and jac else EXIT_INVARIANT


def cmd_invariance(args) -> int:
    s1 = load_space(args.space, args.basepoint)
    s2 = load_space(args.other_space, args.other_basepoint)
    c1 = load_connection(args.connection, s1, args.r, args.seed)
    c2 = load_connection(args.other_connection, s2, args.r, args.seed + 1)
    rep = triangulation_invariance(s1, c1, s2, c2)
    report = {"first": {"space": s1.name, "dims": list(rep.first)},
              "second": {"space": s2.name, "dims": list(rep.second)},
              "equal": rep.equal, "seed": args.seed}
    human = [f"{s1.name}: {list(rep.first)}", f"{s2.name}: {list(rep.second)}",
             "equal" if rep.equal else "DIFFERENT"]
    _emit(report, args.format, human)
    return EXIT_OK if rep.equal else EXIT_INVARIANT


def cmd_suite(args) -> int:
    results = run_suite(seed=args.seed, only=args.only)
    ok = all(r.passed for r in results)
    report = {"seed": args.seed, "ok": ok, "criteria": [r.to_dict() for r in results]}
    human = [r.line(timing=False) for r in results]
    human.append(f"{sum(r.passed for r in results)}/{len(results)} criteria pass")
    _emit(report, args.format, human)
    return EXIT_OK if ok else EXIT_INVARIANT


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "json"), default="human")
    common.add_argument("--seed", type=int, default=0)

    parser = _Parser(prog="dermod", description="Derived moduli of local systems, exactly over Q.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def space_opts(p, prefix=""):
        p.add_argument(f"--{prefix}space", required=True,
                       help="space file or built-in name (see 'dermod spaces')")
        p.add_argument(f"--{prefix}basepoint", default=None, help="override the basepoint vertex id")

    def conn_opts(p, prefix=""):
        p.add_argument(f"--{prefix}connection", default="trivial",
                       help="'trivial', 'random' (seeded flat sample) or a connection file")

    p = sub.add_parser("spaces", parents=[common], help="list built-in spaces")
    p.set_defaults(func=cmd_spaces)

    p = sub.add_parser("validate", parents=[common], help="check a space's face tables")
    space_opts(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("tangent", parents=[common], help="tangent cohomology at a flat connection")
    space_opts(p)
    conn_opts(p)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--pre-quotient", action="store_true", help="also report dims before the gauge quotient")
    p.add_argument("--bases", action="store_true", help="print cohomology representatives")
    p.set_defaults(func=cmd_tangent)

    p = sub.add_parser("resolution-check", parents=[common], help="verify RB_n GL(r)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--samples", type=int, default=5, help="flat points for the tangent check")
    p.set_defaults(func=cmd_resolution_check)

    p = sub.add_parser("bracket", parents=[common], help="bracket on tangent cohomology")
    space_opts(p)
    conn_opts(p)
    p.add_argument("--r", type=int, default=None)
    p.set_defaults(func=cmd_bracket)

    p = sub.add_parser("invariance", parents=[common], help="compare two triangulations")
    space_opts(p)
    conn_opts(p)
    space_opts(p, "other-")
    conn_opts(p, "other-")
    p.add_argument("--r", type=int, default=None)
    p.set_defaults(func=cmd_invariance)

    p = sub.add_parser("suite", parents=[common], help="run the acceptance battery")
    p.add_argument("--only", type=int, nargs="+", default=None, metavar="N")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for name in ("r", "n", "samples"):
        value = getattr(args, name, None)
        if value is not None and value < (0 if name == "n" else 1):
            print(f"dermod: error: --{name} must be {'non-negative' if name == 'n' else 'positive'}",
                  file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"dermod: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonFlatError as exc:
        print(f"dermod: non-flat input: {exc}", file=sys.stderr)
        return EXIT_NONFLAT
    except (InvalidSpaceError, InvalidPointError, NotAComplexError) as exc:
        print(f"dermod: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except DermodError as exc:
        print(f"dermod: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
