"""Command-line interface.

Every command writes tab-delimited text to stdout. Commands that accept
``--figure PATH`` also render a matplotlib figure of the same data to PATH.
Exit status is 0 on success, 1 when a validation or invariant check fails
and 2 for usage and parse errors; failures print ``error: <Kind>: message``
on stderr.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .completion import (
    AdmissibilityRefuted,
    ApproxReal,
    ContractViolation,
    UPoint,
    dist_real,
    divergent_point,
    divergent_sequence,
    ext_complete,
    homotopy,
)
from .disring import INSTANCES, check_axioms
from .dyadic import Dyadic
from .extend import (
    DyadicUrysohn,
    MetricViolation,
    PartialIsometry,
    PrmsViolation,
    back_and_forth,
    cantor_unpair,
    ext_d,
    extend_isometry,
    szudzik_unpair,
)
from .metricio import ParseError, load_space
from .space import AgeViolation, MalformedEncoding, NotPermissible, Store

DEFAULT_AXIOM_INSTANCES = ("dyadic", "rational", "boolean", "z2")


class InvariantFailure(RuntimeError):
    """A command's own post-check found a discrepancy."""


class UsageError(ValueError):
    pass


USAGE_ERRORS = (UsageError, ParseError, MalformedEncoding, AgeViolation, OSError)
CHECK_ERRORS = (
    InvariantFailure,
    MetricViolation,
    PrmsViolation,
    NotPermissible,
    AdmissibilityRefuted,
    ContractViolation,
)


def _dyadic(text: str) -> Dyadic:
    try:
        return Dyadic.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a dyadic literal: {text!r}") from None


def _nonneg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}")
    return value


def _emit(out, *fields) -> None:
    print("\t".join(str(f) for f in fields), file=out)


def _pairs(store: Store, args: Sequence[str]) -> list[tuple[int, Dyadic]]:
    if len(args) % 2:
        raise UsageError("constraints come in pairs: ENCODING DYADIC ...")
    pairs = []
    for enc, chi in zip(args[::2], args[1::2]):
        try:
            value = Dyadic.parse(chi)
        except ValueError:
            raise UsageError(f"not a dyadic literal: {chi!r}") from None
        pairs.append((store.require_point(store.parse_encoding(enc)), value))
    return pairs


# --- commands ---------------------------------------------------------------------------


def cmd_validate(args, store: Store, out) -> int:
    space = load_space(args.file)
    n = len(space.labels)
    _emit(out, "ok", args.file, f"{n} point" if n == 1 else f"{n} points")
    return 0


def cmd_embed(args, store: Store, out) -> int:
    space = load_space(args.file)
    upto = space.size if args.upto is None else args.upto
    result = extend_isometry(store, space, PartialIsometry(), upto)
    _emit(out, "index", "label", "encoding")
    images = iter(result.targets())
    placed = []
    for n in range(upto):
        label = space.at(n)
        if label is None:
            continue
        w = next(images)
        placed.append((label, w))
        _emit(out, n, label, store.format_encoding(w))
    for x, u in placed:
        for y, v in placed:
            if store.distance(u, v) != space.dist(x, y):
                raise InvariantFailure(f"images of {x} and {y} are {store.distance(u, v)} apart, not {space.dist(x, y)}")
    if args.figure:
        from .plots import distance_heatmap

        labels = list(dict.fromkeys(x for x, _ in placed))
        first = {x: u for x, u in reversed(placed)}
        table = [[store.distance(first[x], first[y]) for y in labels] for x in labels]
        distance_heatmap(table, labels, args.figure, title=f"{space.name}: distances between images")
    return 0


def cmd_dist(args, store: Store, out) -> int:
    a = store.parse_encoding(args.enc1)
    b = store.parse_encoding(args.enc2)
    _emit(out, store.distance(a, b))
    return 0


def cmd_ext(args, store: Store, out) -> int:
    c = _pairs(store, args.constraints)
    _emit(out, store.format_encoding(ext_d(store, c)))
    return 0


def cmd_backforth(args, store: Store, out) -> int:
    left = DyadicUrysohn(store, cantor_unpair, "cantor")
    right = DyadicUrysohn(store, cantor_unpair, "cantor") if args.same else DyadicUrysohn(store, szudzik_unpair, "szudzik")
    state = back_and_forth(left, right, args.rounds)
    _emit(out, "round", "placed_from", "left", "right")
    for k, (p, q) in enumerate(zip(state.left, state.right)):
        _emit(out, k // 2, "left" if k % 2 == 0 else "right", store.format_encoding(p), store.format_encoding(q))
    problems = state.violations()
    if args.same:
        problems += [f"pair {k} is not the identity" for k, (p, q) in enumerate(zip(state.left, state.right)) if not store.quot_eq(p, q)]
    if args.figure:
        from .plots import placement_plot

        tables = [[[store.distance(p, q) for q in side] for p in side] for side in (state.left, state.right)]
        placement_plot(*tables, args.figure, title=f"back-and-forth, {args.rounds} rounds")
    if problems:
        raise InvariantFailure("; ".join(problems))
    _emit(out, "invariants", "ok")
    return 0


def cmd_axioms(args, store: Store, out) -> int:
    if args.instance == "all":
        names = list(INSTANCES)
    elif args.instance is None:
        names = list(DEFAULT_AXIOM_INSTANCES)
    elif args.instance in INSTANCES:
        names = [args.instance]
    else:
        raise UsageError(f"unknown instance {args.instance!r}; choose from {', '.join(INSTANCES)} or all")
    failed = []
    _emit(out, "instance", "group", "axiom", "verdict", "checked", "witness")
    for name in names:
        inst = INSTANCES[name]
        report = check_axioms(inst, sample_budget=args.budget, seed=args.seed)
        for line in report.lines(inst.show):
            _emit(out, name, line)
        if not report.passed:
            failed.append(name)
    if failed:
        raise InvariantFailure(f"axioms fail for {', '.join(failed)}")
    return 0


def cmd_diverge(args, store: Store, out) -> int:
    points = [divergent_sequence(store, n) for n in range(args.upto + 1)]
    _emit(out, "n", "encoding")
    for n, s in enumerate(points):
        _emit(out, n, store.format_encoding(s))
    table = [[store.distance(a, b) for b in points] for a in points]
    _emit(out, "distance", *(f"s_{n}" for n in range(len(points))))
    for k, row in enumerate(table):
        _emit(out, f"s_{k}", *row)
    bad = [
        (k, l)
        for k, row in enumerate(table)
        for l, d in enumerate(row)
        if d != (Dyadic(0) if k == l else Dyadic.pow2(min(k, l)))
    ]
    if args.figure:
        from .plots import distance_heatmap

        distance_heatmap(table, [f"s_{n}" for n in range(len(points))], args.figure, title="divergent sequence")
    if bad:
        raise InvariantFailure(f"distance table differs from 2^-min(k, l) at {bad}")
    return 0


def _upoint(store: Store, token: str) -> UPoint:
    if token == "divergent":
        return divergent_point(store)
    return UPoint.constant(store.require_point(store.parse_encoding(token)), name=token)


def cmd_approx(args, store: Store, out) -> int:
    precision = args.precision
    series: dict[str, list] = {}
    if args.query == "diverge":
        x = divergent_point(store)
        anchor = _upoint(store, args.point)
        series[f"d(divergent, {args.point})"] = [dist_real(store, x, anchor).query(n) for n in range(precision + 1)]
        names = list(series)
        _emit(out, "n", *names)
        for n in range(precision + 1):
            _emit(out, n, *(series[k][n] for k in names))
    else:
        if args.query == "ext":
            if len(args.constraints) % 2:
                raise UsageError("constraints come in pairs: POINT DYADIC ...")
            tokens = args.constraints[::2]
            points = [_upoint(store, t) for t in tokens]
            reals = []
            for chi in args.constraints[1::2]:
                try:
                    reals.append(ApproxReal.of(Dyadic.parse(chi)))
                except ValueError:
                    raise UsageError(f"not a dyadic literal: {chi!r}") from None
            result = ext_complete(store, list(zip(points, reals)))
        else:
            tokens = [args.x, args.z]
            points = [_upoint(store, t) for t in tokens]
            result = homotopy(store, args.t, points[0], points[1])
        legs = [dist_real(store, result, p) for p in points]
        names = [f"d(result, {t})" for t in tokens]
        for name, leg in zip(names, legs):
            series[name] = [leg.query(n) for n in range(precision + 1)]
        _emit(out, "n", "approximant", *names)
        for n in range(precision + 1):
            _emit(out, n, store.format_encoding(result.query(n)), *(series[k][n] for k in names))
    if args.figure:
        from .plots import enclosure_plot

        enclosure_plot(series, args.figure, title=f"approx {args.query}")
    return 0


# --- entry point ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="urysohn", description="Exact computations in the dyadic Urysohn space.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check that a metric-space file parses and is a metric")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("embed", help="embed a metric-space file and print the image encodings")
    p.add_argument("file")
    p.add_argument("--upto", type=_nonneg, help="number of enumeration indices (default: all)")
    p.add_argument("--figure", metavar="PATH", help="also save a heatmap of the image distances")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("dist", help="exact distance between two encodings")
    p.add_argument("enc1")
    p.add_argument("enc2")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("ext", help="one-point extension of ENCODING DYADIC pairs")
    p.add_argument("constraints", nargs="*", metavar="ENC DYADIC")
    p.set_defaults(func=cmd_ext)

    p = sub.add_parser("backforth", help="back-and-forth between two enumerations of the space")
    p.add_argument("--rounds", type=_nonneg, required=True)
    p.add_argument("--same", action="store_true", help="use the same enumeration on both sides")
    p.add_argument("--figure", metavar="PATH", help="also save the distance tables of the placed points")
    p.set_defaults(func=cmd_backforth)

    p = sub.add_parser("axioms", help="check the disring axioms of an instance")
    p.add_argument("--instance", help=f"one of {', '.join(INSTANCES)} or 'all' (default: the sound instances)")
    p.add_argument("--budget", type=_nonneg, default=1000, help="samples per axiom on infinite carriers")
    p.add_argument("--seed", type=int, default=20240601)
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("diverge", help="print s_0..s_N and their verified distance table")
    p.add_argument("--upto", type=_nonneg, required=True)
    p.add_argument("--figure", metavar="PATH", help="also save a heatmap of the distance table")
    p.set_defaults(func=cmd_diverge)

    p = sub.add_parser("approx", help="enclosures of real distances in the completion")
    p.add_argument("--precision", type=_nonneg, required=True)
    p.add_argument("--figure", metavar="PATH", help="also save a plot of the enclosures")
    figure = argparse.ArgumentParser(add_help=False)
    figure.add_argument("--figure", metavar="PATH", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    queries = p.add_subparsers(dest="query", required=True)
    q = queries.add_parser("diverge", parents=[figure], help="distance from the limit of s_n to a point")
    q.add_argument("point", nargs="?", default="(0)", help="encoding or 'divergent' (default: (0))")
    q = queries.add_parser("ext", parents=[figure], help="extension with POINT DYADIC constraints; POINT may be 'divergent'")
    q.add_argument("constraints", nargs="+", metavar="POINT DYADIC")
    q = queries.add_parser("homotopy", parents=[figure], help="the contraction H(t, x) towards z")
    q.add_argument("t", type=_dyadic)
    q.add_argument("x")
    q.add_argument("z")
    p.set_defaults(func=cmd_approx)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    store = Store()
    try:
        return args.func(args, store, sys.stdout)
    except USAGE_ERRORS as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2
    except CHECK_ERRORS as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
