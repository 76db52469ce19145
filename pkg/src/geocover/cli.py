"""Command line entry point: ``geocover discretize`` and ``geocover selfcheck``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import figures
from .errors import CapExceeded, DegeneracyUnresolved, GeoCoverError
from .geom import DEFAULT_TOL, Tolerance
from .io import InputError, dumps, load_points, load_shape, result_document
from .pipeline import ALGORITHMS, discretize, verify
from .setcover import exact_cover, greedy_cover, to_cover_instance
from .svg import emit_svg

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DEGENERATE, EXIT_CAP = 0, 1, 2, 3, 4

log = logging.getLogger("geocover")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geocover",
                                description="Discretize planar cover problems into set cover instances.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("discretize", help="compute the distinct canonical translates")
    d.add_argument("--points", required=True, type=Path, help="JSON or CSV point file")
    d.add_argument("--shape", required=True, type=Path, help="JSON prototype file")
    d.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    d.add_argument("--solver", choices=("none", "greedy", "exact"), default="none")
    d.add_argument("--epsilon", type=float, default=DEFAULT_TOL.eps)
    d.add_argument("--perturbation", type=float, default=DEFAULT_TOL.perturbation)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out", required=True, type=Path)
    d.add_argument("--svg", type=Path)
    d.add_argument("--no-verify", action="store_true", help="skip the containment re-check")

    s = sub.add_parser("selfcheck", help="measure the lower-bound constructions")
    s.add_argument("--spikes", type=int, nargs="*", default=[1, 2, 3, 4])
    s.add_argument("--groups", type=int, nargs="*", default=[3, 5, 8])
    return p


def run_discretize(args) -> int:
    try:
        tol = Tolerance(args.epsilon, args.perturbation)
        points = load_points(args.points)
        shape = load_shape(args.shape)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        res = discretize(points, shape, args.algorithm, tol, args.seed)
        solution = None
        if args.solver != "none":
            inst = to_cover_instance(res.translates, len(points))
            solution = greedy_cover(inst) if args.solver == "greedy" else exact_cover(inst)
    except DegeneracyUnresolved as exc:
        print(f"error: degeneracy unresolved: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GeoCoverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL

    if not args.no_verify:
        problems = verify(res, shape, tol)
        if problems:
            for msg in problems[:5]:
                print(f"error: round trip failed: {msg}", file=sys.stderr)
            return EXIT_FAIL

    doc = result_document(res, solution, args.seed, tol.perturbation)
    args.out.write_text(dumps(doc))
    if args.svg:
        args.svg.write_text(emit_svg(doc, points, shape))
    log.info("%d canonical translates written to %s", len(res.translates), args.out)
    return EXIT_OK


def run_selfcheck(args) -> int:
    ok = True
    for a in args.spikes:
        got = figures.spiked_pair_intersections(a)
        want = 8 * a * a
        ok &= got == want
        print(f"spiked squares a={a} m={8 * a}: {got} perimeter crossings (8a^2 = {want})")
    from .disk_traverse import report_canonical_disks_traverse
    from .prepare import disk_degeneracies, prepare
    for a in args.groups:
        prep = prepare(figures.dense_circles(a), lambda q: disk_degeneracies(q, 1.0))
        rep = report_canonical_disks_traverse(prep.points, 1.0)
        big = [t for t in rep.translates if len(t.covered) >= 2 * a]
        sizes = sorted({len(t.covered) for t in big})
        ok &= len(big) >= a * a
        print(f"dense circles a={a} n={4 * a}: {len(big)} canonical disks with >= {2 * a} points "
              f"(a^2 = {a * a}; sizes {sizes})")
    print("selfcheck " + ("passed" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "discretize":
        return run_discretize(args)
    return run_selfcheck(args)


if __name__ == "__main__":
    sys.exit(main())
