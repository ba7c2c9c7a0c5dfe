"""Command line: validate, reconfigure, census, conjecture, gen.

Exit codes: 0 ok, 1 input error, 2 algorithm precondition, 3 resource guard.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .geometry import GeometryError, NotConvexError
from .io import InputError, load_instance, save_instance, save_sequence, load_sequence
from .trees import TreeError, diff, validate_sequence

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_GUARD = 0, 1, 2, 3

CENSUS_GUARD = 10
CONJECTURE_GUARD = 8


class GuardExceeded(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _pick(trees: dict, name: str):
    if name not in trees:
        raise InputError(f"no tree named {name!r} (have: {', '.join(sorted(trees)) or 'none'})")
    return trees[name]


def cmd_validate(args) -> int:
    ps, trees = load_instance(args.file)
    parts = []
    if args.initial in trees and args.target in trees:
        ds = diff(trees[args.initial], trees[args.target])
        parts += [f"d={ds.d}", f"happy={ds.h}"]
    else:
        parts.append(f"trees={len(trees)}")
    parts.append(f"convex={'true' if ps.convex else 'false'}")
    print(" ".join(parts))
    return EXIT_OK


def cmd_reconfigure(args) -> int:
    from .convex_opt import convex_reconfigure, flip_bound
    from .two_phase import monotone_direction, reconfigure_convex_path, reconfigure_to_monotone_path
    from .two_phase import two_phase_reconfigure

    ps, trees = load_instance(args.file)
    ti = _pick(trees, args.initial)
    tf = _pick(trees, args.target)
    n = ps.n
    h = diff(ti, tf).h
    if args.algo == "two-phase":
        seq = two_phase_reconfigure(ti, tf)
        bound = 2 * n - 3
    elif args.algo == "convex-opt":
        if not ps.convex:
            raise NotConvexError("convex-opt needs points in convex position")
        seq = convex_reconfigure(ti, tf)
        bound = flip_bound(diff(ti, tf).d)
    else:
        if not tf.is_path():
            from .two_phase import NotAPath

            raise NotAPath("target is not a path")
        if monotone_direction(tf) is not None:
            seq = reconfigure_to_monotone_path(ti, tf)
        else:
            seq = reconfigure_convex_path(ti, tf)
        bound = int(1.5 * n - 2 - h)
    report = validate_sequence(seq, tf)
    if not report.ok:
        raise RuntimeError(f"internal error: produced sequence is invalid ({report.error})")
    if args.out:
        save_sequence(args.out, seq)
        # round trip: the written file must replay to the target
        again = validate_sequence(load_sequence(args.out, ti), tf)
        if not again.ok:
            raise RuntimeError("written sequence does not replay")
    print(f"length={report.length} bound={bound} perfect={report.perfect_flips}")
    return EXIT_OK


def _census_points(args):
    from .instances import general_random, regular_polygon

    if args.convex:
        return regular_polygon(args.n)
    return general_random(args.n, args.seed)


def cmd_census(args) -> int:
    from .oracle.cache import cached_graph
    from .oracle.enumeration import TooLarge
    from .oracle.graph import eccentricity_report
    from .oracle.symmetry import SymmetryGroup

    if args.n > CENSUS_GUARD and not args.force:
        raise GuardExceeded(f"census for n={args.n} exceeds the guard ({CENSUS_GUARD}); use --force")
    ps = _census_points(args)
    rule = "slide" if args.slide else "exchange"
    try:
        g = cached_graph(ps, rule, args.cache, force=args.force)
    except TooLarge as exc:
        raise GuardExceeded(str(exc)) from None
    sym = SymmetryGroup.dihedral(ps) if args.sym and ps.convex else None
    r = eccentricity_report(g, sym, force=args.force)
    row = [g.num_nodes, g.num_edges, r.diameter, r.radius]
    if args.paths:
        row += [r.path_count, r.path_diameter, r.path_radius_all_centres]
    print(" ".join(str(v) for v in row))
    return EXIT_OK


def cmd_conjecture(args) -> int:
    from .instances import regular_polygon
    from .oracle.conjectures import find_greedy_dead_end, happy_sweep, parking_sweep, slide_happy_gap
    from .oracle.graph import _bfs, build_graph
    from .oracle.symmetry import SymmetryGroup

    if args.n > CONJECTURE_GUARD and not args.force:
        raise GuardExceeded(f"conjecture sweep for n={args.n} exceeds the guard ({CONJECTURE_GUARD}); use --force")
    ps = regular_polygon(args.n)
    sym = SymmetryGroup.dihedral(ps)
    if args.which == "slide-gap":
        sg = build_graph(ps, "slide")
        want = args.distance if args.distance is not None else args.n
        gap = slide_happy_gap(ps, g=sg, sym=sym, distance=want)
        if gap is None and args.distance is None:
            gap = slide_happy_gap(ps, g=sg, sym=sym)
        if gap is None:
            print(f"no slide gap on the regular {args.n}-gon")
            return EXIT_OK
        print(f"initial {[list(e) for e in gap.initial.sorted_edges()]}")
        print(f"final {[list(e) for e in gap.final.sorted_edges()]}")
        print(f"slide distance {gap.distance} vs happy-preserving {gap.happy_distance}")
        return EXIT_OK
    g = build_graph(ps)
    total = g.num_nodes
    if args.which in ("happy", "parking"):
        sweep = happy_sweep if args.which == "happy" else parking_sweep
        res = sweep(g, sym, sample_sources=args.sample, seed=args.seed)
        scope = f"all {total}x{total} pairs" if args.sample is None else f"{res.checked} sampled pairs"
        if res.passed:
            print(f"{scope} pass ({res.checked} checked, {res.searched} needed a restricted search)")
        else:
            a, b = res.witness
            print(f"{res.failures} failures; first: {[list(e) for e in a.sorted_edges()]} -> "
                  f"{[list(e) for e in b.sorted_edges()]}")
        return EXIT_OK
    # perfect: count ordered pairs with flip distance equal to d
    reps, where = sym.orbit_representatives(g.codes)
    sizes = np.bincount(where, minlength=len(reps))
    pairs = 0
    perfect = 0
    for k, ia in enumerate(reps):
        dist = _bfs(g, int(ia))
        d = np.bitwise_count(g.codes[ia] & ~g.codes)
        hit = int(((dist == d) & (d > 0)).sum())
        perfect += hit * int(sizes[k])
        pairs += (total - 1) * int(sizes[k])
    print(f"perfect sequences exist for {perfect} of {pairs} ordered pairs ({100 * perfect / pairs:.2f}%)")
    w = find_greedy_dead_end(g, sym)
    if w is not None:
        print(f"dead end: {[list(e) for e in w.initial.sorted_edges()]} -> "
              f"{[list(e) for e in w.final.sorted_edges()]} stuck after {len(w.stuck)} perfect flips")
    return EXIT_OK


def cmd_gen(args) -> int:
    from .instances import InstanceSpec

    spec = InstanceSpec(args.kind, args.n, args.seed)
    ps, trees = spec.build()
    if args.out:
        save_instance(args.out, ps, trees)
    else:
        import json

        from .io import instance_doc

        print(json.dumps(instance_doc(ps, trees)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="treeflip", description="Flip reconfiguration of non-crossing spanning trees.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check an instance file")
    v.add_argument("file")
    v.add_argument("--initial", default="initial")
    v.add_argument("--target", default="final")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("reconfigure", help="compute a flip sequence")
    r.add_argument("file")
    r.add_argument("--algo", choices=["two-phase", "convex-opt", "path"], default="two-phase")
    r.add_argument("--initial", default="initial")
    r.add_argument("--target", required=True)
    r.add_argument("--out")
    r.set_defaults(func=cmd_reconfigure)

    c = sub.add_parser("census", help="tree count, flip edges, diameter and radius")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--convex", action="store_true")
    c.add_argument("--seed", type=int, default=0, help="seed for general-position points")
    c.add_argument("--paths", action="store_true")
    c.add_argument("--slide", action="store_true")
    c.add_argument("--sym", action="store_true")
    c.add_argument("--cache")
    c.add_argument("--force", action="store_true")
    c.set_defaults(func=cmd_census)

    q = sub.add_parser("conjecture", help="exhaustive conjecture checks on the regular n-gon")
    q.add_argument("--which", choices=["happy", "parking", "perfect", "slide-gap"], required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--sample", type=int, help="random sources instead of one per orbit")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--distance", type=int, help="slide-gap: slide distance to look at (default n)")
    q.add_argument("--force", action="store_true")
    q.set_defaults(func=cmd_conjecture)

    gn = sub.add_parser("gen", help="write an instance file")
    gn.add_argument("--kind", required=True,
                    choices=["double-broom", "star", "monotone-path", "convex-random",
                             "general-random", "regular-polygon"])
    gn.add_argument("--n", type=int, required=True)
    gn.add_argument("--seed", type=int, default=0)
    gn.add_argument("--out")
    gn.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    from .instances import InstanceError
    from .two_phase import PreconditionError

    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors and --help return their code instead of exiting
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        return args.func(args)
    except GuardExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (NotConvexError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InputError, GeometryError, TreeError, InstanceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
