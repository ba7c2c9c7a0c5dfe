"""Compare the reconfiguration algorithms on the double broom.

Run: python demos/double_broom.py [n]   (n even, default 8)
"""
import sys

from treeflip import convex_reconfigure, double_broom, double_broom_witness, flip_bound, two_phase_reconfigure
from treeflip.oracle import bfs_distance, build_graph
from treeflip.trees import diff, validate_sequence
from treeflip.two_phase import reconfigure_to_monotone_path


def main(n=8):
    ps, ti, tf = double_broom(n)
    ds = diff(ti, tf)
    print(f"double broom, n={n}: d={ds.d}, happy edges={ds.h}")
    runs = {
        "two-phase": (two_phase_reconfigure(ti, tf), 2 * n - 3),
        "tree-to-path": (reconfigure_to_monotone_path(ti, tf), int(1.5 * n - 2 - ds.h)),
        "convex-opt": (convex_reconfigure(ti, tf), flip_bound(ds.d)),
    }
    if n >= 6:
        runs["lower-bound witness"] = (double_broom_witness(n), int(1.5 * n - 5))
    for name, (seq, bound) in runs.items():
        rep = validate_sequence(seq, tf)
        print(f"  {name:20s} length {rep.length:3d}  bound {bound:3d}  perfect {rep.perfect_flips}")
    if n <= 10:
        print(f"  {'BFS optimum':20s} length {bfs_distance(build_graph(ps), ti, tf):3d}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 8)
