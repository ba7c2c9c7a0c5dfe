"""Rebuild the exhaustive-search table for convex point sets.

Run: python demos/census.py [max_n]   (default 8; n=9 takes about 20 s)
"""
import sys
import time

from treeflip.instances import regular_polygon
from treeflip.oracle import SymmetryGroup, build_graph, eccentricity_report


def main(max_n=8):
    print(f"{'n':>2} {'trees':>7} {'flips':>8} {'diam':>4} {'rad':>3} {'paths':>5} {'pdiam':>5} {'prad':>4} {'sec':>6}")
    for n in range(3, max_n + 1):
        t0 = time.time()
        ps = regular_polygon(n)
        g = build_graph(ps)
        r = eccentricity_report(g, SymmetryGroup.dihedral(ps))
        print(f"{n:2d} {g.num_nodes:7d} {g.num_edges:8d} {r.diameter:4d} {r.radius:3d} "
              f"{r.path_count:5d} {r.path_diameter:5d} {r.path_radius_all_centres:4d} {time.time() - t0:6.2f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 8)
