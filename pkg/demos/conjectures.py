"""Exhaustive conjecture audits on small regular polygons.

Run: python demos/conjectures.py
"""
from treeflip.instances import regular_polygon
from treeflip.oracle import SymmetryGroup, build_graph
from treeflip.oracle.conjectures import find_greedy_dead_end, happy_sweep, parking_sweep, slide_happy_gap


def edges(t):
    return " ".join(f"{a}{b}" for a, b in t.sorted_edges())


def main():
    for n in range(4, 8):
        ps = regular_polygon(n)
        g = build_graph(ps)
        sym = SymmetryGroup.dihedral(ps)
        h, p = happy_sweep(g, sym), parking_sweep(g, sym)
        print(f"n={n}: happy-edge failures {h.failures}, hull-parking failures {p.failures} "
              f"({h.checked} pairs up to symmetry)")

    ps = regular_polygon(6)
    w = find_greedy_dead_end(build_graph(ps), SymmetryGroup.dihedral(ps))
    print(f"\ngreedy perfect flips can get stuck (hexagon):\n  {edges(w.initial)}  ->  {edges(w.final)}")
    print(f"  a perfect sequence of {len(w.perfect)} flips exists, but this order stops after {len(w.stuck)}")

    ps = regular_polygon(8)
    gap = slide_happy_gap(ps, sym=SymmetryGroup.dihedral(ps), distance=8)
    print(f"\nslides on the octagon:\n  {edges(gap.initial)}  ->  {edges(gap.final)}")
    print(f"  slide distance {gap.distance}, keeping every common edge costs {gap.happy_distance}")


if __name__ == "__main__":
    main()
