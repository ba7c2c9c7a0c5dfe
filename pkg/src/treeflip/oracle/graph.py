"""The reconfiguration graph: nodes are trees, arcs are single flips."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ..geometry import PointSet
from ..trees import Tree
from . import kernels
from .enumeration import TooLarge, enumerate_trees

RULES = {"exchange": kernels.RULE_EXCHANGE, "slide": kernels.RULE_SLIDE}
GRAPH_LIMIT = 11
DIAMETER_LIMIT = 10


class Unreachable(RuntimeError):
    pass


def set_threads() -> int:
    """Apply ``TREEFLIP_THREADS`` (default 1) to numba and return the count."""
    import numba

    want = int(os.environ.get("TREEFLIP_THREADS", "1"))
    want = max(1, min(want, numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(want)
    return want


@dataclass
class ReconfigGraph:
    ps: PointSet
    codes: np.ndarray  # sorted uint64 tree codes
    indptr: np.ndarray
    indices: np.ndarray
    rule: str = "exchange"
    _paths: np.ndarray | None = field(default=None, repr=False)

    @property
    def num_nodes(self) -> int:
        return len(self.codes)

    @property
    def num_edges(self) -> int:
        """Each unordered flip pair once."""
        return len(self.indices) // 2

    def index(self, tree) -> int:
        code = np.uint64(tree.code if isinstance(tree, Tree) else tree)
        k = int(np.searchsorted(self.codes, code))
        if k >= len(self.codes) or self.codes[k] != code:
            raise KeyError("tree is not a node of this graph")
        return k

    def tree(self, k: int) -> Tree:
        return Tree.from_code(self.ps, int(self.codes[k]))

    def neighbours(self, k: int) -> np.ndarray:
        return self.indices[self.indptr[k]:self.indptr[k + 1]]

    @property
    def is_path(self) -> np.ndarray:
        if self._paths is None:
            inc = np.array(self.ps.incident_masks, dtype=np.uint64)
            self._paths = kernels.max_degree_at_most_two(self.codes, self.ps.n, inc)
        return self._paths


def kernel_tables(ps: PointSet):
    """Arrays describing the edge universe for the numba kernels."""
    el = ps.edge_list
    m = len(el)
    if m > 64:
        raise TooLarge(f"n={ps.n} has {m} edges, more than fit in 64 bits")
    ea = np.array([e.a for e in el], dtype=np.int64)
    eb = np.array([e.b for e in el], dtype=np.int64)
    inc = np.array(ps.incident_masks, dtype=np.uint64)
    cross = np.array(ps.cross_masks, dtype=np.uint64)
    n = ps.n
    eid = np.full((n, n), -1, dtype=np.int64)
    for i, (a, b) in enumerate(el):
        eid[a, b] = eid[b, a] = i
    empty = np.zeros((n, n, n), dtype=np.bool_)
    for s, t, w in combinations(range(n), 3):
        ok = not any(ps.point_in_triangle(v, s, t, w) for v in range(n) if v not in (s, t, w))
        for x, y, z in ((s, t, w), (s, w, t), (t, s, w), (t, w, s), (w, s, t), (w, t, s)):
            empty[x, y, z] = ok
    return n, m, ea, eb, inc, cross, eid, empty


def build_graph(ps: PointSet, rule: str = "exchange", *, codes=None, force: bool = False) -> ReconfigGraph:
    """Enumerate the trees and connect the ones that differ by a single flip."""
    if rule not in RULES:
        raise ValueError(f"unknown flip rule {rule!r}")
    if ps.n > GRAPH_LIMIT:
        raise TooLarge(f"n={ps.n} exceeds the graph guard ({GRAPH_LIMIT})")
    if codes is None:
        codes = enumerate_trees(ps, force=force)
    n, m, ea, eb, inc, cross, eid, empty = kernel_tables(ps)
    r = RULES[rule]
    deg = kernels.count_neighbours(codes, n, m, ea, eb, inc, cross, r, eid, empty)
    indptr = np.zeros(len(codes) + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    nbr = kernels.fill_neighbours(codes, indptr, n, m, ea, eb, inc, cross, r, eid, empty)
    indices = np.searchsorted(codes, nbr)
    if len(indices) and (indices.max() >= len(codes) or not np.array_equal(codes[indices], nbr)):
        raise RuntimeError("a flip left the enumerated tree universe")
    width = np.int32 if len(codes) < 2**31 else np.int64
    return ReconfigGraph(ps, codes, indptr, indices.astype(width), rule)


def _bfs(g: ReconfigGraph, src: int) -> np.ndarray:
    dist = np.empty(g.num_nodes, dtype=np.int32)
    queue = np.empty(g.num_nodes, dtype=np.int64)
    kernels.bfs_from(g.indptr, g.indices, src, dist, queue)
    return dist


def distances_from(g: ReconfigGraph, a) -> np.ndarray:
    return _bfs(g, a if isinstance(a, (int, np.integer)) else g.index(a))


def bfs_distance(g: ReconfigGraph, a, b) -> int:
    ia = a if isinstance(a, (int, np.integer)) else g.index(a)
    ib = b if isinstance(b, (int, np.integer)) else g.index(b)
    d = int(_bfs(g, ia)[ib])
    if d < 0:
        raise Unreachable("the reconfiguration graph is disconnected")
    return d


def restricted_distance(g: ReconfigGraph, a, b, *, must_have: int = 0, must_avoid: int = 0) -> int:
    """Distance through trees containing ``must_have`` and avoiding ``must_avoid``; -1 if none."""
    ia = a if isinstance(a, (int, np.integer)) else g.index(a)
    ib = b if isinstance(b, (int, np.integer)) else g.index(b)
    nn = g.num_nodes
    seen = np.zeros(nn, dtype=np.int64)
    dist = np.empty(nn, dtype=np.int32)
    queue = np.empty(nn, dtype=np.int64)
    full = (1 << 64) - 1
    return int(kernels.restricted_bfs(g.indptr, g.indices, g.codes, ia, ib,
                                      np.uint64(must_have), np.uint64(must_avoid & full),
                                      1, seen, dist, queue))


def shortest_path(g: ReconfigGraph, a, b, rng=None) -> list[int]:
    """Node ids of one shortest path; a random one when ``rng`` is given."""
    ia = a if isinstance(a, (int, np.integer)) else g.index(a)
    ib = b if isinstance(b, (int, np.integer)) else g.index(b)
    dist = _bfs(g, ib)
    if dist[ia] < 0:
        raise Unreachable("the reconfiguration graph is disconnected")
    path = [ia]
    v = ia
    while v != ib:
        nxt = [int(w) for w in g.neighbours(v) if dist[w] == dist[v] - 1]
        v = rng.choice(nxt) if rng is not None else min(nxt)
        path.append(v)
    return path


def path_to_sequence(g: ReconfigGraph, path: list[int]):
    from ..trees import FlipSequence, Flip

    el = g.ps.edge_list
    steps = []
    for u, v in zip(path, path[1:]):
        cu, cv = int(g.codes[u]), int(g.codes[v])
        r = (cu & ~cv).bit_length() - 1
        a = (cv & ~cu).bit_length() - 1
        steps.append(Flip(el[r], el[a]))
    return FlipSequence(g.tree(path[0]), tuple(steps))


@dataclass(frozen=True)
class EccentricityReport:
    diameter: int
    radius: int
    path_count: int
    path_diameter: int
    path_radius_all_centres: int
    path_radius_path_centres: int


def eccentricity_report(g: ReconfigGraph, sym=None, *, force: bool = False) -> EccentricityReport:
    """Diameter, radius and the path statistics from one BFS per orbit."""
    if g.ps.n > DIAMETER_LIMIT and not force:
        raise TooLarge(f"n={g.ps.n} exceeds the diameter guard ({DIAMETER_LIMIT})")
    set_threads()
    is_path = g.is_path
    if sym is not None:
        reps, rep_of = sym.orbit_representatives(g.codes)
    else:
        reps = np.arange(g.num_nodes, dtype=np.int64)
        rep_of = reps
    ecc, pecc, reached = kernels.eccentricities(g.indptr, g.indices, reps.astype(np.int64), is_path)
    if (reached != g.num_nodes).any():
        raise Unreachable("the reconfiguration graph is disconnected")
    # spread orbit values back to every node
    ecc_all = ecc[rep_of]
    pecc_all = pecc[rep_of]
    return EccentricityReport(
        diameter=int(ecc_all.max()),
        radius=int(ecc_all.min()),
        path_count=int(is_path.sum()),
        path_diameter=int(pecc_all[is_path].max()),
        path_radius_all_centres=int(pecc_all.min()),
        path_radius_path_centres=int(pecc_all[is_path].min()),
    )


def diameter_radius(g: ReconfigGraph, sym=None, *, force: bool = False) -> tuple[int, int]:
    r = eccentricity_report(g, sym, force=force)
    return r.diameter, r.radius


def path_stats(g: ReconfigGraph, sym=None, *, force: bool = False) -> tuple[int, int, int]:
    """(path count, max distance between paths, path radius).

    The radius uses all trees as candidate centres; the paths-only variant is
    in :func:`eccentricity_report`.
    """
    r = eccentricity_report(g, sym, force=force)
    return r.path_count, r.path_diameter, r.path_radius_all_centres
