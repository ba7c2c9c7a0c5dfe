"""Exhaustive checks of the happy-edge, hull-parking, perfect-flip and slide questions."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..geometry import edge
from ..trees import Flip, FlipError, FlipSequence, Tree, _flip_code, bits, find_remove_add
from . import kernels
from .enumeration import TooLarge
from .graph import (
    ReconfigGraph,
    _bfs,
    build_graph,
    path_to_sequence,
    restricted_distance,
    shortest_path,
)

PERFECT_D_LIMIT = 20
_FULL = (1 << 64) - 1


@dataclass
class SweepResult:
    checked: int
    searched: int
    failures: int
    witness: tuple | None = None  # (tree a, tree b) of the first failure

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _ids(g: ReconfigGraph, a, b):
    ia = a if isinstance(a, (int, np.integer)) else g.index(a)
    ib = b if isinstance(b, (int, np.integer)) else g.index(b)
    return int(ia), int(ib)


def happy_edge_check(g: ReconfigGraph, a, b) -> bool:
    """Is some shortest flip sequence free of happy-edge flips?"""
    ia, ib = _ids(g, a, b)
    ca, cb = int(g.codes[ia]), int(g.codes[ib])
    plain = int(_bfs(g, ia)[ib])
    return restricted_distance(g, ia, ib, must_have=ca & cb) == plain


def hull_parking_check(g: ReconfigGraph, a, b) -> bool:
    """Is some shortest flip sequence parked only on hull edges?"""
    ia, ib = _ids(g, a, b)
    ca, cb = int(g.codes[ia]), int(g.codes[ib])
    plain = int(_bfs(g, ia)[ib])
    allowed = ca | cb | g.ps.hull_mask
    return restricted_distance(g, ia, ib, must_avoid=~allowed & _FULL) == plain


def _sweep(g: ReconfigGraph, mode: int, sources) -> SweepResult:
    hull = np.uint64(g.ps.hull_mask)
    src = np.asarray(sources, dtype=np.int64)
    checked, searched, failures, ba, bb = kernels.restricted_sweep(
        g.indptr, g.indices, g.codes, src, hull, mode, 0
    )
    witness = (g.tree(int(ba)), g.tree(int(bb))) if failures else None
    return SweepResult(int(checked), int(searched), int(failures), witness)


def _sources(g: ReconfigGraph, sym, sample, rng):
    if sample is not None:
        return rng.choice(g.num_nodes, size=min(sample, g.num_nodes), replace=False)
    if sym is not None:
        return sym.orbit_representatives(g.codes)[0]
    return np.arange(g.num_nodes)


def happy_sweep(g: ReconfigGraph, sym=None, *, sample_sources: int | None = None, seed: int = 0) -> SweepResult:
    """Happy-edge check for every (source, target) pair.

    With ``sym`` only one source per orbit is used, which covers every pair up
    to symmetry. ``sample_sources`` picks random sources instead.
    """
    rng = np.random.default_rng(seed)
    return _sweep(g, 0, _sources(g, sym, sample_sources, rng))


def parking_sweep(g: ReconfigGraph, sym=None, *, sample_sources: int | None = None, seed: int = 0) -> SweepResult:
    if not g.ps.convex:
        raise ValueError("hull parking is only defined in convex position")
    rng = np.random.default_rng(seed)
    return _sweep(g, 1, _sources(g, sym, sample_sources, rng))


# -- perfect flips -----------------------------------------------------------


def perfect_moves(ps, code: int, only_a: int, only_b: int):
    """Every valid perfect flip from ``code`` as (remove id, add id, new code)."""
    el = ps.edge_list
    out = []
    for r in bits(code & only_a):
        for f in bits(only_b & ~code):
            try:
                new = _flip_code(ps, code, Flip(el[r], el[f]))
            except FlipError:
                continue
            out.append((r, f, new))
    return out


def perfect_sequence_exists(a: Tree, b: Tree):
    """(exists, witness sequence or None) using only perfect flips."""
    ps = a.ps
    only_a, only_b = a.code & ~b.code, b.code & ~a.code
    d = only_a.bit_count()
    if d > PERFECT_D_LIMIT:
        raise TooLarge(f"d={d} exceeds the perfect-sequence guard ({PERFECT_D_LIMIT})")
    el = ps.edge_list
    dead = set()
    steps = []

    def dfs(code):
        if code == b.code:
            return True
        if code in dead:
            return False
        for r, f, new in perfect_moves(ps, code, only_a, only_b):
            steps.append(Flip(el[r], el[f]))
            if dfs(new):
                return True
            steps.pop()
        dead.add(code)
        return False

    if dfs(a.code):
        return True, FlipSequence(a, tuple(steps))
    return False, None


@dataclass
class GreedyOutcome:
    completed: bool
    sequence: FlipSequence
    dead_end: Tree | None = None


def greedy_perfect(a: Tree, b: Tree, policy: str = "lex") -> GreedyOutcome:
    """Apply the lexicographically first valid perfect flip until stuck."""
    if policy != "lex":
        raise ValueError(f"unknown policy {policy!r}")
    ps = a.ps
    el = ps.edge_list
    only_a, only_b = a.code & ~b.code, b.code & ~a.code
    code = a.code
    steps = []
    while code != b.code:
        moves = perfect_moves(ps, code, only_a, only_b)
        if not moves:
            return GreedyOutcome(False, FlipSequence(a, tuple(steps)), Tree.from_code(ps, code))
        r, f, code = moves[0]
        steps.append(Flip(el[r], el[f]))
    return GreedyOutcome(True, FlipSequence(a, tuple(steps)))


@dataclass
class DeadEndWitness:
    initial: Tree
    final: Tree
    perfect: FlipSequence  # a complete perfect sequence
    stuck: FlipSequence  # perfect flips that end in a dead end


def find_greedy_dead_end(g: ReconfigGraph, sym=None) -> DeadEndWitness | None:
    """A pair with a perfect sequence where another perfect ordering gets stuck.

    A perfect sequence exists exactly when the flip distance equals d, so
    only those pairs are explored.
    """
    ps = g.ps
    el = ps.edge_list
    sources = sym.orbit_representatives(g.codes)[0] if sym is not None else range(g.num_nodes)
    for ia in sources:
        dist = _bfs(g, int(ia))
        ca = int(g.codes[ia])
        for ib in range(g.num_nodes):
            cb = int(g.codes[ib])
            only_a, only_b = ca & ~cb, cb & ~ca
            d = only_a.bit_count()
            if d < 2 or dist[ib] != d:
                continue
            # search all perfect orderings for a state with no way forward
            parent = {ca: None}
            queue = deque([ca])
            while queue:
                c = queue.popleft()
                moves = perfect_moves(ps, c, only_a, only_b)
                if not moves and c != cb:
                    a, b = Tree.from_code(ps, ca), Tree.from_code(ps, cb)
                    stuck = []
                    x = c
                    while parent[x] is not None:
                        x, step = parent[x]
                        stuck.append(step)
                    ok, witness = perfect_sequence_exists(a, b)
                    assert ok
                    return DeadEndWitness(a, b, witness, FlipSequence(a, tuple(reversed(stuck))))
                for r, f, new in moves:
                    if new not in parent:
                        parent[new] = (c, Flip(el[r], el[f]))
                        queue.append(new)
    return None


# -- edge slides ---------------------------------------------------------------


def is_slide(t: Tree, f: Flip) -> bool:
    """Does ``f`` slide one end of its removed edge along a tree edge through an empty triangle?"""
    r, a = f
    shared = set(r) & set(a)
    if len(shared) != 1:
        return False
    (s,) = shared
    v, w = r.other(s), a.other(s)
    if edge(v, w) not in t.edges:
        return False
    ps = t.ps
    if any(ps.point_in_triangle(p, s, v, w) for p in range(ps.n) if p not in (s, v, w)):
        return False
    try:
        _flip_code(ps, t.code, f)
    except FlipError:
        return False
    return True


def slide_adjacent(t: Tree) -> list[Flip]:
    """All valid edge slides from ``t``."""
    if len(t.edges) != t.ps.n - 1:
        raise ValueError("not a spanning tree")
    out = []
    for r in t.sorted_edges():
        for s in r:
            v = r.other(s)
            for w in sorted(t.adjacency()[v]):
                if w == s:
                    continue
                f = Flip(r, edge(s, w))
                if edge(s, w) not in t.edges and is_slide(t, f):
                    out.append(f)
    return out


def restricted_path(g: ReconfigGraph, a: int, b: int, must_have: int = 0, must_avoid: int = 0) -> list[int] | None:
    """Node ids of a shortest path inside the restricted subgraph."""
    codes = g.codes
    mh, ma = np.uint64(must_have), np.uint64(must_avoid & _FULL)
    allowed = ((codes & mh) == mh) & ((codes & ma) == 0)
    if not (allowed[a] and allowed[b]):
        return None
    parent = {a: None}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        if v == b:
            break
        for w in g.neighbours(v):
            w = int(w)
            if allowed[w] and w not in parent:
                parent[w] = v
                queue.append(w)
    if b not in parent:
        return None
    out = [b]
    while parent[out[-1]] is not None:
        out.append(parent[out[-1]])
    return out[::-1]


@dataclass
class SlideGap:
    initial: Tree
    final: Tree
    distance: int
    happy_distance: int
    shortest: FlipSequence
    happy_shortest: FlipSequence


def slide_happy_gap(ps, *, g: ReconfigGraph | None = None, sym=None, distance: int | None = None) -> SlideGap | None:
    """A pair whose slide distance grows when happy edges must stay put.

    With ``distance`` given, only pairs at that slide distance are tried.
    """
    if g is None:
        g = build_graph(ps, "slide")
    sources = sym.orbit_representatives(g.codes)[0] if sym is not None else range(g.num_nodes)
    nn = g.num_nodes
    seen = np.zeros(nn, dtype=np.int64)
    rdist = np.empty(nn, dtype=np.int32)
    queue = np.empty(nn, dtype=np.int64)
    stamp = 0
    for ia in sources:
        ia = int(ia)
        dist = _bfs(g, ia)
        ca = int(g.codes[ia])
        for ib in range(nn):
            if distance is not None and dist[ib] != distance:
                continue
            cb = int(g.codes[ib])
            if dist[ib] == (ca & ~cb).bit_count():
                continue
            stamp += 1
            r = kernels.restricted_bfs(g.indptr, g.indices, g.codes, ia, ib, np.uint64(ca & cb),
                                       np.uint64(0), stamp, seen, rdist, queue)
            if r > dist[ib]:
                plain = path_to_sequence(g, shortest_path(g, ia, ib))
                happy = path_to_sequence(g, restricted_path(g, ia, ib, must_have=ca & cb))
                return SlideGap(g.tree(ia), g.tree(ib), int(dist[ib]), int(r), plain, happy)
    return None


# -- remove / re-add -------------------------------------------------------------


def min_sequence_has_crossing_readd(g: ReconfigGraph, a: int, b: int, rng) -> bool:
    """Sample a shortest sequence and check that every edge removed and later
    re-added is crossed by some edge added in between."""
    seq = path_to_sequence(g, shortest_path(g, a, b, rng))
    return find_remove_add(seq) is None
