"""Two-phase reconfiguration: canonicalize to opposite trees, then perfect flips.

Heights come from ``tree.ps.rank``. To run an algorithm along another
direction, rebind the trees to ``reorder_by_direction(ps, d)``; the flips
produced are edge exchanges and stay valid on the original point set.
"""
from __future__ import annotations

from dataclasses import dataclass

from .geometry import Edge, Point, PointSet, edge, reorder_by_direction
from .trees import (
    Flip,
    FlipSequence,
    Tree,
    TreeError,
    apply_flip,
    component_mask,
    fundamental_cycle,
)


class PreconditionError(TreeError):
    pass


class NotAPath(PreconditionError):
    pass


class NotMonotonePath(PreconditionError):
    pass


class InvariantViolation(AssertionError):
    pass


@dataclass(frozen=True)
class OrientationProfile:
    sinks: frozenset
    sources: frozenset

    @property
    def s(self) -> int:
        return len(self.sources)

    @property
    def t(self) -> int:
        return len(self.sinks)

    @property
    def downward(self) -> bool:
        return self.t == 1

    @property
    def upward(self) -> bool:
        return self.s == 1


def orientation_profile(t: Tree) -> OrientationProfile:
    rank = t.ps.rank
    up = [False] * t.ps.n
    down = [False] * t.ps.n
    for a, b in t.edges:
        lo, hi = (a, b) if rank[a] < rank[b] else (b, a)
        up[lo] = True
        down[hi] = True
    n = t.ps.n
    return OrientationProfile(
        sinks=frozenset(v for v in range(n) if not up[v]),
        sources=frozenset(v for v in range(n) if not down[v]),
    )


def visible_above(t: Tree, i: int) -> int:
    """Lowest vertex above sink ``i`` that ``i`` sees past every tree edge."""
    ps = t.ps
    rank = ps.rank
    if rank[i] == ps.n - 1:
        raise PreconditionError(f"vertex {i} is the topmost vertex")
    if i not in orientation_profile(t).sinks:
        raise PreconditionError(f"vertex {i} is not a sink")
    for j in ps.height_order[rank[i] + 1 :]:
        if ps.cross_mask(ps.edge_id[edge(i, j)]) & t.code == 0:
            return j
    raise InvariantViolation(f"sink {i} sees no higher vertex")


def reduce_sink(t: Tree, i: int) -> Flip:
    """Flip that adds an upward edge at sink ``i`` without creating a new sink."""
    if orientation_profile(t).t < 2:
        raise PreconditionError("tree is already downward")
    rank = t.ps.rank
    j = visible_above(t, i)
    cycle = fundamental_cycle(t, edge(i, j))
    k = min(cycle.vertices, key=rank.__getitem__)
    at_k = [e for e in cycle.edges[:-1] if k in e]
    remove = max(at_k, key=lambda e: rank[e.other(k)])
    return Flip(remove, edge(i, j))


def to_downward(t: Tree) -> FlipSequence:
    """Exactly (sinks - 1) flips to a tree whose only sink is the top vertex."""
    rank = t.ps.rank
    top = t.ps.height_order[-1]
    cur = t
    steps = []
    while True:
        sinks = orientation_profile(cur).sinks
        if len(sinks) == 1:
            break
        i = min((v for v in sinks if v != top), key=rank.__getitem__)
        f = reduce_sink(cur, i)
        cur = apply_flip(cur, f)
        steps.append(f)
    return FlipSequence(t, tuple(steps))


def to_upward(t: Tree) -> FlipSequence:
    down = to_downward(t.rebind(t.ps.mirrored()))
    return FlipSequence(t, down.steps)


def choose_opposite(t1: Tree, t2: Tree):
    """Flip two trees into opposite trees with at most n - 2 flips in total.

    Returns ``(assignment, seq1, seq2)``, where assignment names the final
    shape of each tree, e.g. ``("upward", "downward")``.
    """
    p1, p2 = orientation_profile(t1), orientation_profile(t2)
    n = t1.ps.n
    if p1.s + p2.t <= n:
        return ("upward", "downward"), to_upward(t1), to_downward(t2)
    return ("downward", "upward"), to_downward(t1), to_upward(t2)


@dataclass(frozen=True)
class Phase2State:
    """Structure of the current tree just before vertex ``frontier`` is processed."""

    current: Tree
    frontier: int
    b_subtree: frozenset
    r_components: tuple
    connectors: tuple

    def check(self, happy: frozenset) -> None:
        ps = self.current.ps
        below = set(ps.height_order[: ps.rank[self.frontier]])
        if below:
            code = sum(1 << ps.edge_id[e] for e in self.b_subtree)
            comp = component_mask(ps, code, next(iter(below)))
            if any(not comp >> v & 1 for v in below):
                raise InvariantViolation("the added final-tree edges are not connected")
        for comp in self.r_components:
            hits = [e for e in self.connectors if e.a in comp or e.b in comp]
            if len(hits) != 1:
                raise InvariantViolation(
                    f"component {sorted(comp)} has {len(hits)} connector edges"
                )
        if len(self.r_components) > 1:
            unhappy = [e for e in self.connectors if e not in happy]
            if unhappy:
                raise InvariantViolation(
                    f"upper part is disconnected but connector {tuple(unhappy[0])} is unhappy"
                )


def down_edges(t_up: Tree) -> dict[int, Edge]:
    """For every vertex but the lowest, its unique edge to a lower vertex."""
    rank = t_up.ps.rank
    out = {}
    for a, b in t_up.edges:
        hi = a if rank[a] > rank[b] else b
        if hi in out:
            raise PreconditionError("target tree is not upward")
        out[hi] = edge(a, b)
    return out


def _phase2_state(cur: Tree, v: int, b_edges: list) -> Phase2State:
    ps = cur.ps
    rank = ps.rank
    upper = set(ps.height_order[rank[v] :])
    inner = [e for e in cur.edges if e.a in upper and e.b in upper]
    code = sum(1 << ps.edge_id[e] for e in inner)
    comps, left = [], set(upper)
    while left:
        x = left.pop()
        m = component_mask(ps, code, x)
        comp = frozenset(w for w in upper if m >> w & 1)
        left -= comp
        comps.append(comp)
    connectors = tuple(sorted(e for e in cur.edges if (e.a in upper) != (e.b in upper)))
    comps.sort(key=min)
    return Phase2State(cur, v, frozenset(b_edges), tuple(comps), connectors)


def phase2(t_down: Tree, t_up: Tree, *, check: bool = True, trace: list | None = None) -> FlipSequence:
    """Perfect flips from a downward tree to an upward tree.

    For each vertex from low to high, its down edge in ``t_up`` is added and
    the unhappy edge of the created cycle with the lowest bottom endpoint
    (then lowest top endpoint) is removed.
    """
    if not t_down.ps.same_points(t_up.ps) or t_down.ps.rank != t_up.ps.rank:
        raise PreconditionError("trees must share a point set and height order")
    if not orientation_profile(t_down).downward:
        raise PreconditionError("initial tree is not downward")
    if not orientation_profile(t_up).upward:
        raise PreconditionError("final tree is not upward")
    ps = t_down.ps
    rank = ps.rank
    happy = t_down.edges & t_up.edges
    unhappy = t_down.edges - t_up.edges
    bs = down_edges(t_up)
    cur = t_down
    steps = []
    added = []
    for v in ps.height_order[1:]:
        if check or trace is not None:
            state = _phase2_state(cur, v, added)
            if check:
                state.check(happy)
            if trace is not None:
                trace.append(state)
        b = bs[v]
        added.append(b)
        if b in cur.edges:
            continue
        cycle = fundamental_cycle(cur, b)
        cands = [e for e in cycle.edges[:-1] if e in unhappy]
        r = min(cands, key=lambda e: sorted((rank[e.a], rank[e.b])))
        f = Flip(r, b)
        cur = apply_flip(cur, f)
        steps.append(f)
    if cur != t_up:
        raise InvariantViolation("phase 2 did not reach the upward tree")
    return FlipSequence(t_down, tuple(steps))


def two_phase_reconfigure(ti: Tree, tf: Tree, *, check: bool = False) -> FlipSequence:
    """At most 2n - 3 flips between any two non-crossing spanning trees."""
    if ti == tf:
        return FlipSequence(ti)
    shape, s1, s2 = choose_opposite(ti, tf)
    a, b = s1.end, s2.end
    if shape[0] == "upward":
        mirror = ti.ps.mirrored()
        a, b = a.rebind(mirror), b.rebind(mirror)
    mid = phase2(a, b, check=check)
    return FlipSequence(ti, s1.steps + mid.steps + s2.reversed().steps)


def monotone_direction(path: Tree):
    """An integer direction along which ``path`` is strictly monotone, or None."""
    if path.ps.n < 3:
        raise PreconditionError("need at least three points")
    order = path.path_order()
    if order is None:
        raise NotAPath("tree is not a path")
    pts = path.ps.points
    steps = []
    for u, v in zip(order, order[1:]):
        steps.append((pts[v].x - pts[u].x, pts[v].y - pts[u].y))

    def cr(p, q):
        return p[0] * q[1] - p[1] * q[0]

    def dt(p, q):
        return p[0] * q[0] + p[1] * q[1]

    # the most clockwise step: every other step lies in [0, 180) ccw of it
    first = None
    for u in steps:
        if all(cr(u, v) > 0 or (cr(u, v) == 0 and dt(u, v) > 0) for v in steps):
            first = u
            break
    if first is None:
        return None
    last = first
    for v in steps:
        if cr(last, v) > 0:
            last = v
    if cr(first, last) == 0:
        d = first
    else:
        d = (-first[1] + last[1], first[0] - last[0])
    if all(dt(d, s) > 0 for s in steps):
        return d
    return None


def reconfigure_to_monotone_path(ti: Tree, tf: Tree, *, check: bool = False) -> FlipSequence:
    """At most 1.5n - 2 - h flips when ``tf`` is a path monotone in some direction."""
    d = monotone_direction(tf)
    if d is None:
        raise NotMonotonePath("target path is not monotone in any direction")
    ps = reorder_by_direction(ti.ps, d)
    prof = orientation_profile(ti.rebind(ps))
    if prof.s < prof.t:
        ps = ps.mirrored()
    a = ti.rebind(ps)
    s1 = to_downward(a)
    mid = phase2(s1.end, tf.rebind(ps), check=check)
    return FlipSequence(ti, s1.steps + mid.steps)


def convex_path_relabel(ps: PointSet, path: Tree) -> PointSet:
    """New coordinates for the same labels in which ``path`` is y-monotone and
    the cyclic hull order is unchanged, so crossings are unchanged too."""
    if not ps.convex:
        from .geometry import NotConvexError

        raise NotConvexError("relabeling needs convex position")
    order = path.path_order()
    if order is None:
        raise NotAPath("tree is not a path")
    n = ps.n
    pos = {v: i + 1 for i, v in enumerate(order)}
    cyc = ps.hull_cycle
    start = cyc.index(order[0])
    walk = [cyc[(start + s) % n] for s in range(n)]
    cut = walk.index(order[-1])
    right, left = walk[1:cut], walk[cut + 1 :][::-1]
    for chain in (right, left):
        if [pos[v] for v in chain] != sorted(pos[v] for v in chain):
            raise InvariantViolation("path does not visit a hull chain in order")
    coords = [None] * n
    for v in order:
        y = pos[v]
        bulge = y * (n + 1 - y)
        if v in (order[0], order[-1]):
            coords[v] = Point(0, y)
        elif v in right:
            coords[v] = Point(bulge, y)
        else:
            coords[v] = Point(-bulge, y)
    out = PointSet(tuple(coords))
    if not out.convex or out.hull_cycle != ps.hull_cycle:
        raise InvariantViolation("relabeled points lost the hull order")
    return out


def reconfigure_convex_path(ti: Tree, tf: Tree, *, check: bool = False) -> FlipSequence:
    """The 1.5n - 2 - h bound for an arbitrary path target in convex position."""
    relabeled = convex_path_relabel(ti.ps, tf)
    seq = reconfigure_to_monotone_path(Tree(relabeled, ti.edges), Tree(relabeled, tf.edges), check=check)
    return FlipSequence(ti, seq.steps)
