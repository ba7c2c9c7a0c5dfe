"""Reconfiguration in convex position with at most 2d - floor(log2(d+3)) + 1 flips.

The work happens on integer bitmasks over ``ps.edge_list``. Flips on the
initial side are appended to a front list; flips on the final side go to a
back list that is reversed and inverted at the end.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import NotConvexError, PointSet, SidePair, sides_of
from .trees import Flip, FlipSequence, MismatchedPointSets, Tree, TreeError, bits, component_mask
from .two_phase import InvariantViolation


class EmptyDifference(TreeError):
    pass


@dataclass(frozen=True)
class MinimalEdgeReport:
    edge: object
    owner: str  # "initial" or "final"
    side: SidePair
    crossings: tuple
    k: int


@dataclass
class LevelStat:
    """One round of the algorithm: how much ``d`` dropped and at what cost."""

    k: int
    d_before: int
    d_after: int
    flips: int


@dataclass(frozen=True)
class _Tables:
    side_vertices: tuple  # per edge: (q vertex mask, q_bar vertex mask)
    side_edges: tuple  # per edge: (edges inside q, edges inside q_bar)
    endpoints: tuple
    rank: tuple
    hull_mask: int
    incident: tuple
    cross: tuple


def _tables(ps: PointSet) -> _Tables:
    # stored on the instance: hashing a PointSet per call is too slow here
    cached = ps.__dict__.get("_convex_tables")
    if cached is not None:
        return cached
    if not ps.convex:
        raise NotConvexError("convex_reconfigure needs convex position")
    inside_of = {}

    def inside(vmask):
        if vmask not in inside_of:
            inside_of[vmask] = sum(
                1 << i for i, (a, b) in enumerate(ps.edge_list) if vmask >> a & 1 and vmask >> b & 1
            )
        return inside_of[vmask]

    sv, se = [], []
    for e in ps.edge_list:
        sp = sides_of(e, ps)
        q = sum(1 << v for v in sp.q)
        qb = sum(1 << v for v in sp.q_bar)
        sv.append((q, qb))
        se.append((inside(q), inside(qb)))
    out = _Tables(tuple(sv), tuple(se), tuple(ps.edge_list), ps.rank, ps.hull_mask,
                  ps.incident_masks, ps.cross_masks)
    ps.__dict__["_convex_tables"] = out
    return out


def _low_key(t: _Tables, i: int):
    a, b = t.endpoints[i]
    ra, rb = t.rank[a], t.rank[b]
    return (min(ra, rb), max(ra, rb), i)


def _minimal(ps: PointSet, x: int, y: int):
    """Yield (edge id, owner is final, side index, k) for every minimal edge."""
    t = _tables(ps)
    side_edges, cross = t.side_edges, t.cross
    dmask = x ^ y
    m = dmask
    while m:
        low = m & -m
        i = low.bit_length() - 1
        m ^= low
        others = dmask ^ low
        in_final = bool(y & low)
        k = (cross[i] & (x if in_final else y)).bit_count()
        q, qb = side_edges[i]
        if q & others == 0:
            yield i, in_final, 0, k
        elif qb & others == 0:
            yield i, in_final, 1, k


def _report(ps: PointSet, x: int, y: int, i: int, in_final: bool, s: int, k: int) -> MinimalEdgeReport:
    e = ps.edge_list[i]
    sp = sides_of(e, ps)
    side = sp if s == 0 else SidePair(e, sp.q_bar, sp.q)
    other_tree = x if in_final else y
    cr = tuple(ps.edge_list[j] for j in bits(ps.cross_mask(i) & other_tree))
    return MinimalEdgeReport(e, "final" if in_final else "initial", side, cr, k)


def _codes(ti: Tree, tf: Tree):
    if not ti.ps.same_points(tf.ps):
        raise MismatchedPointSets("trees live on different point sets")
    if not ti.ps.convex:
        raise NotConvexError("minimal edges need convex position")
    return ti.ps, ti.code, tf.code


def minimal_edges(ti: Tree, tf: Tree) -> list[MinimalEdgeReport]:
    ps, x, y = _codes(ti, tf)
    if x == y:
        raise EmptyDifference("trees are equal")
    return [_report(ps, x, y, *m) for m in _minimal(ps, x, y)]


def find_minimal_edge(ti: Tree, tf: Tree) -> MinimalEdgeReport:
    """The minimal edge with fewest crossings, ties broken by edge order."""
    ps, x, y = _codes(ti, tf)
    if x == y:
        raise EmptyDifference("trees are equal")
    best = min(_minimal(ps, x, y), key=lambda m: (m[3], m[0]))
    return _report(ps, x, y, *best)


def _path_ids(t: _Tables, code: int, src: int, dst: int) -> list[int]:
    """Edge ids on the tree path between two vertices."""
    parent = {src: None}
    stack = [src]
    while stack:
        v = stack.pop()
        if v == dst:
            break
        for i in bits(t.incident[v] & code):
            a, b = t.endpoints[i]
            w = b if a == v else a
            if w not in parent:
                parent[w] = (v, i)
                stack.append(w)
    out = []
    v = dst
    while parent[v] is not None:
        v, i = parent[v]
        out.append(i)
    return out


def _check_two_components(ps, t, code, e_id, q_side):
    qmask = t.side_vertices[e_id][q_side]
    inner = code & t.side_edges[e_id][q_side]
    u, v = t.endpoints[e_id]
    cu = component_mask(ps, inner, u)
    cv = component_mask(ps, inner, v)
    if cu >> v & 1 or (cu | cv) != qmask:
        raise InvariantViolation(
            f"the minimal side of {tuple(t.endpoints[e_id])} does not split into two components"
        )


def _uv_disconnected(ps, t, code, e_id, q_side) -> bool:
    inner = code & t.side_edges[e_id][1 - q_side]
    u, v = t.endpoints[e_id]
    return not component_mask(ps, inner, u) >> v & 1


def check_uv_disconnected(tree: Tree, report: MinimalEdgeReport) -> bool:
    """The endpoints of the minimal edge are not joined inside its other side."""
    ps = tree.ps
    t = _tables(ps)
    e_id = ps.edge_id[report.edge]
    q_side = 0 if t.side_vertices[e_id][0] == sum(1 << v for v in report.side.q) else 1
    if not _uv_disconnected(ps, t, tree.code, e_id, q_side):
        raise InvariantViolation(
            f"{tuple(report.edge)} endpoints are connected on the far side by {sorted(tree.edges)}"
        )
    return True


def convex_reconfigure(ti: Tree, tf: Tree, *, check: bool = False,
                       levels: list | None = None) -> FlipSequence:
    """Flip ``ti`` into ``tf`` (convex position) using minimal edges and hull parking.

    ``levels`` collects one :class:`LevelStat` per round when given.
    """
    ps, x, y = _codes(ti, tf)
    t = _tables(ps)
    el = t.endpoints
    front: list = []
    back: list = []
    while x != y:
        d = (x & ~y).bit_count()
        e_id, in_final, s, k = min(_minimal(ps, x, y), key=lambda m: (m[3], m[0]))
        if check and k > (d + 3) // 2:
            raise InvariantViolation(f"minimal edge with {k} crossings exceeds the bound at d={d}")
        # a: the tree that must make room for e; b: the tree that owns e
        a, b = (x, y) if in_final else (y, x)
        a_out, b_out = (front, back) if in_final else (back, front)
        emask = 1 << e_id
        n_flips = 0
        if k == 0:
            u, v = el[e_id]
            cands = [i for i in _path_ids(t, a, u, v) if not b >> i & 1]
            r = min(cands, key=lambda i: _low_key(t, i))
            a = a & ~(1 << r) | emask
            a_out.append(Flip(el[r], el[e_id]))
            n_flips = 1
        else:
            qbar_v = t.side_vertices[e_id][1 - s]
            qbar_e = t.side_edges[e_id][1 - s]
            fs = list(bits(t.cross[e_id] & a))
            if check:
                _check_two_components(ps, t, a, e_id, s)
            for f in fs[:-1]:
                if check and not _uv_disconnected(ps, t, a, e_id, s):
                    raise InvariantViolation("minimal edge endpoints joined on the far side")
                rest = a & ~(1 << f)
                comp = component_mask(ps, rest, el[f][0])
                gs = [i for i in bits(t.hull_mask & qbar_e)
                      if (comp >> el[i][0] & 1) != (comp >> el[i][1] & 1)]
                if not gs:
                    raise InvariantViolation(f"no hull edge on the far side reconnects {tuple(el[f])}")
                g = gs[0]
                a = rest | 1 << g
                a_out.append(Flip(el[f], el[g]))
                n_flips += 1
                if not b >> g & 1:
                    cyc = _path_ids(t, b, *el[g])
                    hs = [i for i in cyc if i != e_id and not a >> i & 1 and qbar_e >> i & 1]
                    if not hs:
                        raise InvariantViolation(f"no edge to remove for parking {tuple(el[g])}")
                    h = min(hs, key=lambda i: _low_key(t, i))
                    b = b & ~(1 << h) | 1 << g
                    b_out.append(Flip(el[h], el[g]))
                    n_flips += 1
                if check:
                    _check_two_components(ps, t, a, e_id, s)
            if check and not _uv_disconnected(ps, t, a, e_id, s):
                raise InvariantViolation("minimal edge endpoints joined on the far side")
            a = a & ~(1 << fs[-1]) | emask
            a_out.append(Flip(el[fs[-1]], el[e_id]))
            n_flips += 1
        x, y = (a, b) if in_final else (b, a)
        d_after = (x & ~y).bit_count()
        if check and (d - d_after != max(k, 1) or n_flips > max(2 * k - 1, 1)):
            raise InvariantViolation(f"round with k={k} used {n_flips} flips for d {d}->{d_after}")
        if levels is not None:
            levels.append(LevelStat(k, d, d_after, n_flips))
    steps = tuple(front) + tuple(f.reversed() for f in reversed(back))
    return FlipSequence(ti, steps)


def flip_bound(d: int) -> int:
    """2d - floor(log2(d+3)) + 1, the guaranteed maximum length."""
    return 2 * d - ((d + 3).bit_length() - 1) + 1 if d else 0
