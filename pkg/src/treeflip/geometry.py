"""Exact planar predicates and point-set bookkeeping.

All coordinates are integers, so every predicate here is an exact sign
computation. Point indices are 0-based; the "height order" of a point set is
the order in which the algorithms treat points as lowest to highest.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from itertools import combinations
from typing import NamedTuple, Sequence

COORD_LIMIT = 10**6


class GeometryError(ValueError):
    """Raised for inputs that violate the point-set invariants."""


class NotConvexError(GeometryError):
    pass


class Orientation(IntEnum):
    CW = -1
    COLLINEAR = 0
    CCW = 1


@dataclass(frozen=True)
class Point:
    x: int
    y: int

    def __post_init__(self):
        for c in (self.x, self.y):
            if not isinstance(c, int) or isinstance(c, bool):
                raise GeometryError(f"coordinates must be integers, got {c!r}")
            if abs(c) > COORD_LIMIT:
                raise GeometryError(f"coordinate {c} outside +/-{COORD_LIMIT}")


class Edge(NamedTuple):
    """Undirected edge between two point indices, stored with ``a < b``."""

    a: int
    b: int

    def other(self, v: int) -> int:
        return self.b if v == self.a else self.a


def edge(u: int, v: int) -> Edge:
    """Canonical edge between ``u`` and ``v``."""
    if u == v:
        raise GeometryError(f"degenerate edge ({u}, {v})")
    return Edge(u, v) if u < v else Edge(v, u)


def orientation(p: Point, q: Point, r: Point) -> Orientation:
    det = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
    return Orientation((det > 0) - (det < 0))


def _on_segment(p: Point, q: Point, r: Point) -> bool:
    # r collinear with pq; is r inside the bounding box of pq?
    return min(p.x, q.x) <= r.x <= max(p.x, q.x) and min(p.y, q.y) <= r.y <= max(p.y, q.y)


def _closed_segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    o1 = orientation(p1, p2, q1)
    o2 = orientation(p1, p2, q2)
    o3 = orientation(q1, q2, p1)
    o4 = orientation(q1, q2, p2)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    if o1 == 0 and _on_segment(p1, p2, q1):
        return True
    if o2 == 0 and _on_segment(p1, p2, q2):
        return True
    if o3 == 0 and _on_segment(q1, q2, p1):
        return True
    if o4 == 0 and _on_segment(q1, q2, p2):
        return True
    return False


def segments_cross(e1: Edge, e2: Edge, ps: "PointSet") -> bool:
    """True iff the two edges intersect and share no endpoint."""
    if e1.a in e2 or e1.b in e2:
        return False
    pts = ps.points
    return _closed_segments_intersect(pts[e1.a], pts[e1.b], pts[e2.a], pts[e2.b])


def convex_cross(e1: Edge, e2: Edge, ps: "PointSet") -> bool:
    """Crossing test for convex position: endpoints strictly alternate on the hull."""
    if not ps.convex:
        raise NotConvexError("convex_cross needs a point set in convex position")
    if e1.a in e2 or e1.b in e2:
        return False
    pos = ps.hull_pos
    lo, hi = sorted((pos[e1.a], pos[e1.b]))
    inside = [lo < pos[v] < hi for v in e2]
    return inside[0] != inside[1]


class SidePair(NamedTuple):
    edge: Edge
    q: frozenset
    q_bar: frozenset


def sides_of(e: Edge, ps: "PointSet") -> SidePair:
    """The two hull arcs cut off by ``e``; both include the endpoints.

    ``q`` runs from ``e.a`` to ``e.b`` along ``hull_cycle``; ``q_bar`` is the rest.
    """
    if not ps.convex:
        raise NotConvexError("sides are only defined in convex position")
    cyc = ps.hull_cycle
    n = len(cyc)
    i, j = ps.hull_pos[e.a], ps.hull_pos[e.b]
    q = [cyc[(i + s) % n] for s in range((j - i) % n + 1)]
    q_bar = [cyc[(j + s) % n] for s in range((i - j) % n + 1)]
    return SidePair(e, frozenset(q), frozenset(q_bar))


def _convex_hull(points: Sequence[Point]) -> list[int]:
    """Indices of hull vertices in counterclockwise order (monotone chain)."""
    idx = sorted(range(len(points)), key=lambda i: (points[i].x, points[i].y))
    if len(idx) <= 2:
        return idx

    def build(order):
        chain: list[int] = []
        for i in order:
            while len(chain) >= 2 and orientation(
                points[chain[-2]], points[chain[-1]], points[i]
            ) <= 0:
                chain.pop()
            chain.append(i)
        return chain

    lower = build(idx)
    upper = build(reversed(idx))
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class PointSet:
    """Points in general position with a height order.

    ``direction`` is the vector treated as "up": points are ranked by their
    projection onto it, ties broken by the clockwise-perpendicular component.
    With the default ``(0, 1)`` this is the (y, x) lexicographic order.
    """

    points: tuple[Point, ...]
    direction: tuple[int, int] = (0, 1)
    height_order: tuple[int, ...] = field(init=False)
    rank: tuple[int, ...] = field(init=False)
    convex: bool = field(init=False)
    hull_cycle: tuple[int, ...] | None = field(init=False)

    def __post_init__(self):
        pts = tuple(p if isinstance(p, Point) else Point(*p) for p in self.points)
        object.__setattr__(self, "points", pts)
        dx, dy = self.direction
        if (dx, dy) == (0, 0):
            raise GeometryError("direction must be non-zero")
        object.__setattr__(self, "direction", (int(dx), int(dy)))
        n = len(pts)
        if n < 2:
            raise GeometryError("need at least two points")
        if len(set(pts)) != n:
            raise GeometryError("duplicate points")
        for i, j, k in combinations(range(n), 3):
            if orientation(pts[i], pts[j], pts[k]) == Orientation.COLLINEAR:
                raise GeometryError(f"points {i}, {j}, {k} are collinear")

        order = sorted(range(n), key=lambda i: (pts[i].x * dx + pts[i].y * dy,
                                                pts[i].x * dy - pts[i].y * dx))
        rank = [0] * n
        for r, i in enumerate(order):
            rank[i] = r
        object.__setattr__(self, "height_order", tuple(order))
        object.__setattr__(self, "rank", tuple(rank))

        hull = _convex_hull(pts)
        convex = len(hull) == n
        cycle = None
        if convex:
            s = hull.index(min(hull))
            cycle = tuple(hull[s:] + hull[:s])
        object.__setattr__(self, "convex", convex)
        object.__setattr__(self, "hull_cycle", cycle)

    @classmethod
    def from_coords(cls, coords, direction=(0, 1)) -> "PointSet":
        return cls(tuple(Point(int(x), int(y)) for x, y in coords), direction)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n(self) -> int:
        return len(self.points)

    def coords(self) -> list[list[int]]:
        return [[p.x, p.y] for p in self.points]

    # -- orders ---------------------------------------------------------

    def reordered(self, direction) -> "PointSet":
        return reorder_by_direction(self, direction)

    def mirrored(self) -> "PointSet":
        """Same points with the height order reversed."""
        dx, dy = self.direction
        return PointSet(self.points, (-dx, -dy))

    def same_points(self, other: "PointSet") -> bool:
        return self.points == other.points

    # -- edge indexing (shared by the bitmask code paths) ----------------

    @cached_property
    def edge_list(self) -> tuple[Edge, ...]:
        return tuple(Edge(a, b) for a, b in combinations(range(self.n), 2))

    @cached_property
    def edge_id(self) -> dict:
        return {e: i for i, e in enumerate(self.edge_list)}

    @cached_property
    def incident_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for i, (a, b) in enumerate(self.edge_list):
            masks[a] |= 1 << i
            masks[b] |= 1 << i
        return tuple(masks)

    @cached_property
    def _cross_cache(self) -> list:
        return [None] * len(self.edge_list)

    def cross_mask(self, i: int) -> int:
        """Bitmask of all edges crossing edge number ``i``."""
        cached = self._cross_cache[i]
        if cached is None:
            e = self.edge_list[i]
            cached = 0
            for j, f in enumerate(self.edge_list):
                if segments_cross(e, f, self):
                    cached |= 1 << j
            self._cross_cache[i] = cached
        return cached

    @cached_property
    def cross_masks(self) -> tuple[int, ...]:
        return tuple(self.cross_mask(i) for i in range(len(self.edge_list)))

    @cached_property
    def hull_pos(self) -> dict:
        if not self.convex:
            raise NotConvexError("point set is not in convex position")
        return {v: i for i, v in enumerate(self.hull_cycle)}

    @cached_property
    def hull_edges(self) -> frozenset:
        cyc = self.hull_cycle if self.convex else tuple(_convex_hull(self.points))
        return frozenset(edge(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc)))

    @cached_property
    def hull_mask(self) -> int:
        return sum(1 << self.edge_id[e] for e in self.hull_edges)

    def point_in_triangle(self, v: int, a: int, b: int, c: int) -> bool:
        """Is point ``v`` strictly inside triangle ``abc``?"""
        p = self.points
        o1 = orientation(p[a], p[b], p[v])
        o2 = orientation(p[b], p[c], p[v])
        o3 = orientation(p[c], p[a], p[v])
        return o1 == o2 == o3 != 0


def reorder_by_direction(ps: PointSet, direction) -> PointSet:
    """Same points, height order taken along ``direction``."""
    return PointSet(ps.points, tuple(direction))


def dot(u, v) -> int:
    return u[0] * v[0] + u[1] * v[1]


def cross(u, v) -> int:
    return u[0] * v[1] - u[1] * v[0]


def direction_cells(ps: PointSet) -> list[tuple[int, int]]:
    """One integer direction inside every cell of the arrangement of critical
    directions, i.e. one representative for each distinct strict height order.
    """
    crit = set()
    for p, q in combinations(ps.points, 2):
        w = (-(q.y - p.y), q.x - p.x)
        crit.add(_primitive(w))
        crit.add(_primitive((-w[0], -w[1])))
    rays = sorted(crit, key=_angle_key)
    out = []
    for i, r in enumerate(rays):
        s = rays[(i + 1) % len(rays)]
        if cross(r, s) > 0:
            out.append((r[0] + s[0], r[1] + s[1]))
    return out


def _primitive(v):
    from math import gcd

    g = gcd(abs(v[0]), abs(v[1])) or 1
    return (v[0] // g, v[1] // g)


class _AngleKey:
    __slots__ = ("v", "half")

    def __init__(self, v):
        self.v = v
        self.half = 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1

    def __lt__(self, other):
        if self.half != other.half:
            return self.half < other.half
        return cross(self.v, other.v) > 0


def _angle_key(v):
    return _AngleKey(v)
