"""Deterministic generators for named constructions and random test instances."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .geometry import GeometryError, Point, PointSet, direction_cells, edge, segments_cross
from .trees import Flip, FlipSequence, Tree, TreeError, apply_flip

KINDS = ("double_broom", "star", "monotone_path", "convex_random", "general_random", "regular_polygon")


class InstanceError(ValueError):
    pass


class BadParity(InstanceError):
    pass


class TooSmall(InstanceError):
    pass


class SeedExhausted(InstanceError):
    pass


@dataclass(frozen=True)
class InstanceSpec:
    kind: str
    n: int
    seed: int = 0

    def __post_init__(self):
        kind = self.kind.replace("-", "_")
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise InstanceError(f"unknown instance kind {self.kind!r}")
        if self.n < 3:
            raise TooSmall("need n >= 3")
        if kind == "double_broom" and self.n % 2:
            raise BadParity("double broom needs even n")

    def build(self) -> tuple[PointSet, dict]:
        """Point set plus named trees."""
        n, seed = self.n, self.seed
        if self.kind == "double_broom":
            ps, ti, tf = double_broom(n)
            return ps, {"initial": ti, "final": tf}
        if self.kind in ("star", "monotone_path", "regular_polygon"):
            ps = regular_polygon(n)
        elif self.kind == "convex_random":
            ps = convex_random(n, seed)
        else:
            ps = general_random(n, seed)
        rng = random.Random(seed)
        if self.kind == "star":
            return ps, {"initial": star(ps, ps.height_order[0]), "final": monotone_path(ps)}
        if self.kind == "monotone_path":
            return ps, {"initial": monotone_path(ps), "final": star(ps, ps.height_order[0])}
        return ps, {"initial": random_tree(ps, rng), "final": random_tree(ps, rng)}


# -- point sets ------------------------------------------------------------


def regular_polygon(n: int, radius: int = 100_000) -> PointSet:
    if n < 3:
        raise TooSmall("need n >= 3")
    pts = []
    for k in range(n):
        a = 2 * math.pi * k / n + 0.1
        pts.append(Point(round(radius * math.cos(a)), round(radius * math.sin(a))))
    ps = PointSet(tuple(pts))
    if not ps.convex:
        raise GeometryError("rounding broke convexity")
    return ps


def convex_random(n: int, seed: int, radius: int = 100_000, attempts: int = 100) -> PointSet:
    """``n`` points at random angles on a circle, rounded to integers."""
    rng = random.Random(seed)
    grid = 3600
    for _ in range(attempts):
        ticks = sorted(rng.sample(range(grid), n))
        pts = tuple(
            Point(round(radius * math.cos(2 * math.pi * t / grid)),
                  round(radius * math.sin(2 * math.pi * t / grid)))
            for t in ticks
        )
        try:
            ps = PointSet(pts)
        except GeometryError:
            continue
        if ps.convex:
            return ps
    raise SeedExhausted(f"no convex sample for n={n}, seed={seed}")


def general_random(n: int, seed: int, box: int = 1000, attempts: int = 1000) -> PointSet:
    """Random grid points; samples with a collinear triple are redrawn."""
    rng = random.Random(seed)
    for _ in range(attempts):
        pts = tuple(Point(rng.randint(0, box), rng.randint(0, box)) for _ in range(n))
        try:
            return PointSet(pts)
        except GeometryError:
            continue
    raise SeedExhausted(f"no general-position sample for n={n}, seed={seed}")


# -- trees -----------------------------------------------------------------


def star(ps: PointSet, center: int = 0) -> Tree:
    return Tree(ps, [edge(center, v) for v in range(ps.n) if v != center])


def monotone_path(ps: PointSet) -> Tree:
    """The path through the points in height order."""
    o = ps.height_order
    return Tree(ps, [edge(o[k], o[k + 1]) for k in range(ps.n - 1)])


def random_tree(ps: PointSet, rng: random.Random) -> Tree:
    """Maximal plane forest grown from a random edge order (always spanning)."""
    ids = list(range(len(ps.edge_list)))
    rng.shuffle(ids)
    parent = list(range(ps.n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    code = 0
    count = 0
    for i in ids:
        a, b = ps.edge_list[i]
        ra, rb = find(a), find(b)
        if ra == rb or ps.cross_mask(i) & code:
            continue
        parent[ra] = rb
        code |= 1 << i
        count += 1
        if count == ps.n - 1:
            break
    return Tree.from_code(ps, code, check=True)


def random_monotone_path(ps: PointSet, rng: random.Random) -> Tree:
    """Path in the height order of a random direction (always non-crossing)."""
    d = rng.choice(direction_cells(ps))
    return monotone_path(PointSet(ps.points, d)).rebind(ps)


def random_convex_path(ps: PointSet, rng: random.Random) -> Tree:
    """Random non-crossing spanning path on a convex set: grow a hull interval."""
    cyc = ps.hull_cycle
    n = ps.n
    lo = hi = rng.randrange(n)
    cur = cyc[lo]
    edges = []
    for _ in range(n - 1):
        if rng.random() < 0.5:
            lo -= 1
            nxt = cyc[lo % n]
        else:
            hi += 1
            nxt = cyc[hi % n]
        edges.append(edge(cur, nxt))
        cur = nxt
    return Tree(ps, edges)


# -- double broom ------------------------------------------------------------


def _v(k: int) -> int:
    return k - 1


def double_broom(n: int) -> tuple[PointSet, Tree, Tree]:
    """Two hubs ``v_1``, ``v_n`` with alternating leaves, against the monotone path.

    Point ``v_k`` (index k-1) sits at height k-1; odd k on the left of the
    chord ``v_1 v_n``, even k on the right. The polygon is widest between
    ``v_4`` and ``v_5``, which lets the witness tilt ``v_4`` above ``v_5``.
    """
    if n % 2:
        raise BadParity("double broom needs even n")
    if n < 4:
        raise TooSmall("double broom needs n >= 4")
    top = max((2 * n - 9) ** 2, 49) + 8
    pts = []
    for k in range(1, n + 1):
        x = 0 if k in (1, n) else top - (2 * k - 9) ** 2
        pts.append(Point(-x if k % 2 else x, k - 1))
    ps = PointSet(tuple(pts))
    edges = [edge(_v(1), _v(n))]
    edges += [edge(_v(1), _v(k)) for k in range(3, n, 2)]
    edges += [edge(_v(n), _v(k)) for k in range(2, n, 2)]
    ti = Tree(ps, edges)
    tf = monotone_path(ps)
    return ps, ti, tf


def double_broom_witness(n: int) -> FlipSequence:
    """The short flip sequence for the double broom.

    Length is 1.5n - 5 for n >= 8. For n = 6 the same steps (the odd-index
    loop is empty) give 5 flips, which equals d and is optimal.
    """
    from .two_phase import orientation_profile, phase2

    ps, ti, tf = double_broom(n)
    if n < 6:
        raise TooSmall("the witness needs n >= 6")
    v = _v
    steps = [Flip(edge(v(2), v(n)), edge(v(1), v(2)))]
    for i in range(n - 1, 6, -2):
        steps.append(Flip(edge(v(1), v(i)), edge(v(n), v(i))))
    steps.append(Flip(edge(v(1), v(n)), edge(v(4), v(5))))
    cur = ti
    for f in steps:
        cur = apply_flip(cur, f)
    # v4v5 separates {v1..v5} from {v4..vn}; each side is solved on its own
    for part in (range(1, 6), range(4, n + 1)):
        idx = [v(k) for k in part]
        sub = PointSet(tuple(ps.points[i] for i in idx))
        local = {g: l for l, g in enumerate(idx)}

        def restrict(t):
            return Tree(sub, [edge(local[a], local[b]) for a, b in t.edges if a in local and b in local])

        a, b = restrict(cur), restrict(tf)
        for d in direction_cells(sub):
            sd = PointSet(sub.points, d)
            if not orientation_profile(a.rebind(sd)).downward:
                sd = sd.mirrored()
            if orientation_profile(a.rebind(sd)).downward and orientation_profile(b.rebind(sd)).upward:
                break
        else:
            raise TreeError("no direction makes the two halves opposite")
        for f in phase2(a.rebind(sd), b.rebind(sd)):
            steps.append(Flip(edge(idx[f.remove.a], idx[f.remove.b]), edge(idx[f.add.a], idx[f.add.b])))
    return FlipSequence(ti, tuple(steps))


def crossing_count(e, t: Tree) -> int:
    return sum(segments_cross(e, f, t.ps) for f in t.edges)
