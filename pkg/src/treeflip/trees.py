"""Non-crossing spanning trees, flips and flip sequences.

A tree keeps both its edge set and a bitmask ``code`` over the point set's
``edge_list``; the bitmask form is what the fast paths and the exhaustive
oracle operate on.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

from .geometry import Edge, PointSet, edge


class TreeError(ValueError):
    pass


class InvalidTree(TreeError):
    pass


class FlipError(TreeError):
    """A flip that cannot be applied to the given tree."""


class NotInTree(FlipError):
    pass


class AlreadyPresent(FlipError):
    pass


class NotSpanning(FlipError):
    pass


class CrossingViolation(FlipError):
    pass


class MismatchedPointSets(TreeError):
    pass


class InvalidInputSequence(TreeError):
    pass


def _as_edge(e) -> Edge:
    return e if isinstance(e, Edge) else edge(*e)


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def edges_to_code(ps: PointSet, edges: Iterable) -> int:
    ids = ps.edge_id
    code = 0
    for e in edges:
        code |= 1 << ids[_as_edge(e)]
    return code


def code_to_edges(ps: PointSet, code: int) -> frozenset:
    el = ps.edge_list
    return frozenset(el[i] for i in bits(code))


def component_mask(ps: PointSet, code: int, start: int) -> int:
    """Vertex bitmask of the component of ``start`` in the graph ``code``."""
    el = ps.edge_list
    inc = ps.incident_masks
    seen = 1 << start
    stack = [start]
    while stack:
        v = stack.pop()
        for i in bits(code & inc[v]):
            a, b = el[i]
            w = b if a == v else a
            if not seen >> w & 1:
                seen |= 1 << w
                stack.append(w)
    return seen


def tree_problem(ps: PointSet, code: int) -> str | None:
    """Why ``code`` is not a non-crossing spanning tree of ``ps`` (None if it is)."""
    n = ps.n
    if code.bit_count() != n - 1:
        return f"has {code.bit_count()} edges, expected {n - 1}"
    if component_mask(ps, code, 0) != (1 << n) - 1:
        return "not connected"
    for i in bits(code):
        hit = ps.cross_mask(i) & code
        if hit:
            j = (hit & -hit).bit_length() - 1
            el = ps.edge_list
            return f"edges {tuple(el[i])} and {tuple(el[j])} cross"
    return None


def is_noncrossing_tree(edges, ps: PointSet) -> bool:
    try:
        es = {_as_edge(e) for e in edges}
    except ValueError:
        return False
    if any(not (0 <= e.a < ps.n and 0 <= e.b < ps.n) for e in es):
        return False
    return tree_problem(ps, edges_to_code(ps, es)) is None


class Tree:
    """A non-crossing spanning tree of a point set (validated on construction)."""

    __slots__ = ("ps", "edges", "code")

    def __init__(self, ps: PointSet, edges: Iterable, *, check: bool = True):
        es = frozenset(_as_edge(e) for e in edges)
        for e in es:
            if not (0 <= e.a < ps.n and 0 <= e.b < ps.n):
                raise InvalidTree(f"edge {tuple(e)} out of range for {ps.n} points")
        code = edges_to_code(ps, es)
        if check:
            problem = tree_problem(ps, code)
            if problem:
                raise InvalidTree(problem)
        object.__setattr__(self, "ps", ps)
        object.__setattr__(self, "edges", es)
        object.__setattr__(self, "code", code)

    def __setattr__(self, name, value):
        raise AttributeError("Tree is immutable")

    @classmethod
    def from_code(cls, ps: PointSet, code: int, check: bool = False) -> "Tree":
        return cls(ps, code_to_edges(ps, code), check=check)

    def rebind(self, ps: PointSet) -> "Tree":
        """The same edges over ``ps`` (which must hold the same points)."""
        if not ps.same_points(self.ps):
            raise MismatchedPointSets("rebind needs identical points")
        return Tree(ps, self.edges, check=False)

    def __contains__(self, e) -> bool:
        return _as_edge(e) in self.edges

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.sorted_edges())

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tree):
            return NotImplemented
        return self.code == other.code and self.ps.points == other.ps.points

    def __hash__(self) -> int:
        return hash((self.code, self.ps.points))

    def __repr__(self) -> str:
        return f"Tree({[tuple(e) for e in self.sorted_edges()]})"

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in range(self.ps.n)}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def degree(self, v: int) -> int:
        return sum(v in e for e in self.edges)

    def is_path(self) -> bool:
        return all(self.degree(v) <= 2 for v in range(self.ps.n))

    def path_order(self) -> list[int] | None:
        """Vertices along the path from its lower-indexed end, or None if not a path."""
        if not self.is_path():
            return None
        adj = self.adjacency()
        start = min(v for v in adj if len(adj[v]) <= 1)
        order, prev = [start], None
        while len(order) < self.ps.n:
            v = order[-1]
            nxt = [w for w in adj[v] if w != prev]
            prev = v
            order.append(nxt[0])
        return order


class Flip(NamedTuple):
    remove: Edge
    add: Edge

    @classmethod
    def of(cls, remove, add) -> "Flip":
        r, a = _as_edge(remove), _as_edge(add)
        if r == a:
            raise FlipError("a flip must change the edge")
        return cls(r, a)

    def reversed(self) -> "Flip":
        return Flip(self.add, self.remove)


def _flip_code(ps: PointSet, code: int, f: Flip) -> int:
    """Apply ``f`` to a bitmask tree, raising the precise FlipError."""
    ids = ps.edge_id
    try:
        r, a = ids[f.remove], ids[f.add]
    except KeyError as exc:
        raise FlipError(f"edge {exc.args[0]} is not an edge of this point set") from None
    if not code >> r & 1:
        raise NotInTree(f"{tuple(f.remove)} is not in the tree")
    if code >> a & 1:
        raise AlreadyPresent(f"{tuple(f.add)} is already in the tree")
    rest = code & ~(1 << r)
    side = component_mask(ps, rest, f.remove.a)
    if (side >> f.add.a & 1) == (side >> f.add.b & 1):
        raise NotSpanning(
            f"adding {tuple(f.add)} after removing {tuple(f.remove)} does not reconnect the tree"
        )
    hit = ps.cross_mask(a) & rest
    if hit:
        j = (hit & -hit).bit_length() - 1
        raise CrossingViolation(f"{tuple(f.add)} crosses {tuple(ps.edge_list[j])}")
    return rest | 1 << a


def apply_flip(t: Tree, f: Flip) -> Tree:
    f = Flip.of(*f)
    return Tree.from_code(t.ps, _flip_code(t.ps, t.code, f))


def flip_is_valid(t: Tree, f: Flip) -> bool:
    try:
        _flip_code(t.ps, t.code, Flip.of(*f))
    except FlipError:
        return False
    return True


def tree_path(t: Tree, u: int, v: int) -> list[Edge]:
    """Edges of the unique path from ``u`` to ``v`` in ``t``, in order."""
    adj = t.adjacency()
    parent = {u: None}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if x == v:
            break
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                queue.append(y)
    path = []
    x = v
    while parent[x] is not None:
        path.append(edge(parent[x], x))
        x = parent[x]
    path.reverse()
    return path


@dataclass(frozen=True)
class CyclePath:
    """The cycle of ``tree + probe``: the tree path from ``probe.a`` to
    ``probe.b`` followed by the probe itself."""

    probe: Edge
    edges: tuple[Edge, ...]
    vertices: tuple[int, ...]

    def __contains__(self, e) -> bool:
        return _as_edge(e) in self.edges

    def __len__(self) -> int:
        return len(self.edges)


def fundamental_cycle(t: Tree, probe) -> CyclePath:
    probe = _as_edge(probe)
    if probe in t.edges:
        raise AlreadyPresent(f"{tuple(probe)} is already in the tree")
    path = tree_path(t, probe.a, probe.b)
    verts = [probe.a]
    for e in path:
        verts.append(e.other(verts[-1]))
    return CyclePath(probe, tuple(path) + (probe,), tuple(verts))


@dataclass(frozen=True)
class DiffSummary:
    only_initial: frozenset
    only_final: frozenset
    happy: frozenset

    @property
    def d(self) -> int:
        return len(self.only_initial)

    @property
    def h(self) -> int:
        return len(self.happy)


def diff(ti: Tree, tf: Tree) -> DiffSummary:
    if not ti.ps.same_points(tf.ps):
        raise MismatchedPointSets("trees live on different point sets")
    return DiffSummary(ti.edges - tf.edges, tf.edges - ti.edges, ti.edges & tf.edges)


@dataclass(frozen=True)
class FlipSequence:
    start: Tree
    steps: tuple[Flip, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(Flip.of(*s) for s in self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def trees(self) -> list[Tree]:
        """All trees visited, start included (raises on an invalid step)."""
        out = [self.start]
        for f in self.steps:
            out.append(apply_flip(out[-1], f))
        return out

    @property
    def end(self) -> Tree:
        return self.trees()[-1]

    def then(self, other: "FlipSequence | Sequence[Flip]") -> "FlipSequence":
        steps = other.steps if isinstance(other, FlipSequence) else tuple(other)
        return FlipSequence(self.start, self.steps + tuple(steps))

    def reversed(self) -> "FlipSequence":
        """The sequence run backwards, starting from this sequence's end."""
        return FlipSequence(self.end, tuple(f.reversed() for f in reversed(self.steps)))


@dataclass
class ValidationReport:
    valid: bool
    length: int
    end: Tree | None
    reaches_target: bool
    invalid_at: int | None = None
    error: str | None = None
    perfect_flips: int = 0
    happy_removed: set = field(default_factory=set)
    parking_edges: set = field(default_factory=set)

    @property
    def ok(self) -> bool:
        return self.valid and self.reaches_target

    @property
    def is_perfect(self) -> bool:
        return self.ok and self.perfect_flips == self.length


def validate_sequence(seq: FlipSequence, target: Tree | None = None) -> ValidationReport:
    """Replay ``seq`` and collect every diagnostic the audits need.

    Perfect flips, happy edges and parking edges are measured relative to the
    start tree and ``target`` (the sequence's own end when no target is given).
    """
    ps = seq.start.ps
    if target is not None and not target.ps.same_points(ps):
        raise MismatchedPointSets("target lives on a different point set")
    code = seq.start.code
    ids = ps.edge_id
    error = None
    bad = None
    codes = [code]
    for i, f in enumerate(seq.steps):
        try:
            code = _flip_code(ps, code, f)
        except FlipError as exc:
            error, bad = str(exc), i
            break
        codes.append(code)
    valid = bad is None
    end = Tree.from_code(ps, code) if valid else None
    goal = target.code if target is not None else code
    start = seq.start.code
    only_i, only_f, happy = start & ~goal, goal & ~start, start & goal
    perfect = 0
    happy_removed, parking = set(), set()
    for f in seq.steps[: len(codes) - 1]:
        r, a = ids[f.remove], ids[f.add]
        if only_i >> r & 1 and only_f >> a & 1:
            perfect += 1
        if happy >> r & 1:
            happy_removed.add(f.remove)
        if not (start | goal) >> a & 1:
            parking.add(f.add)
    return ValidationReport(
        valid=valid,
        length=len(seq.steps),
        end=end,
        reaches_target=valid and code == goal,
        invalid_at=bad,
        error=error,
        perfect_flips=perfect,
        happy_removed=happy_removed,
        parking_edges=parking,
    )


# -- remove/add normalization --------------------------------------------


def find_remove_add(seq: FlipSequence) -> tuple[int, int] | None:
    """First (p, q) such that step p removes an edge e, step q - 1 adds it back,
    and no step from p to q - 1 adds an edge crossing e (step p itself counts).

    Returned as tree indices: ``trees[p]`` and ``trees[q]`` contain e, the
    trees strictly between do not.
    """
    ps = seq.start.ps
    ids = ps.edge_id
    steps = seq.steps
    for p, f in enumerate(steps):
        e = ids[f.remove]
        crossing = ps.cross_mask(e)
        for s in range(p, len(steps)):
            a = ids[steps[s].add]
            if a == e:
                return p, s + 1
            if crossing >> a & 1:
                break
    return None


def _shorten_once(seq: FlipSequence, p: int, q: int) -> FlipSequence:
    ps = seq.start.ps
    ids = ps.edge_id
    trees = seq.trees()
    e = seq.steps[p].remove
    e_id = ids[e]
    sub = trees[p : q + 1]  # T_0 .. T_k
    k = len(sub) - 1
    removed_at = [ids[seq.steps[p + i].remove] for i in range(k)]  # step T_i -> T_{i+1}
    new = [sub[0].code]
    for i in range(1, k):
        cycle = fundamental_cycle(sub[i], e)
        cyc_ids = {ids[c] for c in cycle.edges if c != e}
        f_i = next(r for r in removed_at[i:] if r in cyc_ids)
        new.append((sub[i].code | 1 << e_id) & ~(1 << f_i))
    if new[-1] != sub[k].code:
        raise InvalidInputSequence("normalization did not reach the re-adding tree")
    flips = []
    for x, y in zip(new, new[1:]):
        if x == y:
            continue
        (r,), (a,) = list(bits(x & ~y)), list(bits(y & ~x))
        flips.append(Flip(ps.edge_list[r], ps.edge_list[a]))
    return FlipSequence(seq.start, seq.steps[:p] + tuple(flips) + seq.steps[q:])


def normalize_sequence(seq: FlipSequence) -> FlipSequence:
    """Shorten every remove/add detour that never adds an edge crossing the
    detoured edge, until none is left. Endpoints are preserved."""
    if not validate_sequence(seq).valid:
        raise InvalidInputSequence("normalize_sequence needs a valid sequence")
    while True:
        hit = find_remove_add(seq)
        if hit is None:
            return seq
        shorter = _shorten_once(seq, *hit)
        if len(shorter) >= len(seq) or not validate_sequence(shorter).valid:
            raise InvalidInputSequence("normalization failed to shorten the sequence")
        seq = shorter
