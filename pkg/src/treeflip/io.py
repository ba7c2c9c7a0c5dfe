"""JSON instance and flip-sequence files.

Instance file::

    {"points": [[x, y], ...], "trees": {"initial": [[i, j], ...], ...}}

Sequence file: a list of ``{"remove": [i, j], "add": [i, j]}``. Indices are
0-based and edges are written with the smaller index first.
"""
from __future__ import annotations

import json
from pathlib import Path

from .geometry import GeometryError, Point, PointSet, edge, segments_cross
from .trees import Flip, FlipSequence, Tree, is_noncrossing_tree, tree_problem


class InputError(ValueError):
    """A file that does not describe a valid instance; the message names the field."""


def _edge(raw, where: str, n: int):
    if not (isinstance(raw, (list, tuple)) and len(raw) == 2 and all(isinstance(v, int) for v in raw)):
        raise InputError(f"{where}: expected an [i, j] pair of integers, got {raw!r}")
    i, j = raw
    if not (0 <= i < n and 0 <= j < n):
        raise InputError(f"{where}: index out of range 0..{n - 1}")
    if i == j:
        raise InputError(f"{where}: edge joins a point to itself")
    return edge(i, j)


def parse_points(raw) -> PointSet:
    if not isinstance(raw, list) or len(raw) < 2:
        raise InputError("points: expected a list of at least two [x, y] pairs")
    pts = []
    for k, p in enumerate(raw):
        if not (isinstance(p, (list, tuple)) and len(p) == 2 and all(isinstance(c, int) for c in p)):
            raise InputError(f"points[{k}]: expected an [x, y] pair of integers, got {p!r}")
        try:
            pts.append(Point(*p))
        except GeometryError as exc:
            raise InputError(f"points[{k}]: {exc}") from None
    try:
        return PointSet(tuple(pts))
    except GeometryError as exc:
        raise InputError(f"points: {exc}") from None


def parse_tree(ps: PointSet, raw, name: str) -> Tree:
    where = f"trees.{name}"
    if not isinstance(raw, list):
        raise InputError(f"{where}: expected a list of edges")
    edges = [_edge(e, f"{where}[{k}]", ps.n) for k, e in enumerate(raw)]
    if len(set(edges)) != len(edges):
        raise InputError(f"{where}: repeated edge")
    for x in range(len(edges)):
        for y in range(x + 1, len(edges)):
            if segments_cross(edges[x], edges[y], ps):
                raise InputError(
                    f"{where}: edges {list(edges[x])} and {list(edges[y])} cross"
                )
    if not is_noncrossing_tree(edges, ps):
        code = sum(1 << ps.edge_id[e] for e in edges)
        raise InputError(f"{where}: {tree_problem(ps, code) or 'not a spanning tree'}")
    return Tree(ps, edges)


def load_instance(path) -> tuple[PointSet, dict]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "points" not in doc:
        raise InputError("expected an object with a 'points' field")
    ps = parse_points(doc["points"])
    trees_raw = doc.get("trees", {})
    if not isinstance(trees_raw, dict):
        raise InputError("trees: expected an object mapping names to edge lists")
    trees = {name: parse_tree(ps, raw, name) for name, raw in trees_raw.items()}
    return ps, trees


def instance_doc(ps: PointSet, trees: dict) -> dict:
    return {
        "points": ps.coords(),
        "trees": {name: [list(e) for e in t.sorted_edges()] for name, t in trees.items()},
    }


def save_instance(path, ps: PointSet, trees: dict) -> None:
    Path(path).write_text(json.dumps(instance_doc(ps, trees), indent=1) + "\n")


def sequence_doc(seq: FlipSequence) -> list:
    return [{"remove": list(f.remove), "add": list(f.add)} for f in seq.steps]


def save_sequence(path, seq: FlipSequence) -> None:
    Path(path).write_text(json.dumps(sequence_doc(seq), indent=1) + "\n")


def load_sequence(path, start: Tree) -> FlipSequence:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, list):
        raise InputError("sequence: expected a list of flips")
    n = start.ps.n
    steps = []
    for k, f in enumerate(doc):
        if not isinstance(f, dict) or set(f) != {"remove", "add"}:
            raise InputError(f"sequence[{k}]: expected {{remove, add}}")
        r = _edge(f["remove"], f"sequence[{k}].remove", n)
        a = _edge(f["add"], f"sequence[{k}].add", n)
        if r == a:
            raise InputError(f"sequence[{k}]: remove and add are the same edge")
        steps.append(Flip(r, a))
    return FlipSequence(start, tuple(steps))
