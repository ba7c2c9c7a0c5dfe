"""All non-crossing spanning trees of a point set, as sorted uint64 edge bitmasks."""
from __future__ import annotations

import numpy as np

from ..geometry import PointSet

# bitmask codes are uint64, so at most 64 candidate edges (n <= 11)
MAX_BITSET_N = 11
CONVEX_LIMIT = 11
GENERAL_LIMIT = 9


class TooLarge(ValueError):
    pass


def _check_n(ps: PointSet, force: bool):
    n = ps.n
    if n > MAX_BITSET_N:
        raise TooLarge(f"n={n} does not fit the 64-bit tree codes (n <= {MAX_BITSET_N})")
    limit = CONVEX_LIMIT if ps.convex else GENERAL_LIMIT
    if n > limit and not force:
        raise TooLarge(f"n={n} exceeds the enumeration guard ({limit}); pass force=True")


def enumerate_trees(ps: PointSet, *, force: bool = False) -> np.ndarray:
    """Sorted uint64 codes of every non-crossing spanning tree on ``ps``."""
    _check_n(ps, force)
    if ps.convex:
        codes = _convex_codes(ps)
    else:
        codes = _general_codes(ps)
    return np.unique(codes)


def _convex_codes(ps: PointSet) -> np.ndarray:
    """Decomposition over hull intervals.

    ``span(i, j)``: trees on hull positions i..j. In such a tree let k be the
    farthest neighbour of i; then i..k and k..j are independent, and without
    the edge (i, k) the left part splits into trees on i..m and m+1..k.
    """
    n = ps.n
    cyc = ps.hull_cycle
    eid = ps.edge_id
    from ..geometry import edge

    def bit(i, k):
        return np.uint64(1 << eid[edge(cyc[i], cyc[k])])

    empty = np.zeros(1, dtype=np.uint64)
    span = {}
    split = {}

    def combine(x, y):
        return (x[:, None] | y[None, :]).ravel()

    def get_span(i, j):
        if i == j:
            return empty
        if (i, j) not in span:
            parts = [combine(get_split(i, k) | bit(i, k), get_span(k, j)) for k in range(i + 1, j + 1)]
            span[(i, j)] = np.concatenate(parts)
        return span[(i, j)]

    def get_split(i, k):
        if (i, k) not in split:
            parts = [combine(get_span(i, m), get_span(m + 1, k)) for m in range(i, k)]
            split[(i, k)] = np.concatenate(parts)
        return split[(i, k)]

    return get_span(0, n - 1)


def _general_codes(ps: PointSet) -> np.ndarray:
    """Include/exclude search over edges touching the growing component of vertex 0.

    An edge is excluded only if the remaining usable edges still connect all
    points, so every leaf of the search is a tree.
    """
    n = ps.n
    el = ps.edge_list
    inc = ps.incident_masks
    cross = ps.cross_masks
    all_v = (1 << n) - 1
    out = []

    def reach(usable, start_mask):
        seen = start_mask
        frontier = start_mask
        while frontier:
            v = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            m = usable & inc[v]
            while m:
                i = (m & -m).bit_length() - 1
                m &= m - 1
                a, b = el[i]
                w = b if a == v else a
                if not seen >> w & 1:
                    seen |= 1 << w
                    frontier |= 1 << w
        return seen

    def rec(code, comp, usable):
        if comp == all_v:
            out.append(code)
            return
        # an undecided edge leaving the component
        boundary = 0
        m = comp
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            boundary ^= inc[v]
        cand = boundary & usable & ~code
        if not cand:
            return
        i = (cand & -cand).bit_length() - 1
        a, b = el[i]
        w = b if comp >> a & 1 else a
        # take it
        rec(code | 1 << i, comp | 1 << w, usable & ~cross[i])
        # skip it, if the points can still be spanned
        rest = usable & ~(1 << i)
        if reach(rest, 1) == all_v:
            rec(code, comp, rest)

    rec(0, 1, (1 << len(el)) - 1)
    return np.array(out, dtype=np.uint64)
