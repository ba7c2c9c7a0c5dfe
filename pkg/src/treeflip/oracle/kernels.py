"""numba kernels for the reconfiguration graph.

Trees are uint64 edge bitmasks. ``BIT[i]`` is used instead of shifts so that
numba keeps every mask in unsigned 64-bit arithmetic.
"""
from __future__ import annotations

import numpy as np
from numba import config, njit, prange

# the bundled TBB is too old for numba and only produces a warning; skip it
config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

BIT = np.array([1 << i for i in range(64)], dtype=np.uint64)
ZERO = np.uint64(0)

RULE_EXCHANGE = 0
RULE_SLIDE = 1


@njit(cache=True)
def _component(rest, start, n, m, ea, eb, inc, bit):
    """Vertex mask of the component of ``start`` in the edge set ``rest``."""
    seen = np.int64(1) << start
    stack = np.empty(n, dtype=np.int64)
    top = 0
    stack[top] = start
    top += 1
    while top > 0:
        top -= 1
        v = stack[top]
        here = rest & inc[v]
        if here == 0:
            continue
        for i in range(m):
            if here & bit[i]:
                w = eb[i] if ea[i] == v else ea[i]
                if not (seen >> w) & 1:
                    seen |= np.int64(1) << w
                    stack[top] = w
                    top += 1
    return seen


@njit(cache=True)
def _neighbours(code, n, m, ea, eb, inc, cross, bit, rule, eid, empty_tri, out):
    """Write every tree one flip away from ``code`` into ``out``; return count."""
    cnt = 0
    for r in range(m):
        if not code & bit[r]:
            continue
        rest = code & ~bit[r]
        comp = _component(rest, ea[r], n, m, ea, eb, inc, bit)
        cut = ZERO
        for v in range(n):
            if (comp >> v) & 1:
                cut ^= inc[v]
        cand = cut & ~code
        if cand == 0:
            continue
        for f in range(m):
            if not cand & bit[f]:
                continue
            if cross[f] & rest:
                continue
            if rule == RULE_SLIDE:
                # f and r share an endpoint s; the third side t-w must be a tree edge
                if ea[f] == ea[r] or ea[f] == eb[r]:
                    s = ea[f]
                    w = eb[f]
                elif eb[f] == ea[r] or eb[f] == eb[r]:
                    s = eb[f]
                    w = ea[f]
                else:
                    continue
                t = eb[r] if ea[r] == s else ea[r]
                third = eid[t, w]
                if not rest & bit[third]:
                    continue
                if not empty_tri[s, t, w]:
                    continue
            if out.shape[0] > 0:
                out[cnt] = rest | bit[f]
            cnt += 1
    return cnt


@njit(cache=True)
def count_neighbours(codes, n, m, ea, eb, inc, cross, rule, eid, empty_tri):
    bit = BIT
    deg = np.zeros(codes.shape[0], dtype=np.int64)
    dummy = np.empty(0, dtype=np.uint64)
    for k in range(codes.shape[0]):
        deg[k] = _neighbours(codes[k], n, m, ea, eb, inc, cross, bit, rule, eid, empty_tri, dummy)
    return deg


@njit(cache=True)
def fill_neighbours(codes, indptr, n, m, ea, eb, inc, cross, rule, eid, empty_tri):
    bit = BIT
    out = np.empty(indptr[-1], dtype=np.uint64)
    for k in range(codes.shape[0]):
        _neighbours(codes[k], n, m, ea, eb, inc, cross, bit, rule, eid, empty_tri,
                    out[indptr[k]:indptr[k + 1]])
    return out


@njit(cache=True)
def bfs_from(indptr, indices, src, dist, queue):
    """Plain BFS; ``dist`` is filled with -1 for unreached nodes. Returns max distance."""
    dist[:] = -1
    dist[src] = 0
    head = 0
    tail = 0
    queue[tail] = src
    tail += 1
    far = 0
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v] + 1
        for p in range(indptr[v], indptr[v + 1]):
            w = indices[p]
            if dist[w] < 0:
                dist[w] = dv
                far = dv
                queue[tail] = w
                tail += 1
    return far


@njit(parallel=True, cache=True)
def eccentricities(indptr, indices, sources, is_path):
    """Per source: eccentricity, farthest path node, and number of nodes reached."""
    k = sources.shape[0]
    nn = indptr.shape[0] - 1
    ecc = np.zeros(k, dtype=np.int64)
    path_ecc = np.zeros(k, dtype=np.int64)
    reached = np.zeros(k, dtype=np.int64)
    for j in prange(k):
        dist = np.empty(nn, dtype=np.int32)
        queue = np.empty(nn, dtype=np.int64)
        ecc[j] = bfs_from(indptr, indices, sources[j], dist, queue)
        best = 0
        cnt = 0
        for v in range(nn):
            if dist[v] >= 0:
                cnt += 1
                if is_path[v] and dist[v] > best:
                    best = dist[v]
        path_ecc[j] = best
        reached[j] = cnt
    return ecc, path_ecc, reached


@njit(cache=True)
def restricted_bfs(indptr, indices, codes, src, dst, must_have, must_avoid,
                   stamp, seen, dist, queue):
    """Distance from src to dst through trees containing ``must_have`` and
    disjoint from ``must_avoid``; -1 if unreachable. ``seen`` holds stamps so
    it never needs clearing between calls."""
    if (codes[src] & must_have) != must_have or codes[src] & must_avoid:
        return -1
    seen[src] = stamp
    dist[src] = 0
    if src == dst:
        return 0
    head = 0
    tail = 0
    queue[tail] = src
    tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        for p in range(indptr[v], indptr[v + 1]):
            w = indices[p]
            if seen[w] == stamp:
                continue
            c = codes[w]
            if (c & must_have) != must_have or c & must_avoid:
                continue
            seen[w] = stamp
            dist[w] = dist[v] + 1
            if w == dst:
                return dist[w]
            queue[tail] = w
            tail += 1
    return -1


@njit(cache=True)
def restricted_sweep(indptr, indices, codes, sources, hull, mode, only_initial_size):
    """For each source a and every target b whose distance exceeds |a \\ b|,
    compare the plain distance with the restricted one.

    mode 0: keep every edge of a & b (happy edges).
    mode 1: use only edges of a | b | hull (hull parking).
    Returns (pairs checked, pairs needing a restricted search, failures,
    first failing source, first failing target).
    """
    nn = codes.shape[0]
    dist = np.empty(nn, dtype=np.int32)
    rdist = np.empty(nn, dtype=np.int32)
    queue = np.empty(nn, dtype=np.int64)
    seen = np.zeros(nn, dtype=np.int64)
    stamp = 0
    checked = 0
    searched = 0
    failures = 0
    bad_a = -1
    bad_b = -1
    for j in range(sources.shape[0]):
        a = sources[j]
        bfs_from(indptr, indices, a, dist, queue)
        ca = codes[a]
        for b in range(nn):
            checked += 1
            cb = codes[b]
            d = _popcount(ca & ~cb)
            if dist[b] == d:
                continue
            searched += 1
            stamp += 1
            if mode == 0:
                r = restricted_bfs(indptr, indices, codes, a, b, ca & cb, ZERO,
                                   stamp, seen, rdist, queue)
            else:
                r = restricted_bfs(indptr, indices, codes, a, b, ZERO, ~(ca | cb | hull),
                                   stamp, seen, rdist, queue)
            if r != dist[b]:
                failures += 1
                if bad_a < 0:
                    bad_a = a
                    bad_b = b
    return checked, searched, failures, bad_a, bad_b


@njit(cache=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - np.uint64(1)
        c += 1
    return c


@njit(cache=True)
def apply_edge_perm(codes, perm):
    out = np.zeros_like(codes)
    m = perm.shape[0]
    for k in range(codes.shape[0]):
        c = codes[k]
        r = ZERO
        for i in range(m):
            if c & BIT[i]:
                r |= BIT[perm[i]]
        out[k] = r
    return out


@njit(cache=True)
def max_degree_at_most_two(codes, n, inc):
    out = np.zeros(codes.shape[0], dtype=np.bool_)
    for k in range(codes.shape[0]):
        ok = True
        for v in range(n):
            if _popcount(codes[k] & inc[v]) > 2:
                ok = False
                break
        out[k] = ok
    return out
