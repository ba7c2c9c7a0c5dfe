"""On-disk cache for reconfiguration graphs.

Layout: magic, version, n, rule tag, node count, arc count, point-set hash,
then zlib-compressed sections for the codes, the degrees and the adjacency
(each row sorted and stored as gaps).
"""
from __future__ import annotations

import hashlib
import struct
import zlib
from pathlib import Path

import numpy as np

from ..geometry import PointSet
from .graph import ReconfigGraph, build_graph

MAGIC = b"TFRG"
VERSION = 1
RULE_TAGS = {"exchange": 0, "slide": 1}
_HEADER = struct.Struct("<4sHHBQQ32s")


class CacheError(ValueError):
    pass


def point_set_hash(ps: PointSet) -> bytes:
    data = np.array([(p.x, p.y) for p in ps.points], dtype="<i8").tobytes()
    return hashlib.sha256(data).digest()


def cache_path(directory, ps: PointSet, rule: str) -> Path:
    return Path(directory) / f"n{ps.n}-{rule}-{point_set_hash(ps).hex()[:16]}.tfg"


def _row_ids(indptr):
    return np.repeat(np.arange(len(indptr) - 1), np.diff(indptr))


def _rows_to_gaps(indptr, indices):
    rows = _row_ids(indptr)
    srt = indices[np.lexsort((indices, rows))].astype(np.int64)
    gaps = np.diff(srt, prepend=0)
    starts = indptr[:-1][np.diff(indptr) > 0]
    gaps[starts] = srt[starts]
    return gaps


def _gaps_to_rows(indptr, gaps):
    total = np.cumsum(gaps)
    rows = _row_ids(indptr)
    # subtract the running total carried over from earlier rows
    before = np.concatenate(([0], total))[indptr[:-1]]
    return total - before[rows]


def _section(arr: np.ndarray) -> bytes:
    raw = zlib.compress(arr.tobytes(), 6)
    return struct.pack("<Q", len(raw)) + raw


def save_graph(g: ReconfigGraph, path) -> Path:
    path = Path(path)
    header = _HEADER.pack(MAGIC, VERSION, g.ps.n, RULE_TAGS[g.rule], g.num_nodes,
                          len(g.indices), point_set_hash(g.ps))
    deg = np.diff(g.indptr).astype("<u4")
    gaps = _rows_to_gaps(g.indptr, g.indices).astype("<u4")
    body = _section(g.codes.astype("<u8")) + _section(deg) + _section(gaps)
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(header + body)
    tmp.replace(path)
    return path


def load_graph(path, ps: PointSet) -> ReconfigGraph:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CacheError("truncated cache file")
    magic, version, n, tag, nodes, arcs, digest = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CacheError("not a graph cache file")
    if version != VERSION:
        raise CacheError(f"unsupported cache version {version}")
    if n != ps.n or digest != point_set_hash(ps):
        raise CacheError("cache belongs to a different point set")
    rule = {v: k for k, v in RULE_TAGS.items()}[tag]
    pos = _HEADER.size
    parts = []
    for dtype in ("<u8", "<u4", "<u4"):
        (size,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        parts.append(np.frombuffer(zlib.decompress(data[pos:pos + size]), dtype=dtype))
        pos += size
    codes, deg, gaps = parts
    if len(codes) != nodes or len(gaps) != arcs:
        raise CacheError("cache sections do not match the header")
    indptr = np.zeros(nodes + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    indices = _gaps_to_rows(indptr, gaps.astype(np.int64)).astype(np.int32)
    return ReconfigGraph(ps, codes.astype(np.uint64), indptr, indices, rule)


def cached_graph(ps: PointSet, rule: str = "exchange", directory=None, *, force: bool = False,
                 rebuild: bool = False) -> ReconfigGraph:
    """Load the graph from ``directory`` if present, otherwise build and store it."""
    if directory is None:
        return build_graph(ps, rule, force=force)
    path = cache_path(directory, ps, rule)
    if path.exists() and not rebuild:
        try:
            return load_graph(path, ps)
        except CacheError:
            pass
    g = build_graph(ps, rule, force=force)
    Path(directory).mkdir(parents=True, exist_ok=True)
    save_graph(g, path)
    return g
