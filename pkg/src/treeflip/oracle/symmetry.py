"""Cyclic shifts and reflections of a convex point set acting on tree codes.

In convex position crossings depend only on the cyclic order of the hull, so
relabeling along the hull maps trees to trees and flips to flips.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import NotConvexError, PointSet, edge
from . import kernels


@dataclass(frozen=True)
class SymmetryGroup:
    ps: PointSet
    vertex_perms: tuple  # each a tuple mapping point index -> point index
    edge_perms: np.ndarray  # shape (group size, number of edges)

    @classmethod
    def dihedral(cls, ps: PointSet, mirror: bool = True) -> "SymmetryGroup":
        if not ps.convex:
            raise NotConvexError("symmetry reduction needs convex position")
        cyc = ps.hull_cycle
        pos = ps.hull_pos
        n = ps.n
        vperms = []
        for s in range(n):
            vperms.append(tuple(cyc[(pos[v] + s) % n] for v in range(n)))
            if mirror:
                vperms.append(tuple(cyc[(s - pos[v]) % n] for v in range(n)))
        eid = ps.edge_id
        eperms = np.array(
            [[eid[edge(p[a], p[b])] for a, b in ps.edge_list] for p in vperms], dtype=np.int64
        )
        return cls(ps, tuple(vperms), eperms)

    @property
    def order(self) -> int:
        return len(self.vertex_perms)

    def apply(self, k: int, codes: np.ndarray) -> np.ndarray:
        return kernels.apply_edge_perm(np.asarray(codes, dtype=np.uint64), self.edge_perms[k])

    def canonical(self, codes: np.ndarray) -> np.ndarray:
        """Smallest code in each orbit."""
        codes = np.asarray(codes, dtype=np.uint64)
        best = codes.copy()
        for k in range(self.order):
            np.minimum(best, self.apply(k, codes), out=best)
        return best

    def orbit_representatives(self, codes: np.ndarray):
        """(node ids of one tree per orbit, position of each node's orbit in that list).

        ``codes`` must be the sorted universe of a graph.
        """
        canon = self.canonical(codes)
        reps = np.flatnonzero(canon == codes)
        rep_codes = codes[reps]
        where = np.searchsorted(rep_codes, canon)
        return reps, where
