"""Dense all-pairs path tables, used by the vectorised checkers.

A table stores, for every ordered pair ``(u, v)``, the vertex indices of the
selected path padded on the right with ``v``.  Padding by repeating the last
vertex leaves Hausdorff distances and side-point minimisations unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class PathTable:
    verts: np.ndarray  # (n, n, K) int32
    count: np.ndarray  # (n, n) number of vertices on each path

    @property
    def n(self) -> int:
        return self.verts.shape[0]

    def path(self, u: int, v: int) -> list[int]:
        return [int(x) for x in self.verts[u, v, : self.count[u, v]]]


def next_hop_table(next_hop: np.ndarray) -> PathTable:
    """Follow a next-hop matrix from every source to every target at once."""
    n = next_hop.shape[0]
    cur = np.repeat(np.arange(n, dtype=np.int32)[:, None], n, axis=1)
    tgt = np.repeat(np.arange(n, dtype=np.int32)[None, :], n, axis=0)
    cols = [cur]
    count = np.ones((n, n), dtype=np.int32)
    while True:
        nxt = next_hop[cur, tgt]
        moving = (cur != tgt) & (nxt != cur)  # unreachable targets stall
        if not moving.any():
            break
        cur = np.where(moving, nxt, cur).astype(np.int32)
        count += moving
        cols.append(cur)
    return PathTable(np.stack(cols, axis=2), count)


def hausdorff_rows(D: np.ndarray, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Hausdorff distance between the padded index rows of ``P`` and ``Q``."""
    M = D[P[:, :, None], Q[:, None, :]]
    return np.maximum(M.min(axis=2).max(axis=1), M.min(axis=1).max(axis=1))


def min_diameter_rows(D: np.ndarray, A: np.ndarray, B: np.ndarray, C: np.ndarray) -> np.ndarray:
    """For each row, min over (p, q, r) in A x B x C of the largest pairwise distance."""
    ab = D[A[:, :, None], B[:, None, :]]  # (T, Ka, Kb)
    bc = D[B[:, :, None], C[:, None, :]]  # (T, Kb, Kc)
    ac = D[A[:, :, None], C[:, None, :]]  # (T, Ka, Kc)
    m = np.maximum(ab[:, :, :, None], bc[:, None, :, :])
    m = np.maximum(m, ac[:, :, None, :])
    return m.reshape(m.shape[0], -1).min(axis=1)
