"""Combinatorial and metric horoballs over a lattice.

Vertices of the combinatorial horoball are pairs ``(x, l)`` with ``x`` a
lattice point and ``0 <= l <= depth_max``; they are named ``"x@l"``.
Vertical edges join ``(x, l)`` and ``(x, l + 1)``; at level ``l >= 1`` a
horizontal edge joins ``(x, l)`` and ``(y, l)`` whenever
``0 < d(x, y) <= 2**l``.  Every horoball edge has length one.

The metric (glued) horoball identifies ``(x, 0)`` with the lattice vertex
``x`` of the base space, so level 0 *is* the base graph and keeps the base
vertex names.

Vertex order is level-major: level 0 (the base space when glued), then
level 1 in lattice order, and so on.  This order drives every
lexicographic tie-break.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import GeometryError
from .metric import Path, Space
from .paths import PathTable, hausdorff_rows, min_diameter_rows, next_hop_table

__all__ = [
    "HoroballGraph",
    "NormalGeodesic",
    "build_horoball",
    "lattice_space",
    "normal_geodesic",
    "normal_table",
    "hausdorff_deviation",
    "min_diameter_triangles",
    "segments",
]

_INF = np.iinfo(np.int64).max // 8


def lattice_space(points: Sequence, dist, name: str = "lattice") -> Space:
    """A bare lattice metric packaged as a ``Space``.

    ``dist`` is a symmetric matrix (or callable) of pairwise distances that
    must satisfy the triangle inequality; the result is the complete graph
    whose edge lengths are those distances, so its graph metric is ``dist``.
    """
    points = list(points)
    get = dist if callable(dist) else (lambda i, j: dist[i][j])
    edges = [
        (points[i], points[j], get(i, j))
        for i, j in itertools.combinations(range(len(points)), 2)
    ]
    return Space(points, edges, points, points[0], name=name)


class HoroballGraph:
    """Depth-stratified horoball graph over the lattice of ``base``."""

    def __init__(self, base: Space, depth_max: int, glued: bool = False):
        if int(depth_max) != depth_max or depth_max < 1:
            raise GeometryError("DEPTH_TOO_SMALL", f"depth_max must be an integer >= 1, got {depth_max!r}")
        self.base = base
        self.depth_max = D = int(depth_max)
        self.glued = bool(glued)
        self.lattice = base.lattice
        m = self.m = len(base.lattice)
        s = base.scale
        lat_rows = base.dist_rows(base.lattice_idx)
        self._foot_rows = lat_rows  # (m, n_base) scaled base distances
        self.lattice_dist = lat_rows[:, base.lattice_idx]  # scaled, (m, m)

        nb = base.n if glued else 0
        self._offset = nb
        if glued:
            ids = list(base.vertices)
            depth = [0] * nb
            pos = {v: i for i, v in enumerate(base.lattice)}
            column = [pos.get(v, -1) for v in base.vertices]
            first_level = 1
        else:
            ids, depth, column = [], [], []
            first_level = 0
        for l in range(first_level, D + 1):
            for i, x in enumerate(base.lattice):
                ids.append(f"{x}@{l}")
                depth.append(l)
                column.append(i)
        self.depth = np.array(depth, dtype=np.int64)
        self.column = np.array(column, dtype=np.int64)

        vid = np.empty((m, D + 1), dtype=np.int64)
        for l in range(D + 1):
            for i in range(m):
                if glued and l == 0:
                    vid[i, l] = base.lattice_idx[i]
                else:
                    vid[i, l] = nb + (l - first_level) * m + i
        self.vid = vid

        one = 1
        self.vertical_edges = [
            (ids[vid[i, l]], ids[vid[i, l + 1]]) for l in range(D) for i in range(m)
        ]
        self.horizontal_edges: dict[int, list[tuple]] = {}
        self._level_adj = []
        for l in range(D + 1):
            if l == 0:
                adj = np.zeros((m, m), dtype=bool)
            else:
                adj = (self.lattice_dist > 0) & (self.lattice_dist <= (2**l) * s)
            self._level_adj.append(adj)
            self.horizontal_edges[l] = [
                (ids[vid[i, l]], ids[vid[j, l]]) for i, j in zip(*np.nonzero(np.triu(adj)))
            ]
        edges = [(u, v, one) for u, v in self.vertical_edges]
        for l in range(1, D + 1):
            edges += [(u, v, one) for u, v in self.horizontal_edges[l]]
        if glued:
            edges += base.edges
            lattice = list(base.lattice) + ids[nb:]
            bp = base.basepoint
        else:
            lattice = ids
            bp = ids[vid[_nearest_lattice(base), 0]]
        self.space = Space(ids, edges, lattice, bp, name=f"H({base.name})", validate=False)
        ncomp, _ = connected_components(self.space.adjacency, directed=False)
        if ncomp != 1:
            raise GeometryError(
                "DISCONNECTED",
                f"horoball over {base.name} is disconnected at depth_max={D}; "
                f"depth {self.sufficient_depth} is enough",
            )
        self._levels()

    # -- per-level horizontal geometry -----------------------------------------

    def _levels(self) -> None:
        D, m = self.depth_max, self.m
        H = np.full((D + 1, m, m), _INF, dtype=np.int64)
        NH = np.empty((D + 1, m, m), dtype=np.int32)
        for l in range(D + 1):
            adj = self._level_adj[l]
            if adj.any():
                d = shortest_path(csr_matrix(adj.astype(float)), unweighted=True, directed=False)
                fin = np.isfinite(d)
                H[l][fin] = d[fin].astype(np.int64)
            else:
                np.fill_diagonal(H[l], 0)
            for a in range(m):
                nb = np.nonzero(adj[a])[0]
                NH[l, a] = a
                if len(nb):
                    ok = H[l][nb] == H[l][a][None, :] - 1
                    has = ok.any(axis=0) & (H[l][a] < _INF) & (H[l][a] > 0)
                    NH[l, a, has] = nb[np.argmax(ok, axis=0)][has]
        self.level_dist = H
        self.level_next = NH
        self._level_tables: dict[int, PathTable] = {}

    def level_table(self, l: int) -> PathTable:
        if l not in self._level_tables:
            self._level_tables[l] = next_hop_table(self.level_next[l])
        return self._level_tables[l]

    @property
    def sufficient_depth(self) -> int:
        """``ceil(log2 diam) + 3``: enough depth for exact distances between shallow points."""
        diam = Fraction(int(self.lattice_dist.max()), self.base.scale)
        return max(1, math.ceil(math.log2(diam))) + 3 if diam > 1 else 3

    # -- naming ---------------------------------------------------------------

    def vertex(self, x, level: int | None = None) -> int:
        """Index of a vertex given by name, by ``(lattice_id, level)`` or ``(id, None)``."""
        if level is None and isinstance(x, tuple) and len(x) == 2:
            x, level = x
        if level is None:
            return self.space.idx(x)
        try:
            i = self.lattice.index(x)
        except ValueError:
            raise GeometryError("UNKNOWN_VERTEX", f"{x!r} is not a lattice point")
        if not 0 <= level <= self.depth_max:
            raise GeometryError("UNKNOWN_VERTEX", f"level {level} outside 0..{self.depth_max}")
        return int(self.vid[i, level])

    def name(self, i: int):
        return self.space.vertices[i]

    def __repr__(self) -> str:
        kind = "metric" if self.glued else "combinatorial"
        return f"HoroballGraph({kind}, lattice={self.m}, depth_max={self.depth_max}, n={self.space.n})"


def _nearest_lattice(base: Space) -> int:
    row = base.dist_rows([base.idx(base.basepoint)])[0][base.lattice_idx]
    return int(np.argmin(row))


def build_horoball(base: Space, depth_max: int, glued: bool = False) -> HoroballGraph:
    return HoroballGraph(base, depth_max, glued)


@dataclass(frozen=True)
class NormalGeodesic:
    """Vertical, then horizontal at one level, then vertical.

    ``lead`` and ``tail`` are base-space legs; they are empty except in a
    glued horoball when an endpoint is not a lattice vertex (or the best
    route first drops to the base).  Each field holds vertex ids including
    both of its endpoints; empty tuples mean the segment is absent.
    """

    lead: tuple
    up: tuple
    across: tuple
    down: tuple
    tail: tuple
    level: int
    length: Fraction

    @property
    def vertices(self) -> tuple:
        out: list = []
        for seg in (self.lead, self.up, self.across, self.down, self.tail):
            for v in seg:
                if not out or out[-1] != v:
                    out.append(v)
        return tuple(out)

    @property
    def path(self) -> Path:
        return Path(self.vertices, self.length)

    @property
    def horizontal_edges(self) -> int:
        return max(len(self.across) - 1, 0)


def _approach(h: HoroballGraph, w: int):
    """Cost (scaled) of reaching ``(a, L)`` from vertex ``w`` for every ``(L, a)``.

    Returns ``(cost, via)`` where ``via[L, a]`` says the cheapest route first
    descends to the base and travels there.
    """
    D, m, s = h.depth_max, h.m, h.base.scale
    dw, cw = int(h.depth[w]), int(h.column[w])
    L = np.arange(D + 1)[:, None]
    cost = np.full((D + 1, m), _INF, dtype=np.int64)
    via = np.zeros((D + 1, m), dtype=bool)
    if cw >= 0:
        cost[:, cw] = np.abs(np.arange(D + 1) - dw) * s
    if h.glued:
        if dw == 0:
            bd = h._foot_rows[:, w]  # base index == space index for level 0
        else:
            bd = h.lattice_dist[cw]
        alt = dw * s + bd[None, :] + L * s
        alt[0, :] = _INF  # level 0 is the base route, handled separately
        better = alt < cost
        cost = np.where(better, alt, cost)
        via = better
    return cost, via


def _foot(h: HoroballGraph, w: int) -> int:
    """Base-space index directly below ``w`` (``w`` itself when at depth 0)."""
    if h.depth[w] == 0:
        return w
    return int(h.vid[h.column[w], 0])


def _column(h: HoroballGraph, col: int, l0: int, l1: int) -> list[int]:
    step = 1 if l1 >= l0 else -1
    return [int(h.vid[col, l]) for l in range(l0, l1 + step, step)]


def _rise(h: HoroballGraph, w: int, a: int, L: int, via: bool) -> tuple[list[int], list[int]]:
    """(lead, vertical) index lists taking ``w`` to ``(a, L)``."""
    dw, cw = int(h.depth[w]), int(h.column[w])
    if not via:
        return [], _column(h, cw, dw, L)
    lead = _column(h, cw, dw, 0) if dw > 0 else []
    foot = _foot(h, w)
    leg = h.base.geodesic_indices(foot, int(h.base.lattice_idx[a]))
    lead = lead[:-1] + leg if lead else leg
    return lead, _column(h, a, 0, L)


def normal_geodesic(h: HoroballGraph, x, y) -> NormalGeodesic:
    """Normal-form geodesic between two horoball vertices.

    Among all apex levels the cheapest is chosen, the lowest level on ties;
    within a level the smallest entry/exit columns, and the horizontal part
    is the lexicographically smallest shortest path at that level.
    """
    u = x if isinstance(x, (int, np.integer)) else h.vertex(x)
    v = y if isinstance(y, (int, np.integer)) else h.vertex(y)
    if not (0 <= u < h.space.n and 0 <= v < h.space.n):
        raise GeometryError("UNKNOWN_VERTEX", f"{x!r} or {y!r} not in horoball")
    u, v = int(u), int(v)
    s = h.base.scale
    cu, vu = _approach(h, u)
    cv, vv = _approach(h, v)
    # tot[L, a, b]
    Hs = np.where(h.level_dist < _INF, h.level_dist * s, _INF)
    tot = cu[:, :, None] + Hs + cv[:, None, :]
    tot = np.minimum(tot, _INF)
    flat = tot.reshape(h.depth_max + 1, -1)
    best_per_level = flat.min(axis=1)
    base_route = _INF
    if h.glued:
        fu, fv = _foot(h, u), _foot(h, v)
        base_route = (int(h.depth[u]) + int(h.depth[v])) * s + int(h.base.dist[fu, fv])
        best_per_level = best_per_level.copy()
        best_per_level[0] = min(best_per_level[0], base_route)
    L = int(np.argmin(best_per_level))
    total = int(best_per_level[L])
    names = h.space.vertices
    if h.glued and L == 0 and total == base_route:
        up = _column(h, int(h.column[u]), int(h.depth[u]), 0) if h.depth[u] > 0 else []
        across = h.base.geodesic_indices(fu, fv)
        down = _column(h, int(h.column[v]), 0, int(h.depth[v])) if h.depth[v] > 0 else []
        return NormalGeodesic(
            (), tuple(names[i] for i in up), tuple(names[i] for i in across),
            tuple(names[i] for i in down), (), 0, Fraction(total, s),
        )
    k = int(np.argmin(flat[L]))
    a, b = divmod(k, h.m)
    lead, up = _rise(h, u, a, L, bool(vu[L, a]))
    tail, down = _rise(h, v, b, L, bool(vv[L, b]))
    across = [int(h.vid[c, L]) for c in h.level_table(L).path(a, b)]
    return NormalGeodesic(
        tuple(names[i] for i in lead),
        tuple(names[i] for i in up),
        tuple(names[i] for i in across),
        tuple(names[i] for i in reversed(down)),
        tuple(names[i] for i in reversed(tail)),
        L,
        Fraction(total, s),
    )


def normal_table(h: HoroballGraph) -> PathTable:
    """Normal geodesics for every ordered pair, as a padded index table."""
    cached = getattr(h, "_normal_table", None)
    if cached is not None:
        return cached
    if h.glued:
        table = _normal_table_loop(h)
    else:
        table = _normal_table_comb(h)
    h._normal_table = table
    return table


def _normal_table_loop(h: HoroballGraph) -> PathTable:
    n = h.space.n
    rows = {}
    K = 1
    for u in range(n):
        for v in range(n):
            ids = normal_geodesic(h, u, v).vertices
            p = [h.space.index[x] for x in ids]
            rows[u, v] = p
            K = max(K, len(p))
    verts = np.empty((n, n, K), dtype=np.int32)
    count = np.empty((n, n), dtype=np.int32)
    for (u, v), p in rows.items():
        verts[u, v, : len(p)] = p
        verts[u, v, len(p):] = p[-1]
        count[u, v] = len(p)
    return PathTable(verts, count)


def _normal_table_comb(h: HoroballGraph) -> PathTable:
    D = h.depth_max
    n = h.space.n
    dep, col = h.depth, h.column
    Lr = np.arange(D + 1)[:, None, None]
    H = h.level_dist
    cost = (
        np.abs(Lr - dep[None, :, None])
        + np.abs(Lr - dep[None, None, :])
        + H[:, col[:, None], col[None, :]]
    )
    L = np.argmin(cost, axis=0)  # first minimum = lowest apex
    du = np.broadcast_to(dep[:, None], (n, n))
    dv = np.broadcast_to(dep[None, :], (n, n))
    cu = np.broadcast_to(col[:, None], (n, n))
    cv = np.broadcast_to(col[None, :], (n, n))
    hl = H[L, cu, cv]
    up = np.abs(L - du)
    dn = np.abs(L - dv)
    total = up + hl + dn
    K = int(total.max()) + 1
    k = np.minimum(np.arange(K)[None, None, :], total[:, :, None])
    up3, hl3, L3 = up[:, :, None], hl[:, :, None], L[:, :, None]
    s1 = np.sign(L - du)[:, :, None]
    s2 = np.sign(dv - L)[:, :, None]
    lvl1 = du[:, :, None] + s1 * k
    j = np.clip(k - up3, 0, None)
    tables = {l: h.level_table(l).verts for l in np.unique(L)}
    across_pos = np.empty_like(k)
    for l, tv in tables.items():
        sel = L == l
        jj = np.minimum(j[sel], tv.shape[2] - 1)
        across_pos[sel] = tv[cu[sel][:, None], cv[sel][:, None], jj]
    lvl3 = L3 + s2 * np.clip(k - up3 - hl3, 0, None)
    out_col = np.where(k <= up3, cu[:, :, None], np.where(k <= up3 + hl3, across_pos, cv[:, :, None]))
    out_lvl = np.where(k <= up3, lvl1, np.where(k <= up3 + hl3, L3, lvl3))
    verts = h.vid[out_col, out_lvl].astype(np.int32)
    return PathTable(verts, (total + 1).astype(np.int32))


def _as_indices(h: HoroballGraph, p) -> list[int]:
    seq = p.vertices if hasattr(p, "vertices") else p
    return [x if isinstance(x, (int, np.integer)) else h.space.idx(x) for x in seq]


def hausdorff_deviation(h: HoroballGraph | Space, p, q) -> Fraction:
    """Hausdorff distance between the vertex sets of two paths with common endpoints."""
    space = h.space if isinstance(h, HoroballGraph) else h
    P = [space.idx(x) for x in (p.vertices if hasattr(p, "vertices") else p)]
    Q = [space.idx(x) for x in (q.vertices if hasattr(q, "vertices") else q)]
    if not P or not Q or {P[0], P[-1]} != {Q[0], Q[-1]}:
        raise GeometryError("ENDPOINT_MISMATCH", "paths do not share their endpoints")
    val = hausdorff_rows(space.dist, np.array([P]), np.array([Q]))[0]
    return Fraction(int(val), space.scale)


def segments(h: HoroballGraph, p) -> list[tuple[str, int, list[int]]]:
    """Split a path into maximal runs of one edge kind.

    Kinds are ``"vertical"`` (label: +1 rising, -1 descending),
    ``"horizontal"`` (label: level) and ``"base"`` (label: 0).
    """
    idx = _as_indices(h, p)
    runs: list[tuple[str, int, list[int]]] = []
    for a, b in zip(idx, idx[1:]):
        da, db = int(h.depth[a]), int(h.depth[b])
        if da != db:
            kind, label = "vertical", (1 if db > da else -1)
        elif da == 0 and h.glued:
            kind, label = "base", 0
        else:
            kind, label = "horizontal", da
        if runs and runs[-1][0] == kind and runs[-1][1] == label:
            runs[-1][2].append(b)
        else:
            runs.append((kind, label, [a, b]))
    return runs


def min_diameter_triangles(
    h: HoroballGraph | Space,
    triples="all",
    sides: str = "normal",
    return_witness: bool = False,
):
    """Largest, over the given triples, of the minimal diameter of the chosen triangle.

    Each side is the selected geodesic (normal geodesics on a horoball unless
    ``sides="bfs"``; canonical geodesics on a plain space).  For one
    triangle the quantity is the minimum over side points ``(p1, p2, p3)`` of
    the largest pairwise distance.  With ``triples="all"`` every unordered
    triple of vertices is examined; a cheap upper bound (the internal points
    of the triangle) prunes triples that cannot beat the running maximum, so
    the returned value is still exact.
    """
    if isinstance(h, HoroballGraph):
        space = h.space
        table = normal_table(h) if sides == "normal" else next_hop_table(space.next_hop)
    else:
        space = h
        table = next_hop_table(space.next_hop)
    D = space.dist
    n = space.n
    unit = space.max_edge == 1 and all(w == space.scale for w in space._edges.values())
    best, witness = -1, None

    def exact(T: np.ndarray):
        x, y, z = T[:, 0], T[:, 1], T[:, 2]
        return min_diameter_rows(D, table.verts[x, y], table.verts[y, z], table.verts[z, x])

    def consider(T: np.ndarray):
        nonlocal best, witness
        if len(T) == 0:
            return
        if unit:
            bound = _insize_bound(D, table, T)
            order = np.argsort(-bound, kind="stable")
            T, bound = T[order], bound[order]
        else:
            bound = None
        start = 0
        while start < len(T):
            if bound is not None and bound[start] <= best:
                break
            stop = start + 2048
            if bound is not None:
                stop = min(stop, start + int(np.searchsorted(-bound[start:], -best, side="left")) or 1)
            vals = exact(T[start:stop])
            i = int(np.argmax(vals))
            if vals[i] > best:
                best, witness = int(vals[i]), tuple(int(t) for t in T[start + i])
            start = stop

    if isinstance(triples, str):
        if triples.lower() != "all":
            raise GeometryError("EMPTY_SAMPLE", f"unknown triple selector {triples!r}")
        if n == 0:
            raise GeometryError("EMPTY_SAMPLE", "no vertices")
        for x in range(n):
            y, z = np.triu_indices(n - x)
            T = np.column_stack([np.full(len(y), x), y + x, z + x])
            consider(T)
    else:
        T = np.array([[_vidx(space, t) for t in tri] for tri in triples], dtype=np.int64)
        if T.size == 0:
            raise GeometryError("EMPTY_SAMPLE", "no triples given")
        for chunk in range(0, len(T), 50_000):
            consider(T[chunk:chunk + 50_000])
    value = Fraction(best, space.scale)
    if return_witness:
        return value, tuple(space.vertices[i] for i in witness)
    return value


def _vidx(space: Space, v) -> int:
    if isinstance(v, (int, np.integer)) and v not in space.index:
        return int(v)
    return space.idx(v)


def _insize_bound(D: np.ndarray, table: PathTable, T: np.ndarray) -> np.ndarray:
    """Diameter of the three internal points; an upper bound for unit-length graphs."""
    x, y, z = T[:, 0], T[:, 1], T[:, 2]
    dxy, dyz, dxz = D[x, y], D[y, z], D[x, z]
    # distance from x of the internal point on [x,y]
    gx = (dxy + dxz - dyz) // 2
    gy = (dxy + dyz - dxz) // 2
    gz = (dxz + dyz - dxy) // 2
    p1 = table.verts[x, y][np.arange(len(T)), np.minimum(gx, table.verts.shape[2] - 1)]
    p2 = table.verts[y, z][np.arange(len(T)), np.minimum(gy, table.verts.shape[2] - 1)]
    p3 = table.verts[z, x][np.arange(len(T)), np.minimum(gz, table.verts.shape[2] - 1)]
    return np.maximum(np.maximum(D[p1, p2], D[p2, p3]), D[p1, p3])
