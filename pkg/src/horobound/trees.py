"""Trees of spaces, free products, and augmented spaces.

A tree of spaces is a bipartite tree on ``K`` (component nodes) and ``L``
(cut nodes).  Every ``k`` in ``K`` carries a ``Space``; every ``l`` in ``L``
identifies one lattice vertex from each adjacent component into a single
cut point.  The assembled graph names its vertices ``"k:v"``; a cut point
keeps the name of its entry in the first component (in component order).

Geodesics between components are concatenations of component geodesics
through the unique sequence of cut points on the tree path, which makes
them geodesics of the assembled graph (every cut point separates).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bicombing import (
    Bicombing,
    ConvexityParams,
    ViolationReport,
    check_convexity,
)
from .errors import GeometryError
from .horoball import HoroballGraph, normal_table
from .metric import Path, Space, _read_document, load_space
from .paths import PathTable, next_hop_table

__all__ = [
    "TreeOfSpaces",
    "AugmentedSpace",
    "build_tree_of_spaces",
    "load_tree_of_spaces",
    "free_product",
    "tree_geodesic",
    "augment",
    "check_EC_transfer",
]

SEP = ":"


class TreeOfSpaces:
    """Components glued along single cut points according to a bipartite tree."""

    def __init__(
        self,
        components: dict[str, Space],
        L: list[str],
        edges: list[tuple[str, str]],
        cuts: dict[str, list[tuple[str, object]]],
        basepoint: tuple[str, object] | None = None,
        name: str = "tree",
        selectors: dict[str, Callable[[], PathTable]] | None = None,
    ):
        self.name = name
        self.K = sorted(components)
        self.L = sorted(L)
        self.components = {k: components[k] for k in self.K}
        self._selectors = dict(selectors or {})
        self.truncated: tuple = ()
        self._check_tree(edges, cuts)
        self._assemble(basepoint)

    # -- validation -------------------------------------------------------------

    def _check_tree(self, edges, cuts) -> None:
        Kset, Lset = set(self.K), set(self.L)
        if Kset & Lset:
            raise GeometryError("NOT_BIPARTITE", f"names used on both sides: {sorted(Kset & Lset)}")
        adj: dict[str, set] = {v: set() for v in self.K + self.L}
        for a, b in edges:
            if a in Lset and b in Kset:
                a, b = b, a
            if a not in Kset or b not in Lset:
                raise GeometryError("NOT_BIPARTITE", f"edge {a}-{b} does not join K to L")
            adj[a].add(b)
            adj[b].add(a)
        nodes = self.K + self.L
        seen = {nodes[0]}
        queue = deque([nodes[0]])
        while queue:
            for w in adj[queue.popleft()]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != len(nodes):
            missing = sorted(set(nodes) - seen)
            raise GeometryError("DISCONNECTED_ASSEMBLY", f"the tree does not reach {missing}")
        if len({frozenset(e) for e in edges}) != len(nodes) - 1:
            raise GeometryError("NOT_BIPARTITE", "the K-L graph has a cycle, so it is not a tree")
        self.adj = {v: sorted(adj[v]) for v in nodes}

        self.cuts: dict[str, list[tuple[str, object]]] = {}
        for l in self.L:
            entries = [(str(k), v) for k, v in cuts.get(l, [])]
            ks = [k for k, _ in entries]
            if sorted(ks) != self.adj[l] or len(set(ks)) != len(ks):
                raise GeometryError(
                    "NOT_BIPARTITE", f"cut {l} must list one vertex per adjacent component {self.adj[l]}, got {ks}"
                )
            for k, v in entries:
                X = self.components[k]
                if v not in X.index:
                    raise GeometryError("CUT_NOT_IN_LATTICE", f"{v!r} is not a vertex of {k}", where=l)
                if not X.in_lattice(v):
                    raise GeometryError("CUT_NOT_IN_LATTICE", f"{v!r} is not in the lattice of {k}", where=l)
            self.cuts[l] = sorted(entries, key=lambda e: self.K.index(e[0]))
        self.Linterior = [l for l in self.L if len(self.adj[l]) >= 2]

    def _assemble(self, basepoint) -> None:
        rep: dict[tuple[str, object], str] = {}
        self.cut_of: dict[str, str] = {}
        for l in self.L:
            k0, v0 = self.cuts[l][0]
            name = f"{k0}{SEP}{v0}"
            for k, v in self.cuts[l]:
                if (k, v) in rep:
                    raise GeometryError("NOT_BIPARTITE", f"{k}{SEP}{v} is used by two cuts", where=l)
                rep[(k, v)] = name
            self.cut_of[name] = l
        vertices: list[str] = []
        seen: set[str] = set()
        local: dict[str, dict] = {}
        for k in self.K:
            X = self.components[k]
            local[k] = {}
            for v in X.vertices:
                g = rep.get((k, v), f"{k}{SEP}{v}")
                local[k][v] = g
                if g not in seen:
                    seen.add(g)
                    vertices.append(g)
        self._global_name = local
        edges = []
        for k in self.K:
            X = self.components[k]
            for u, v, w in X.edges:
                edges.append((local[k][u], local[k][v], w))
        lattice = [local[k][v] for k in self.K for v in self.components[k].lattice]
        lattice = list(dict.fromkeys(lattice))
        if basepoint is None:
            k0 = self.K[0]
            basepoint = (k0, self.components[k0].basepoint)
        bk, bv = basepoint
        if bk not in self.components or bv not in self.components[bk].index:
            raise GeometryError("MISSING_BASEPOINT", f"basepoint {bk}{SEP}{bv} is not a component vertex")
        self.basepoint_pair = (bk, bv)
        try:
            self.space = Space(vertices, edges, lattice, local[bk][bv], name=self.name, validate=False)
            self.space.dist  # connectivity check
        except GeometryError as exc:
            if exc.code == "DISCONNECTED":
                raise GeometryError("DISCONNECTED_ASSEMBLY", exc.detail)
            raise
        sp = self.space
        # membership: global index -> components containing it
        self.members: list[list[str]] = [[] for _ in range(sp.n)]
        self._loc = np.full((sp.n, len(self.K)), -1, dtype=np.int64)
        self._glob = {}
        for ki, k in enumerate(self.K):
            X = self.components[k]
            g = np.array([sp.index[local[k][v]] for v in X.vertices], dtype=np.int64)
            self._glob[k] = g
            self._loc[g, ki] = np.arange(X.n)
            for gi in g:
                self.members[gi].append(k)
        self.component_of = [m[0] if len(m) == 1 else None for m in self.members]
        self._tree_tables()

    # -- tree routing -----------------------------------------------------------

    def _tree_tables(self) -> None:
        nodes = self.K + self.L
        self.node_index = {v: i for i, v in enumerate(nodes)}
        T = len(nodes)
        nxt = np.full((T, T), -1, dtype=np.int64)
        for s in range(T):
            nxt[s, s] = s
            queue = deque([s])
            first = {s: s}
            while queue:
                a = queue.popleft()
                for w in self.adj[nodes[a]]:
                    wi = self.node_index[w]
                    if wi not in first:
                        first[wi] = wi if a == s else first[a]
                        queue.append(wi)
            for t, f in first.items():
                nxt[s, t] = f
        self._next_node = nxt
        nK = len(self.K)
        sp = self.space
        node_of = np.empty(sp.n, dtype=np.int64)
        for g, ms in enumerate(self.members):
            if len(ms) == 1:
                node_of[g] = self.node_index[ms[0]]
            else:
                node_of[g] = self.node_index[self.cut_of[sp.vertices[g]]]
        self._node_of = node_of
        # chosen component for a source node heading to a target node
        chosen = np.empty((T, T), dtype=np.int64)
        for s in range(T):
            for t in range(T):
                chosen[s, t] = s if s < nK else (nxt[s, t] if t != s else self.node_index[self.adj[nodes[s]][0]])
        self._chosen = chosen
        # exit vertex (global) of component k toward target node t; -1 = the target itself
        exitv = np.full((nK, T), -1, dtype=np.int64)
        for ki, k in enumerate(self.K):
            for t in range(T):
                if t == ki or (t >= nK and k in self.adj[nodes[t]]):
                    continue
                l = nodes[nxt[ki, t]]
                v = dict(self.cuts[l])[k]
                exitv[ki, t] = sp.index[self._global_name[k][v]]
        self._exit = exitv

    def tree_path(self, a: str, b: str) -> list[str]:
        """Node sequence of the tree path from node ``a`` to node ``b``."""
        i, j = self.node_index[a], self.node_index[b]
        nodes = self.K + self.L
        out = [a]
        while i != j:
            i = int(self._next_node[i, j])
            out.append(nodes[i])
        return out

    def component_index(self, k: str) -> int:
        """1-based position of ``k`` in the fixed component order."""
        return self.K.index(k) + 1

    # -- component geodesic tables ------------------------------------------------

    def component_table(self, k: str) -> PathTable:
        cache = self.__dict__.setdefault("_ctables", {})
        if k not in cache:
            fn = self._selectors.get(k)
            cache[k] = fn() if fn is not None else next_hop_table(self.components[k].next_hop)
        return cache[k]

    def _route(self, u: int, v: int) -> tuple[int, int]:
        """(component index, exit vertex) for the first leg from ``u`` toward ``v``."""
        t = self._node_of[v]
        ki = int(self._chosen[self._node_of[u], t])
        e = int(self._exit[ki, t])
        return ki, (v if e < 0 else e)

    def geodesic_indices(self, u: int, v: int) -> list[int]:
        out = [u]
        cur = u
        while cur != v:
            ki, e = self._route(cur, v)
            k = self.K[ki]
            seg = self.component_table(k).path(int(self._loc[cur, ki]), int(self._loc[e, ki]))
            out.extend(int(self._glob[k][i]) for i in seg[1:])
            cur = e
        return out

    def table(self) -> PathTable:
        """Tree geodesics for every ordered pair, built by vectorised concatenation."""
        sp = self.space
        n = sp.n
        nK = len(self.K)
        tabs = [self.component_table(k) for k in self.K]
        m = max(t.n for t in tabs)
        Kc = max(t.verts.shape[2] for t in tabs)
        # stacked component tables in global ids, padded
        stack = np.zeros((nK, m, m, Kc), dtype=np.int32)
        for ki, (k, t) in enumerate(zip(self.K, tabs)):
            g = self._glob[k]
            V = g[t.verts]
            if V.shape[2] < Kc:
                V = np.concatenate([V, np.repeat(V[:, :, -1:], Kc - V.shape[2], axis=2)], axis=2)
            stack[ki, : t.n, : t.n] = V
        src = np.repeat(np.arange(n)[:, None], n, axis=1)
        tgt = np.repeat(np.arange(n)[None, :], n, axis=0)
        cur = src.copy()
        pieces = [cur[:, :, None].astype(np.int32)]
        node_t = self._node_of[tgt]
        while True:
            active = cur != tgt
            if not active.any():
                break
            ki = self._chosen[self._node_of[cur], node_t]
            e = self._exit[ki, node_t]
            e = np.where(e < 0, tgt, e)
            a = self._loc[cur, ki]
            b = self._loc[e, ki]
            seg = stack[ki, a, b][:, :, 1:]
            seg = np.where(active[:, :, None], seg, cur[:, :, None].astype(np.int32))
            pieces.append(seg)
            cur = np.where(active, e, cur)
        V = np.concatenate(pieces, axis=2)
        keep = np.ones(V.shape, dtype=bool)
        keep[:, :, 1:] = V[:, :, 1:] != V[:, :, :-1]
        count = keep.sum(axis=2).astype(np.int32)
        order = np.argsort(~keep, axis=2, kind="stable")
        V = np.take_along_axis(V, order, axis=2)
        K = int(count.max())
        V = V[:, :, :K]
        pos = np.arange(K)[None, None, :]
        last = np.take_along_axis(V, (count - 1)[:, :, None], axis=2)
        V = np.where(pos < count[:, :, None], V, last).astype(np.int32)
        return PathTable(V, count)

    def bicombing(self) -> Bicombing:
        cache = self.__dict__.get("_bicombing")
        if cache is None:
            cache = Bicombing(self.space, self.geodesic_indices, table=self.table, name=self.name)
            self._bicombing = cache
        return cache

    # -- names ----------------------------------------------------------------------

    def gid(self, k: str, v) -> str:
        """Assembled name of vertex ``v`` of component ``k``."""
        return self._global_name[k][v]

    def component_vertices(self, k: str) -> np.ndarray:
        return self._glob[k]

    def __repr__(self) -> str:
        return f"TreeOfSpaces({self.name!r}, K={len(self.K)}, L={len(self.L)}, n={self.space.n})"


def tree_geodesic(z: TreeOfSpaces, u, v) -> Path:
    sp = z.space
    return sp.make_path(z.geodesic_indices(sp.idx(u), sp.idx(v)))


def build_tree_of_spaces(document) -> TreeOfSpaces:
    """Tree of spaces from a mapping, JSON/YAML text or file path.

    Fields: ``components`` (name -> space document), ``tree`` (``K``, ``L``,
    ``edges``), ``cuts`` (l -> list of ``[k, vertex]``), ``basepoint``
    (``[k, vertex]``), optional ``name``.
    """
    doc, where = _read_document(document)
    if not isinstance(doc, dict):
        raise GeometryError("NOT_BIPARTITE", "tree document must be a mapping", where=where)
    comps = {}
    for k, d in (doc.get("components") or {}).items():
        d = dict(d)
        d.setdefault("name", str(k))
        comps[str(k)] = load_space(d)
    tree = doc.get("tree") or {}
    K = [str(k) for k in tree.get("K", comps)]
    if sorted(K) != sorted(comps):
        raise GeometryError("NOT_BIPARTITE", "tree K-nodes must match the component names", where=where)
    L = [str(l) for l in tree.get("L", [])]
    edges = [(str(a), str(b)) for a, b in tree.get("edges", [])]
    cuts = {str(l): [(str(k), str(v)) for k, v in entries] for l, entries in (doc.get("cuts") or {}).items()}
    bp = doc.get("basepoint")
    bp = (str(bp[0]), str(bp[1])) if bp else None
    return TreeOfSpaces(comps, L, edges, cuts, bp, name=str(doc.get("name", where or "tree")))


load_tree_of_spaces = build_tree_of_spaces


def free_product(X: Space, Y: Space, word_depth: int, root: str = "X", sep: str = "/") -> TreeOfSpaces:
    """Free product of two pointed spaces with nets, truncated at ``word_depth``.

    Components are named by words: the root copy of ``X`` is ``root``; the
    copy glued at net point ``p`` of a component named ``w`` is ``w/p``.
    The root carries a copy of the other factor at every net point; deeper
    components skip the net point they are glued by, which is the other
    factor's basepoint.  Every gluing uses the basepoint of the attached copy.
    """
    if int(word_depth) != word_depth or word_depth < 1:
        raise GeometryError("BAD_DEPTH", f"word_depth must be an integer >= 1, got {word_depth!r}")
    comps: dict[str, Space] = {root: X}
    factor = {root: 0}
    L, edges, cuts = [], [], {}
    frontier = [root]
    for _ in range(int(word_depth)):
        nxt = []
        for w in frontier:
            host = (X, Y)[factor[w]]
            child = (Y, X)[factor[w]]
            for p in host.lattice:
                if w != root and p == host.basepoint:
                    continue
                c = f"{w}{sep}{p}"
                l = f"l{sep}{c}"
                comps[c] = child
                factor[c] = 1 - factor[w]
                L.append(l)
                edges += [(w, l), (c, l)]
                cuts[l] = [(w, p), (c, child.basepoint)]
                nxt.append(c)
        frontier = nxt
    z = TreeOfSpaces(comps, L, edges, cuts, (root, X.basepoint),
                     name=f"{X.name}*{Y.name}[{word_depth}]")
    z.truncated = tuple(frontier)  # deepest words: their own gluings are cut off
    z.word_depth = int(word_depth)
    return z


@dataclass
class AugmentedSpace:
    """A tree of spaces with every component past index ``n`` replaced by its glued horoball."""

    base: TreeOfSpaces
    n: int
    depth_max: int
    z: TreeOfSpaces
    replaced: list = field(default_factory=list)
    horoballs: dict = field(default_factory=dict)
    centers: dict = field(default_factory=dict)

    @property
    def space(self) -> Space:
        return self.z.space

    def bicombing(self) -> Bicombing:
        return self.z.bicombing()

    def center_marker(self, k: str) -> list[str]:
        """Assembled names of the deepest layer of component ``k``'s horoball."""
        return self.centers[k]


def augment(z: TreeOfSpaces, n: int, depth_max: int) -> AugmentedSpace:
    """Replace every component with index greater than ``n`` by its glued horoball."""
    if int(n) != n or n < 0:
        raise GeometryError("BAD_LEVEL", f"augmentation level must be an integer >= 0, got {n!r}")
    n = int(n)
    built: dict[int, HoroballGraph] = {}
    comps, selectors, horoballs, replaced = {}, {}, {}, []
    for i, k in enumerate(z.K, start=1):
        X = z.components[k]
        if i <= n:
            comps[k] = X
            continue
        h = built.get(id(X))
        if h is None:
            h = built[id(X)] = HoroballGraph(X, depth_max, glued=True)
        comps[k] = h.space
        selectors[k] = (lambda h=h: normal_table(h))
        horoballs[k] = h
        replaced.append(k)
    L = list(z.L)
    edges = [(k, l) for l in z.L for k in z.adj[l]]
    cuts = {l: list(entries) for l, entries in z.cuts.items()}
    aug = TreeOfSpaces(comps, L, edges, cuts, z.basepoint_pair, name=f"{z.name}^({n})", selectors=selectors)
    centers = {}
    for k, h in horoballs.items():
        top = h.vid[:, h.depth_max]
        centers[k] = [aug.gid(k, h.space.vertices[i]) for i in top]
    return AugmentedSpace(z, n, int(depth_max), aug, replaced, horoballs, centers)


def check_EC_transfer(z: TreeOfSpaces, fitted, quadruples="all", seed=None, c_grid=None) -> ViolationReport:
    """Certify ``(E' + 2, 6 C')`` plus quantisation slack on the assembled bicombing.

    ``fitted`` is one ``ConvexityParams`` or a mapping component -> params;
    with a mapping the largest ``E'`` and ``C'`` are used.
    """
    if isinstance(fitted, ConvexityParams):
        E1, C1 = fitted.E, fitted.C
    else:
        vals = list(fitted.values())
        E1, C1 = max(p.E for p in vals), max(p.C for p in vals)
    params = ConvexityParams(E1 + 2, 6 * C1)
    kw = {} if c_grid is None else {"c_grid": c_grid}
    rep = check_convexity(z.bicombing(), params, quadruples, seed=seed, **kw)
    rep.check = "ec_transfer"
    rep.params.update({"E'": E1, "C'": C1})
    return rep
