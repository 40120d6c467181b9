"""Finite weighted graphs with a lattice, exact distances and canonical geodesics.

Edge lengths are rationals.  Internally every length is multiplied by the
least common multiple of the denominators so that shortest-path sums are
plain integers; scipy's Dijkstra runs on those integers (exact in float64
far beyond any size used here) and results are handed back as ``Fraction``.

Vertex order is the order of the ``vertices`` list.  ``geodesic`` returns,
among all shortest paths, the one whose vertex sequence is lexicographically
smallest in that order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path as FsPath
from typing import Any, Iterable, Sequence

import numpy as np
import yaml
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import GeometryError

__all__ = [
    "Path",
    "Space",
    "load_space",
    "space_from_edges",
    "distance",
    "geodesic",
    "parse_length",
]


@dataclass(frozen=True)
class Path:
    """A walk through a space, stored as vertex ids plus its total length."""

    vertices: tuple
    length: Fraction

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    def reversed(self) -> "Path":
        return Path(tuple(reversed(self.vertices)), self.length)


def parse_length(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("boolean is not a length")
    if isinstance(value, int):
        return Fraction(value)
    # floats go through their repr so 0.1 stays 1/10
    return Fraction(str(value).strip())


class Space:
    """Connected weighted graph with a designated lattice and basepoint.

    Immutable after construction.  Distances and next-hop tables are computed
    lazily and cached; every query afterwards is read-only.
    """

    def __init__(
        self,
        vertices: Sequence,
        edges: Iterable[tuple],
        lattice: Iterable | None = None,
        basepoint=None,
        name: str = "space",
        validate: bool = True,
    ):
        self.name = name
        self.vertices = tuple(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        if len(self.index) != len(self.vertices):
            raise GeometryError("BAD_EDGE", "duplicate vertex id", where=name)
        self.n = len(self.vertices)
        if self.n == 0:
            raise GeometryError("MISSING_BASEPOINT", "space has no vertices", where=name)

        if basepoint is None or basepoint not in self.index:
            raise GeometryError(
                "MISSING_BASEPOINT", f"basepoint {basepoint!r} is not a vertex", where=name
            )
        self.basepoint = basepoint

        lengths: dict[tuple[int, int], Fraction] = {}
        for pos, edge in enumerate(edges):
            where = f"{name}: edges[{pos}]"
            try:
                u, v, raw = edge
            except (TypeError, ValueError):
                raise GeometryError("BAD_EDGE", "edge must be [u, v, length]", where=where)
            if u not in self.index or v not in self.index:
                raise GeometryError("BAD_EDGE", f"unknown endpoint in {u!r}-{v!r}", where=where)
            try:
                length = parse_length(raw)
            except (ValueError, ZeroDivisionError):
                raise GeometryError("BAD_EDGE", f"unreadable length {raw!r}", where=where)
            if length <= 0:
                raise GeometryError("BAD_EDGE", f"nonpositive length {raw!r}", where=where)
            if u == v:
                raise GeometryError("BAD_EDGE", f"self-loop at {u!r}", where=where)
            i, j = sorted((self.index[u], self.index[v]))
            if (i, j) not in lengths or length < lengths[(i, j)]:
                lengths[(i, j)] = length

        self.scale = math.lcm(*(l.denominator for l in lengths.values())) if lengths else 1
        self._edges = {k: int(l * self.scale) for k, l in lengths.items()}
        self.max_edge = Fraction(max(self._edges.values(), default=0), self.scale)

        nbrs: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for (i, j), w in self._edges.items():
            nbrs[i].append((j, w))
            nbrs[j].append((i, w))
        self.neighbors = [sorted(row) for row in nbrs]
        rows, cols, data = [], [], []
        for (i, j), w in self._edges.items():
            rows += [i, j]
            cols += [j, i]
            data += [w, w]
        self.adjacency = csr_matrix(
            (np.asarray(data, dtype=float), (rows, cols)), shape=(self.n, self.n)
        )

        if validate:
            ncomp, _ = connected_components(self.adjacency, directed=False)
            if ncomp != 1:
                raise GeometryError(
                    "DISCONNECTED", f"graph has {ncomp} connected components", where=name
                )

        lat = list(self.vertices) if lattice is None else list(lattice)
        for v in lat:
            if v not in self.index:
                raise GeometryError("BAD_LATTICE", f"lattice vertex {v!r} is not a vertex", where=name)
        self.lattice = tuple(v for v in self.vertices if v in set(lat))
        self.lattice_idx = np.array([self.index[v] for v in self.lattice], dtype=np.int64)
        self._lattice_set = frozenset(self.lattice)

        self._dist: np.ndarray | None = None
        self._next: np.ndarray | None = None
        if validate:
            self._check_lattice()

    # -- construction helpers -------------------------------------------------

    def _check_lattice(self) -> None:
        if len(self.lattice) == 0:
            raise GeometryError("BAD_LATTICE", "lattice is empty", where=self.name)
        rows = self.dist_rows(self.lattice_idx)
        one = self.scale
        sub = rows[:, self.lattice_idx]
        off = ~np.eye(len(self.lattice_idx), dtype=bool)
        if np.any(sub[off] < one):
            i, j = np.argwhere((sub < one) & off)[0]
            raise GeometryError(
                "BAD_LATTICE",
                f"lattice not 1-discrete: {self.lattice[i]!r}, {self.lattice[j]!r}",
                where=self.name,
            )
        cover = rows.min(axis=0)
        if np.any(cover > 2 * one):
            v = int(np.argmax(cover > 2 * one))
            raise GeometryError(
                "BAD_LATTICE",
                f"lattice not 2-dense: vertex {self.vertices[v]!r} is "
                f"{Fraction(int(cover[v]), one)} from the lattice",
                where=self.name,
            )

    # -- lookups --------------------------------------------------------------

    def idx(self, v) -> int:
        try:
            return self.index[v]
        except (KeyError, TypeError):
            raise GeometryError("UNKNOWN_VERTEX", f"{v!r} is not a vertex of {self.name}")

    def in_lattice(self, v) -> bool:
        return v in self._lattice_set

    @property
    def edges(self) -> list[tuple[Any, Any, Fraction]]:
        return [
            (self.vertices[i], self.vertices[j], Fraction(w, self.scale))
            for (i, j), w in sorted(self._edges.items())
        ]

    def edge_weight(self, i: int, j: int) -> int:
        """Scaled integer length of the edge ``i``-``j``."""
        return self._edges[(i, j) if i < j else (j, i)]

    def to_document(self) -> dict:
        return {
            "name": self.name,
            "vertices": list(self.vertices),
            "edges": [[u, v, str(l)] for u, v, l in self.edges],
            "lattice": list(self.lattice),
            "basepoint": self.basepoint,
        }

    # -- distances ------------------------------------------------------------

    def dist_rows(self, sources) -> np.ndarray:
        """Scaled integer distances from each index in ``sources`` to every vertex."""
        sources = np.atleast_1d(np.asarray(sources, dtype=np.int64))
        if self._dist is not None:
            return self._dist[sources]
        d = shortest_path(self.adjacency, method="D", directed=False, indices=sources)
        return _as_int(d)

    @property
    def dist(self) -> np.ndarray:
        """Full scaled integer distance matrix (``n x n`` int64)."""
        if self._dist is None:
            d = shortest_path(self.adjacency, method="D", directed=False)
            self._dist = _as_int(d)
            self._dist.setflags(write=False)
        return self._dist

    def distance(self, u, v) -> Fraction:
        i, j = self.idx(u), self.idx(v)
        return Fraction(int(self.dist[i, j]), self.scale)

    def eccentricity(self, v) -> Fraction:
        return Fraction(int(self.dist_rows([self.idx(v)]).max()), self.scale)

    # -- geodesics ------------------------------------------------------------

    @property
    def next_hop(self) -> np.ndarray:
        """``next_hop[w, v]``: smallest neighbour of ``w`` on a shortest path to ``v``."""
        if self._next is None:
            D = self.dist
            nh = np.empty((self.n, self.n), dtype=np.int32)
            for w in range(self.n):
                nb = np.array([j for j, _ in self.neighbors[w]], dtype=np.int64)
                ws = np.array([x for _, x in self.neighbors[w]], dtype=np.int64)
                ok = D[nb] + ws[:, None] == D[w][None, :]
                nh[w] = nb[np.argmax(ok, axis=0)]
                nh[w, w] = w
            nh.setflags(write=False)
            self._next = nh
        return self._next

    def geodesic_indices(self, i: int, j: int) -> list[int]:
        nh = self.next_hop
        out = [i]
        while i != j:
            i = int(nh[i, j])
            out.append(i)
        return out

    def path_length(self, indices: Sequence[int]) -> Fraction:
        total = 0
        for a, b in zip(indices, indices[1:]):
            try:
                total += self.edge_weight(a, b)
            except KeyError:
                raise GeometryError(
                    "UNKNOWN_VERTEX",
                    f"{self.vertices[a]!r} and {self.vertices[b]!r} are not adjacent",
                )
        return Fraction(total, self.scale)

    def make_path(self, indices: Sequence[int]) -> Path:
        return Path(tuple(self.vertices[i] for i in indices), self.path_length(indices))

    def geodesic(self, u, v) -> Path:
        return self.make_path(self.geodesic_indices(self.idx(u), self.idx(v)))

    def __repr__(self) -> str:
        return f"Space({self.name!r}, n={self.n}, edges={len(self._edges)}, lattice={len(self.lattice)})"


def _as_int(d: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(d)):
        raise GeometryError("DISCONNECTED", "some vertices are unreachable")
    return np.rint(d).astype(np.int64)


def space_from_edges(edges, lattice=None, basepoint=None, vertices=None, name="space", validate=True) -> Space:
    """Convenience constructor: vertex order is first appearance unless given."""
    if vertices is None:
        seen: dict = {}
        for u, v, *_ in edges:
            seen.setdefault(u, None)
            seen.setdefault(v, None)
        vertices = list(seen)
    if basepoint is None and vertices:
        basepoint = vertices[0]
    return Space(vertices, [(u, v, (w[0] if w else 1)) for u, v, *w in edges],
                 lattice, basepoint, name=name, validate=validate)


def load_space(document) -> Space:
    """Build a validated ``Space`` from a mapping, a JSON/YAML string or a file path.

    Fields: ``name``, ``vertices``, ``edges`` (``[u, v, length]`` with the
    length an integer, decimal or fraction string), ``lattice``, ``basepoint``.
    """
    doc, where = _read_document(document)
    if not isinstance(doc, dict):
        raise GeometryError("BAD_EDGE", "space document must be a mapping", where=where)
    name = str(doc.get("name", where or "space"))
    vertices = [str(v) for v in doc.get("vertices", [])]
    edges = []
    for e in doc.get("edges", []):
        if isinstance(e, (list, tuple)) and len(e) == 3:
            edges.append((str(e[0]), str(e[1]), e[2]))
        else:
            edges.append(e)
    lattice = doc.get("lattice")
    lattice = None if lattice is None else [str(v) for v in lattice]
    bp = doc.get("basepoint")
    bp = None if bp is None else str(bp)
    try:
        return Space(vertices, edges, lattice, bp, name=name)
    except GeometryError as exc:
        if where and exc.code == "BAD_EDGE" and exc.where and "edges[" in exc.where:
            pos = int(exc.where.rsplit("edges[", 1)[1].rstrip("]"))
            line = _source_line(document, "edges", pos)
            exc.where = f"{where}:{line}" if line else where
            exc.args = (f"{exc.code}: {exc.detail} ({exc.where})",)
        elif where and not exc.where:
            exc.where = where
            exc.args = (f"{exc.code}: {exc.detail} ({where})",)
        raise


def _source_line(document, key: str, pos: int) -> int | None:
    """1-based line of item ``pos`` of the top-level list ``key`` in a document file."""
    try:
        text = FsPath(document).read_text(encoding="utf-8")
        root = yaml.compose(text)
        for k, v in root.value:
            if k.value == key:
                return v.value[pos].start_mark.line + 1
    except Exception:
        return None
    return None


def _read_document(document) -> tuple[Any, str | None]:
    if isinstance(document, dict):
        return document, document.get("name")
    if isinstance(document, FsPath) or (
        isinstance(document, str) and "\n" not in document and document.endswith((".json", ".yaml", ".yml"))
    ):
        p = FsPath(document)
        text = p.read_text(encoding="utf-8")
        return _parse_text(text, str(p)), str(p)
    return _parse_text(str(document), None), None


def _parse_text(text: str, where):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f"{where or '<text>'}:{mark.line + 1}" if mark else where
        raise GeometryError("BAD_EDGE", f"unparseable document: {exc}", where=loc)


def distance(s: Space, u, v) -> Fraction:
    return s.distance(u, v)


def geodesic(s: Space, u, v) -> Path:
    return s.geodesic(u, v)
