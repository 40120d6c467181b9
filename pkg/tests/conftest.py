"""Shared builders and independent brute-force oracles.

The oracles deliberately avoid the package's numerics: plain Python,
``Fraction`` arithmetic, breadth-first search and exhaustive enumeration.
"""
from __future__ import annotations

import itertools
import random
from collections import deque
from fractions import Fraction

import pytest

from horobound.metric import Space, space_from_edges


def path_space(n, name="path", lengths=None):
    lengths = lengths or [1] * (n - 1)
    return space_from_edges([(str(i), str(i + 1), lengths[i]) for i in range(n - 1)], basepoint="0", name=name)


def tripod(leg, name="tripod"):
    edges = []
    for a in "abc":
        prev = "h"
        for i in range(1, leg + 1):
            edges.append((prev, f"{a}{i}", 1))
            prev = f"{a}{i}"
    return space_from_edges(edges, basepoint="h", name=name)


def cycle(n, name="cycle"):
    names = [chr(ord("a") + i) for i in range(n)]
    return space_from_edges([(names[i], names[(i + 1) % n], 1) for i in range(n)], basepoint="a", name=name)


def random_tree(n, seed, name="tree"):
    rng = random.Random(seed)
    edges = [(str(rng.randrange(i)), str(i), 1) for i in range(1, n)]
    return space_from_edges(edges, basepoint="0", vertices=[str(i) for i in range(n)], name=name)


def random_graph(n, seed, p=0.25, weights=(1,), name="graph"):
    """Connected random graph: a random spanning tree plus extra edges."""
    rng = random.Random(seed)
    edges = {}
    for i in range(1, n):
        j = rng.randrange(i)
        edges[(j, i)] = rng.choice(weights)
    for i, j in itertools.combinations(range(n), 2):
        if (i, j) not in edges and rng.random() < p:
            edges[(i, j)] = rng.choice(weights)
    return Space([f"v{i:02d}" for i in range(n)], [(f"v{i:02d}", f"v{j:02d}", w) for (i, j), w in edges.items()],
                 lattice=None, basepoint="v00", name=name, validate=False)


# -- oracles ----------------------------------------------------------------------------


def floyd(space: Space):
    """All-pairs distances by Floyd-Warshall over exact fractions."""
    n = space.n
    INF = None
    d = [[Fraction(0) if i == j else INF for j in range(n)] for i in range(n)]
    for u, v, w in space.edges:
        i, j = space.index[u], space.index[v]
        if d[i][j] is None or w < d[i][j]:
            d[i][j] = d[j][i] = Fraction(w)
    for k in range(n):
        for i in range(n):
            if d[i][k] is None:
                continue
            for j in range(n):
                if d[k][j] is None:
                    continue
                c = d[i][k] + d[k][j]
                if d[i][j] is None or c < d[i][j]:
                    d[i][j] = c
    return d


def bfs_dist(adj, s):
    dist = {s: 0}
    q = deque([s])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def adjacency(space: Space):
    adj = {i: set() for i in range(space.n)}
    for u, v, _ in space.edges:
        adj[space.index[u]].add(space.index[v])
        adj[space.index[v]].add(space.index[u])
    return adj


def all_shortest_paths(space: Space, s: int, t: int, d=None):
    """Every shortest path from ``s`` to ``t`` as index lists (DFS over simple paths)."""
    d = d or floyd(space)
    w = {}
    for u, v, l in space.edges:
        i, j = space.index[u], space.index[v]
        w[(i, j)] = w[(j, i)] = min(Fraction(l), w.get((i, j), Fraction(l)))
    adj = adjacency(space)
    out = []

    def go(path, length):
        u = path[-1]
        if u == t:
            if length == d[s][t]:
                out.append(list(path))
            return
        for x in sorted(adj[u]):
            if x in path:
                continue
            nl = length + w[(u, x)]
            if nl + d[x][t] == d[s][t]:
                path.append(x)
                go(path, nl)
                path.pop()

    go([s], Fraction(0))
    return out


def quantized(path_lengths, t):
    """Index along a path whose arclength is closest to ``t`` times its length; earlier on ties."""
    arcs = [Fraction(0)]
    for l in path_lengths:
        arcs.append(arcs[-1] + l)
    target = Fraction(t) * arcs[-1]
    best = min(range(len(arcs)), key=lambda i: (abs(arcs[i] - target), i))
    return best


def reparam_oracle(space, path, s):
    """Vertex at arclength ``min(s, length)`` along an index path (closest; earlier on ties)."""
    d = floyd_cache(space)
    arcs = [Fraction(0)]
    for a, b in zip(path, path[1:]):
        arcs.append(arcs[-1] + d[a][b])
    s = min(Fraction(s), arcs[-1])
    return path[min(range(len(arcs)), key=lambda i: (abs(arcs[i] - s), i))]


_FLOYD = {}


def floyd_cache(space):
    key = id(space)
    if key not in _FLOYD:
        _FLOYD[key] = (space, floyd(space))
    return _FLOYD[key][1]


@pytest.fixture
def rng():
    return random.Random(12345)


# -- acceptance summary --------------------------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
