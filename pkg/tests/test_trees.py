from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import path_space, random_tree
from horobound import (
    ConvexityParams,
    GeometryError,
    Space,
    TreeOfSpaces,
    augment,
    build_tree_of_spaces,
    check_convexity,
    check_EC_transfer,
    fit_constants,
    free_product,
    space_from_edges,
    tree_geodesic,
)
from horobound.bicombing import Bicombing
from horobound.fixtures import fixture_path


def assembled_oracle(z: TreeOfSpaces):
    """Distances of the glued graph built from scratch: union-find on (k, v), then Floyd-Warshall."""
    parent = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            a = parent[a]
        return a

    for entries in z.cuts.values():
        first = entries[0]
        for e in entries[1:]:
            parent[find(e)] = find(first)
    nodes = sorted({find((k, v)) for k in z.K for v in z.components[k].vertices}, key=str)
    pos = {a: i for i, a in enumerate(nodes)}
    n = len(nodes)
    d = [[Fraction(0) if i == j else None for j in range(n)] for i in range(n)]
    for k in z.K:
        for u, v, w in z.components[k].edges:
            i, j = pos[find((k, u))], pos[find((k, v))]
            if d[i][j] is None or w < d[i][j]:
                d[i][j] = d[j][i] = Fraction(w)
    for m in range(n):
        for i in range(n):
            if d[i][m] is None:
                continue
            for j in range(n):
                if d[m][j] is not None and (d[i][j] is None or d[i][m] + d[m][j] < d[i][j]):
                    d[i][j] = d[i][m] + d[m][j]

    def dist(k1, v1, k2, v2):
        return d[pos[find((k1, v1))]][pos[find((k2, v2))]]

    return dist, n


def wedge():
    return build_tree_of_spaces(str(fixture_path("wedge")))


def test_wedge_is_doubled_path():
    z = wedge()
    assert z.space.n == 5
    assert z.space.distance(z.gid("k1", "0"), z.gid("k2", "2")) == 4
    assert z.Linterior == ["l"]


def test_star_interior():
    z = build_tree_of_spaces(str(fixture_path("star")))
    assert z.Linterior == ["l"] and z.space.n == 7


@pytest.mark.parametrize(
    "fixture, code",
    [
        ("not_bipartite", "NOT_BIPARTITE"),
        ("cut_not_in_lattice", "CUT_NOT_IN_LATTICE"),
        ("forest", "DISCONNECTED_ASSEMBLY"),
    ],
)
def test_fixture_errors(fixture, code):
    with pytest.raises(GeometryError) as e:
        build_tree_of_spaces(str(fixture_path(fixture)))
    assert e.value.code == code


def _seg(name="seg"):
    return path_space(3, name=name)


def test_cycle_in_tree_rejected():
    X = _seg()
    with pytest.raises(GeometryError) as e:
        TreeOfSpaces({"a": X, "b": X}, ["l", "m"], [("a", "l"), ("b", "l"), ("a", "m"), ("b", "m")],
                     {"l": [("a", "0"), ("b", "0")], "m": [("a", "2"), ("b", "2")]})
    assert e.value.code == "NOT_BIPARTITE"


def test_cut_must_cover_neighbours():
    X = _seg()
    with pytest.raises(GeometryError) as e:
        TreeOfSpaces({"a": X, "b": X}, ["l"], [("a", "l"), ("b", "l")], {"l": [("a", "0")]})
    assert e.value.code == "NOT_BIPARTITE"


def test_cut_vertex_missing():
    X = _seg()
    with pytest.raises(GeometryError) as e:
        TreeOfSpaces({"a": X, "b": X}, ["l"], [("a", "l"), ("b", "l")], {"l": [("a", "9"), ("b", "0")]})
    assert e.value.code == "CUT_NOT_IN_LATTICE"


def test_missing_basepoint():
    X = _seg()
    with pytest.raises(GeometryError) as e:
        TreeOfSpaces({"a": X, "b": X}, ["l"], [("a", "l"), ("b", "l")],
                     {"l": [("a", "0"), ("b", "0")]}, basepoint=("a", "7"))
    assert e.value.code == "MISSING_BASEPOINT"


def test_same_component_is_component_geodesic():
    z = wedge()
    p = tree_geodesic(z, z.gid("k2", "0"), z.gid("k2", "2"))
    assert p.length == 2
    assert p.vertices == tuple(z.gid("k2", v) for v in ("0", "1", "2"))


def test_legs_through_cut():
    X1 = path_space(4, name="X1")  # cut at 3, u at 0: distance 3
    X2 = path_space(5, name="X2")  # cut at 0, v at 4: distance 4
    z = TreeOfSpaces({"X1": X1, "X2": X2}, ["p"], [("X1", "p"), ("X2", "p")], {"p": [("X1", "3"), ("X2", "0")]})
    path = tree_geodesic(z, z.gid("X1", "0"), z.gid("X2", "4"))
    assert path.length == 7
    assert z.gid("X1", "3") in path.vertices


def test_chain_sum_of_legs():
    z = build_tree_of_spaces(str(fixture_path("chain3")))
    oracle, _ = assembled_oracle(z)
    u, v = z.gid("k1", "0"), z.gid("k3", "2")
    assert tree_geodesic(z, u, v).length == 6 == oracle("k1", "0", "k3", "2")
    with pytest.raises(GeometryError) as e:
        tree_geodesic(z, u, "nowhere")
    assert e.value.code == "UNKNOWN_VERTEX"


def random_tree_of_spaces(seed, n_comp=4, size=6):
    rng = random.Random(seed)
    comps = {}
    for i in range(n_comp):
        T = random_tree(size, seed * 31 + i, name=f"c{i}")
        if rng.random() < 0.5:
            # add a chord to leave the tree world
            a, b = rng.sample(range(size), 2)
            T = space_from_edges(T.edges + [(str(a), str(b), rng.choice([1, 2]))], basepoint="0", name=T.name)
        comps[f"c{i}"] = T
    L, edges, cuts, used = [], [], {}, set()
    for i in range(1, n_comp):
        j = rng.randrange(i)
        l = f"l{i}"
        vi = str(rng.randrange(size))
        choices = [str(v) for v in range(size) if (f"c{j}", str(v)) not in used]
        vj = rng.choice(choices)
        used |= {(f"c{i}", vi), (f"c{j}", vj)}
        L.append(l)
        edges += [(f"c{j}", l), (f"c{i}", l)]
        cuts[l] = [(f"c{j}", vj), (f"c{i}", vi)]
    return TreeOfSpaces(comps, L, edges, cuts, ("c0", "0"), name=f"rand{seed}")


@pytest.mark.parametrize("seed", range(6))
def test_tree_geodesic_is_shortest(seed):
    z = random_tree_of_spaces(seed)
    oracle, n = assembled_oracle(z)
    assert n == z.space.n
    sp = z.space
    t = z.table()
    for k1, k2 in itertools.product(z.K, repeat=2):
        for v1 in z.components[k1].vertices:
            for v2 in z.components[k2].vertices:
                u, w = sp.index[z.gid(k1, v1)], sp.index[z.gid(k2, v2)]
                p = t.path(u, w)
                length = sum(Fraction(int(sp.dist[a, b]), sp.scale) for a, b in zip(p, p[1:]))
                assert all(sp.adjacency[a, b] for a, b in zip(p, p[1:]))
                assert length == oracle(k1, v1, k2, v2) == Fraction(int(sp.dist[u, w]), sp.scale)
                assert p == z.geodesic_indices(u, w)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_restriction_and_convexity(seed):
    z = random_tree_of_spaces(seed, n_comp=3, size=5)
    sp = z.space
    for k in z.K:
        X = z.components[k]
        members = {z.gid(k, v) for v in X.vertices}
        for a, b in itertools.product(X.vertices, repeat=2):
            p = tree_geodesic(z, z.gid(k, a), z.gid(k, b))
            # restriction: the component's own selector, vertex for vertex
            assert p.vertices == tuple(z.gid(k, v) for v in X.geodesic(a, b).vertices)
            # convexity: the geodesic never leaves the component
            assert set(p.vertices) <= members
    del sp


# -- free products -----------------------------------------------------------------------


def edge():
    return space_from_edges([("0", "1", 1)], basepoint="0", name="E")


def test_free_product_depth_one():
    z = free_product(edge(), edge(), 1)
    assert len(z.K) == 1 + 2
    assert z.space.n == 2 + 2 * 2 - 2
    assert z.basepoint_pair == ("X", "0")


def test_free_product_depth_two_count():
    X = edge()
    for wd, expect in [(2, 1 + 2 + 2 * (2 - 1)), (3, 1 + 2 + 2 + 2)]:
        assert len(free_product(X, X, wd).K) == expect


def test_free_product_count_oracle():
    X = path_space(3, name="P3")
    Y = path_space(3, name="P3")
    m, r = len(X.lattice), len(Y.lattice)
    # root: m children; each later copy: (net size - 1) children
    counts = [1, m]
    for _ in range(3):
        counts.append(counts[-1] * (r - 1))
    for wd in (1, 2, 3):
        assert len(free_product(X, Y, wd).K) == sum(counts[: wd + 1])
    z = free_product(X, Y, 2)
    assert z.space.n == 21 and len(z.K) == 10


def test_free_product_single_point_is_chain():
    pt = Space(["p"], [], ["p"], "p", name="pt")
    z = free_product(pt, edge(), 4)
    assert z.K == ["X", "X/p", "X/p/1"]
    assert z.tree_path("X", "X/p/1") == ["X", "l/X/p", "X/p", "l/X/p/1", "X/p/1"]


def test_free_product_bad_depth():
    for bad in (0, -2, 1.5):
        with pytest.raises(GeometryError) as e:
            free_product(edge(), edge(), bad)
        assert e.value.code == "BAD_DEPTH"


def test_free_product_deterministic_names():
    a = free_product(path_space(3), path_space(3), 2)
    b = free_product(path_space(3), path_space(3), 2)
    assert a.K == b.K and a.space.vertices == b.space.vertices
    assert "X/1/2" in a.K and "X/0" in a.K and "X/0/0" not in a.K
    assert set(a.truncated) == {k for k in a.K if k.count("/") == 2}


# -- augmentation ------------------------------------------------------------------------


def test_augment_nothing_replaced():
    z = build_tree_of_spaces(str(fixture_path("chain3")))
    a = augment(z, len(z.K), 4)
    assert a.replaced == [] and a.space.vertices == z.space.vertices
    assert np.array_equal(a.space.dist, z.space.dist)


def test_augment_all_replaced():
    z = build_tree_of_spaces(str(fixture_path("chain3")))
    a = augment(z, 0, 3)
    assert a.replaced == z.K
    for k in z.K:
        assert len(a.center_marker(k)) == len(z.components[k].lattice)
        assert all("@3" in c for c in a.center_marker(k))


def test_augment_bad_level():
    z = wedge()
    with pytest.raises(GeometryError) as e:
        augment(z, -1, 3)
    assert e.value.code == "BAD_LEVEL"


@pytest.mark.parametrize("n", range(4))
def test_augment_shrinks_distances(n):
    z = free_product(path_space(3), path_space(3), 2)
    a = augment(z, n, 4)
    old, new = z.space, a.space
    for u in old.vertices:
        for v in old.vertices:
            assert new.distance(u, v) <= old.distance(u, v)


def test_augment_consecutive_levels_differ_in_one_component():
    z = free_product(path_space(3), path_space(3), 2)
    prev = augment(z, 0, 3)
    for n in range(1, len(z.K) + 1):
        cur = augment(z, n, 3)
        diff = set(prev.replaced) - set(cur.replaced)
        assert diff == {z.K[n - 1]} and set(cur.replaced) <= set(prev.replaced)
        prev = cur


def test_augmented_bicombing_is_geodesic_and_normal_on_horoballs():
    z = free_product(path_space(3), path_space(3), 1)
    a = augment(z, 1, 3)
    sp = a.space
    t = a.z.table()
    for u in range(sp.n):
        for v in range(sp.n):
            p = t.path(u, v)
            assert sum(int(sp.dist[x, y]) for x, y in zip(p, p[1:])) == int(sp.dist[u, v])
    from horobound import normal_geodesic

    k = a.replaced[0]
    h = a.horoballs[k]
    for x, y in itertools.product(h.space.vertices, repeat=2):
        got = tree_geodesic(a.z, a.z.gid(k, x), a.z.gid(k, y)).vertices
        assert got == tuple(a.z.gid(k, v) for v in normal_geodesic(h, x, y).vertices)


# -- E, C transfer -------------------------------------------------------------------------


def test_transfer_wedge():
    z = wedge()
    rep = check_EC_transfer(z, ConvexityParams(1, 0))
    assert rep.ok and rep.params["E"] == 3 and rep.params["C"] == 0
    assert rep.slack == 2


def test_transfer_single_component():
    X = path_space(5)
    z = TreeOfSpaces({"only": X}, [], [], {}, ("only", "0"))
    fitted = fit_constants(Bicombing(X))
    rep = check_EC_transfer(z, fitted)
    direct = check_convexity(Bicombing(X), ConvexityParams(fitted.E + 2, 6 * fitted.C))
    assert rep.ok == direct.ok and len(rep) == len(direct)


@pytest.mark.slow
def test_transfer_free_product():
    X = path_space(3)
    z = free_product(X, X, 2)
    fitted = fit_constants(Bicombing(X))
    rep = check_EC_transfer(z, {k: fitted for k in z.K})
    assert rep.ok and rep.checked == 21**4 * 125
