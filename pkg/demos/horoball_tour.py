"""A walk through one combinatorial horoball.

Run with ``python demos/horoball_tour.py``.  Builds the horoball over two
lattice points at distance 4, shows how distances collapse with height,
prints a few normal-form geodesics and checks the thin-triangle bound.
"""
from __future__ import annotations

from horobound import build_horoball, lattice_space, min_diameter_triangles, normal_geodesic
from horobound.horoball import segments

# two points far apart in the base
base = lattice_space(["a", "b"], [[0, 4], [4, 0]], name="pair4")
h = build_horoball(base, 4)
print(f"horoball over {base.name}: {h.space.n} vertices, {len(h.space.edges)} edges")

# horizontal edges appear once 2**level reaches the base distance
for level in range(h.depth_max + 1):
    joined = h.space.distance(f"a@{level}", f"b@{level}")
    print(f"  level {level}: d(a@{level}, b@{level}) = {joined}")

# going up, across and down beats walking far along a low level
for x, y in [("a@0", "b@0"), ("a@0", "b@3"), ("a@1", "b@1")]:
    g = normal_geodesic(h, x, y)
    runs = [(kind, label, len(seg) - 1) for kind, label, seg in segments(h, g.vertices)]
    print(f"{x} -> {y}: length {g.length}, apex level {g.level}")
    print(f"  path  {' '.join(g.vertices)}")
    print(f"  runs  {runs}")

value, witness = min_diameter_triangles(h, return_witness=True)
print(f"largest minimal triangle diameter: {value} (triangle {witness}); bound 9")
