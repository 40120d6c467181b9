"""Boundary of an augmented free product, approximated at a finite radius.

Run with ``python demos/free_product_boundary.py``.  Glues copies of a
three-point path into a tree of spaces, caps every component with a
horoball, and prints the partition tree of frontier rays, its zero-dimensional
certificate and the retraction onto the root component.
"""
from __future__ import annotations

from horobound import (
    augment,
    build_boundary,
    free_product,
    partition_tree,
    retraction_check,
    zero_dim_certificate,
)
from horobound.fixtures import HERE
from horobound.metric import load_space

X = load_space(str(HERE / "path3.json"))
z = free_product(X, X, 3)
print(f"free product to word depth 3: {len(z.K)} components, {z.space.n} vertices")

a = augment(z, 0, 6)
sp = a.space
R = sp.eccentricity(sp.basepoint) - 1
B = build_boundary(a, sp.basepoint, R)
print(f"augmented: {sp.n} vertices; {len(B.rays)} rays at radius {R}")

tree = partition_tree(B, int(R))
print("blocks per level:", tree.block_counts())
print("newick:", tree.to_newick())

cert = zero_dim_certificate(tree)
print("order per level:", cert.order)
splits = {k: v for k, v in cert.splitting.items() if v is not None}
print("levels until each multi-ray block splits:", splits)

rep = retraction_check(a, "X", R)
print(f"retraction onto X: identity inside {rep.identity}, constant per exit {rep.constant}, "
      f"modulus constant {rep.modulus['constant']}")
