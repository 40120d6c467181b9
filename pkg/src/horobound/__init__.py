"""Horoballs, coarsely convex bicombings, trees of spaces and finite boundary approximations.

Everything works on finite weighted graphs with exact rational lengths.
"""
from __future__ import annotations

from .bicombing import (
    Bicombing,
    ConvexityParams,
    GromovConstants,
    ViolationReport,
    check_convexity,
    check_gprod_lower_bound,
    check_quasi_ultrametric,
    derive_constants,
    fit_constants,
    gromov_product,
    gromov_products,
    reparametrize,
)
from .boundary import (
    BoundaryApprox,
    PartitionTree,
    RayApprox,
    build_boundary,
    continuity_modulus,
    frontier_rays,
    isolated_centers,
    last_exit,
    partition_tree,
    ray_product,
    retract,
    retraction_check,
    zero_dim_certificate,
)
from .emit import to_dot, to_graphml
from .errors import GeometryError
from .horoball import (
    HoroballGraph,
    NormalGeodesic,
    build_horoball,
    hausdorff_deviation,
    lattice_space,
    min_diameter_triangles,
    normal_geodesic,
    normal_table,
)
from .metric import Path, Space, distance, geodesic, load_space, space_from_edges
from .trees import (
    AugmentedSpace,
    TreeOfSpaces,
    augment,
    build_tree_of_spaces,
    check_EC_transfer,
    free_product,
    tree_geodesic,
)

__version__ = "0.1.0"
