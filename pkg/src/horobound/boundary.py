"""Finite-resolution approximations of the ideal boundary.

Boundary points are stood in for by truncated rays: geodesics of the
bicombing from a basepoint ``e`` to the frontier vertices at distance about
``R``.  Two rays have product ``sup{t <= R : d(r1(t), r2(t)) <= D1}`` over
integer ``t``; a ray is frozen at its target once ``t`` passes its length.

Thresholding the product matrix at ``n`` and closing under chains gives a
partition of the rays (the level-``n`` blocks); the levels refine each other
and form the partition tree.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .bicombing import Bicombing, GromovConstants, derive_constants
from .errors import GeometryError
from .metric import Path, Space, parse_length

__all__ = [
    "RayApprox",
    "BoundaryApprox",
    "PartitionTree",
    "ZeroDimCertificate",
    "IsolationReport",
    "Retraction",
    "as_bicombing",
    "frontier_rays",
    "ray_product",
    "build_boundary",
    "partition_tree",
    "zero_dim_certificate",
    "isolated_centers",
    "last_exit",
    "retract",
    "continuity_modulus",
    "component_bicombing",
    "retraction_check",
    "RetractionReport",
]


def as_bicombing(host) -> Bicombing:
    """Accept a ``Bicombing``, ``Space``, tree of spaces or augmented space."""
    if isinstance(host, Bicombing):
        return host
    if isinstance(host, Space):
        return Bicombing(host)
    if hasattr(host, "bicombing"):
        return host.bicombing()
    raise TypeError(f"cannot build a bicombing from {type(host).__name__}")


@dataclass
class RayApprox:
    """Truncated ray from ``e`` toward a frontier vertex."""

    e: object
    target: object
    path: Path
    R: Fraction
    indices: np.ndarray = field(repr=False)
    arcs: np.ndarray = field(repr=False)  # scaled arclengths along ``indices``
    scale: int = field(repr=False, default=1)
    host: object = field(repr=False, default=None)

    def positions(self, T: int) -> np.ndarray:
        """Vertex index at integer arclength ``0..T``, frozen at the target."""
        out = np.empty(T + 1, dtype=np.int64)
        for t in range(T + 1):
            out[t] = self.at_index(t)
        return out

    def at_index(self, t) -> int:
        target = Fraction(t) * self.scale
        if target >= self.arcs[-1]:
            return int(self.indices[-1])
        err = np.abs(target.denominator * self.arcs - target.numerator)
        return int(self.indices[int(np.argmin(err))])

    def at(self, t):
        return self.host.host.vertices[self.at_index(t)]


def _make_ray(b: Bicombing, ie: int, iv: int, R: Fraction) -> RayApprox:
    p = b.path_indices(ie, iv)
    arcs = b._arc(p)
    sp = b.host
    return RayApprox(sp.vertices[ie], sp.vertices[iv], sp.make_path(p.tolist()), R, p, arcs, sp.scale, b)


def frontier_rays(host, e, R) -> list[RayApprox]:
    """One ray per vertex ``v`` with ``R - maxedge < d(e, v) <= R``, ordered by target id."""
    b = as_bicombing(host)
    sp = b.host
    R = parse_length(R)
    ie = sp.idx(e)
    row = sp.dist_rows([ie])[0] if sp._dist is None else sp.dist[ie]
    s = sp.scale
    hi = R * s
    lo = (R - sp.max_edge) * s
    sel = [i for i in range(sp.n) if lo < row[i] <= hi]
    if not sel:
        raise GeometryError("RADIUS_TOO_LARGE", f"no vertex within ({R - sp.max_edge}, {R}] of {e!r}")
    sel.sort(key=lambda i: str(sp.vertices[i]))
    return [_make_ray(b, ie, i, R) for i in sel]


def _check_rays(rays) -> None:
    e, R, host = rays[0].e, rays[0].R, rays[0].host
    for r in rays[1:]:
        if r.e != e or r.R != R or r.host.host is not host.host:
            raise GeometryError("BASEPOINT_MISMATCH", f"rays from {e!r}/R={R} and {r.e!r}/R={r.R}")


def _close(d, D1: Fraction, scale: int):
    return d * D1.denominator <= D1.numerator * scale


def ray_product(r1: RayApprox, r2: RayApprox, consts: GromovConstants) -> int:
    """Largest integer ``t <= R`` with ``d(r1(t), r2(t)) <= D1``."""
    _check_rays([r1, r2])
    D = r1.host.host.dist
    T = int(math.floor(r1.R))
    p, q = r1.positions(T), r2.positions(T)
    ok = np.nonzero(_close(D[p, q], consts.D1, r1.scale))[0]
    return int(ok[-1]) if len(ok) else 0


def _product_matrix(rays, consts: GromovConstants) -> np.ndarray:
    D = rays[0].host.host.dist
    s = rays[0].scale
    T = int(math.floor(rays[0].R))
    P = np.stack([r.positions(T) for r in rays])  # (r, T+1)
    out = np.zeros((len(rays), len(rays)), dtype=np.int64)
    for t in range(T + 1):
        col = P[:, t]
        close = _close(D[col[:, None], col[None, :]], consts.D1, s)
        out[close] = t
    return out


@dataclass
class BoundaryApprox:
    rays: list
    products: np.ndarray
    consts: GromovConstants
    R: Fraction

    @property
    def targets(self) -> list:
        return [r.target for r in self.rays]

    def index_of(self, target) -> int:
        return self.targets.index(target)

    def to_csv(self) -> str:
        head = "," + ",".join(str(t) for t in self.targets)
        lines = [head]
        for t, row in zip(self.targets, self.products):
            lines.append(str(t) + "," + ",".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"

    def partition_tree(self, n_max: int) -> "PartitionTree":
        return partition_tree(self, n_max)


def build_boundary(host, e, R, consts: GromovConstants | None = None, extra_targets=()) -> BoundaryApprox:
    """Frontier rays at radius ``R`` with their pairwise products.

    ``extra_targets`` appends rays to further vertices (for example horoball
    center markers), which then take part in every product and partition.
    """
    consts = consts or derive_constants(1, 0, 1, 0)
    rays = frontier_rays(host, e, R)
    b = rays[0].host
    ie = b.host.idx(e)
    known = {r.target for r in rays}
    for v in extra_targets:
        if v not in known:
            rays.append(_make_ray(b, ie, b.host.idx(v), rays[0].R))
            known.add(v)
    return BoundaryApprox(rays, _product_matrix(rays, consts), consts, rays[0].R)


# -- partition tree ---------------------------------------------------------------


@dataclass
class PartitionTree:
    """Level-``n`` blocks for ``n = 0..n_max`` with parent links."""

    labels: np.ndarray  # (n_max + 1, rays) block index per level
    targets: list

    @property
    def n_max(self) -> int:
        return self.labels.shape[0] - 1

    def blocks(self, n: int) -> list[tuple[int, ...]]:
        lab = self.labels[n]
        out = [[] for _ in range(int(lab.max()) + 1)]
        for i, b in enumerate(lab):
            out[b].append(i)
        return [tuple(b) for b in out]

    def parent(self, n: int, block: int) -> int:
        """Index of the level-``n - 1`` block containing level-``n`` block ``block``."""
        first = int(np.argmax(self.labels[n] == block))
        return int(self.labels[n - 1, first])

    def children(self, n: int, block: int) -> list[int]:
        if n >= self.n_max:
            return []
        members = self.labels[n] == block
        return sorted(set(int(x) for x in self.labels[n + 1][members]))

    def block_counts(self) -> list[int]:
        return [int(self.labels[n].max()) + 1 for n in range(self.n_max + 1)]

    def to_nested(self) -> dict:
        def node(n, b):
            out = {"level": n, "block": b, "rays": [str(self.targets[i]) for i in self.blocks(n)[b]]}
            kids = self.children(n, b)
            if kids:
                out["children"] = [node(n + 1, c) for c in kids]
            return out

        return {"levels": self.n_max, "root": [node(0, b) for b in range(self.block_counts()[0])]}

    def to_newick(self) -> str:
        def node(n, b):
            kids = self.children(n, b)
            if not kids:
                names = [_newick_label(self.targets[i]) for i in self.blocks(n)[b]]
                return names[0] if len(names) == 1 else "(" + ",".join(names) + ")"
            return "(" + ",".join(node(n + 1, c) for c in kids) + f")L{n}B{b}"

        roots = [node(0, b) for b in range(self.block_counts()[0])]
        return (roots[0] if len(roots) == 1 else "(" + ",".join(roots) + ")") + ";"

    def to_text(self) -> str:
        return json.dumps(self.to_nested(), indent=2)


def _newick_label(v) -> str:
    s = str(v)
    return "'" + s.replace("'", "''") + "'" if any(c in s for c in " ,;:()[]'") else s


def partition_tree(b: BoundaryApprox, n_max: int) -> PartitionTree:
    """Chain-closed threshold classes of the product matrix at every level ``0..n_max``."""
    if int(n_max) != n_max or n_max < 0 or n_max > b.R:
        raise GeometryError("BAD_THRESHOLD", f"n_max must be an integer in [0, {b.R}], got {n_max!r}")
    n_max = int(n_max)
    P = b.products
    labels = np.empty((n_max + 1, len(b.rays)), dtype=np.int64)
    for n in range(n_max + 1):
        _, lab = connected_components(csr_matrix(P >= n), directed=False)
        # renumber blocks by first ray
        order = {}
        labels[n] = [order.setdefault(x, len(order)) for x in lab]
    return PartitionTree(labels, b.targets)


@dataclass
class ZeroDimCertificate:
    order: list  # per level: largest number of blocks meeting at one ray
    block_counts: list
    splitting: dict  # (level, block) -> levels until it splits, or None
    safe_blocks: list
    perfect_scale: int | None
    perfect: bool
    note: str = ""

    @property
    def order_one(self) -> bool:
        return all(o == 1 for o in self.order)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "order_one": self.order_one,
            "block_counts": self.block_counts,
            "safe_blocks": [list(x) for x in self.safe_blocks],
            "splitting": {f"{n}:{b}": s for (n, b), s in sorted(self.splitting.items())},
            "perfect_scale": self.perfect_scale,
            "perfect": self.perfect,
            "note": self.note,
        }

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def zero_dim_certificate(t: PartitionTree, products: np.ndarray | None = None, safe_level=None) -> ZeroDimCertificate:
    """Order-1 check per level plus the splitting profile of multi-ray blocks.

    A block is truncation-safe when ``products`` is given and every pair of
    distinct rays in it has product at most ``safe_level``; without
    ``products`` every multi-ray block is treated as safe.
    """
    n_max = t.n_max
    order = []
    for n in range(n_max + 1):
        cover = np.zeros(len(t.targets), dtype=np.int64)
        for blk in t.blocks(n):
            cover[list(blk)] += 1
        order.append(int(cover.max()) if len(cover) else 0)
    splitting, safe = {}, []
    for n in range(n_max + 1):
        for bi, blk in enumerate(t.blocks(n)):
            if len(blk) < 2:
                continue
            s = None
            for m in range(n + 1, n_max + 1):
                if len(set(int(x) for x in t.labels[m][list(blk)])) > 1:
                    s = m - n
                    break
            splitting[(n, bi)] = s
            if products is None or safe_level is None:
                safe.append((n, bi))
            else:
                sub = products[np.ix_(blk, blk)]
                off = sub[~np.eye(len(blk), dtype=bool)]
                if off.max() <= safe_level:
                    safe.append((n, bi))
    svals = [splitting[k] for k in safe]
    perfect = bool(svals) and all(s is not None for s in svals)
    note = "" if svals else "no perfectness: no truncation-safe block with two or more rays"
    return ZeroDimCertificate(
        order, t.block_counts(), splitting, safe,
        max(svals) if perfect else None, perfect, note,
    )


# -- augmented spaces: isolated centers -----------------------------------------------


@dataclass
class IsolationReport:
    by_partition: list
    by_criterion: list
    safe: list
    n_max: int
    R: Fraction
    margin: Fraction
    radius: dict
    details: dict

    @property
    def agree(self) -> bool:
        return self.by_partition == self.by_criterion

    def to_dict(self) -> dict:
        return {
            "by_partition": self.by_partition,
            "by_criterion": self.by_criterion,
            "agree": self.agree,
            "safe": self.safe,
            "n_max": self.n_max,
            "R": str(self.R),
            "margin": str(self.margin),
            "radius": {k: str(v) for k, v in self.radius.items()},
            "details": self.details,
        }

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def entry_vertex(z, k: str) -> int:
    """Assembled index where tree geodesics from the basepoint enter component ``k``."""
    sp = z.space
    ie = sp.index[sp.basepoint]
    ki = z.K.index(k)
    if k in z.members[ie]:
        return ie
    e = int(z._exit[ki, z._node_of[ie]])
    return ie if e < 0 else e


def center_targets(a) -> dict:
    """For each horoball component: the top-layer vertex above its entry column."""
    z = a.z
    out = {}
    for k in a.replaced:
        h = a.horoballs[k]
        ent = entry_vertex(z, k)
        loc = int(z._loc[ent, z.K.index(k)])
        col = int(h.column[loc])
        if col < 0:
            base = h.base
            row = base.dist_rows([loc])[0][base.lattice_idx]
            col = int(np.argmin(row))
        out[k] = z.gid(k, h.space.vertices[int(h.vid[col, h.depth_max])])
    return out


def isolated_centers(a, R, n_max: int, consts: GromovConstants | None = None,
                     radius=None, margin=None) -> IsolationReport:
    """Two independent detectors of isolated horoball centers.

    Partition detector: the center ray of ``k`` (basepoint to the top of the
    horoball above its entry point) is isolated at level ``n_max`` when its
    block holds only rays that end inside component ``k``.

    Criterion detector: the cut points of ``k`` at interior cut nodes form a
    set of diameter at most ``radius`` in the component's own metric (half
    the lattice diameter of the component unless declared).

    Only truncation-safe components are reported: not cut off by the word
    truncation, and entered within ``R - margin`` of the basepoint.
    """
    if not hasattr(a, "replaced") or a.n != 0:
        raise GeometryError("NOT_FULLY_AUGMENTED", "isolated centers need the level-0 augmented space")
    consts = consts or derive_constants(1, 0, 1, 0)
    z = a.z
    sp = z.space
    R = parse_length(R)
    margin = consts.D1 + 5 if margin is None else parse_length(margin)
    centers = center_targets(a)
    B = build_boundary(z, sp.basepoint, R, consts, extra_targets=[centers[k] for k in a.replaced])
    tree = partition_tree(B, n_max)
    lab = tree.labels[int(n_max)]
    index = {t: i for i, t in enumerate(B.targets)}
    truncated = set(getattr(a.base, "truncated", ()))
    ie = sp.index[sp.basepoint]
    by_part, by_crit, safe, radii, details = [], [], [], {}, {}
    for k in a.replaced:
        ent = entry_vertex(z, k)
        a_k = Fraction(int(sp.dist[ie, ent]), sp.scale)
        if k in truncated or a_k > R - margin:
            continue
        safe.append(k)
        # partition detector
        ci = index[centers[k]]
        block = np.nonzero(lab == lab[ci])[0]
        own = set(int(x) for x in z.component_vertices(k))
        outsiders = [
            str(B.targets[i]) for i in block
            if i != ci and not (sp.index[B.targets[i]] in own and z.members[sp.index[B.targets[i]]] == [k])
        ]
        if not outsiders:
            by_part.append(k)
        # criterion detector
        X = a.base.components[k]
        cuts = [X.idx(v) for l in z.Linterior for kk, v in z.cuts[l] if kk == k]
        lat = X.lattice_idx
        rad = parse_length(radius) if radius is not None else Fraction(int(X.dist[np.ix_(lat, lat)].max()), X.scale) / 2
        radii[k] = rad
        diam = Fraction(int(X.dist[np.ix_(cuts, cuts)].max()), X.scale) if cuts else Fraction(0)
        if diam <= rad:
            by_crit.append(k)
        details[k] = {
            "entry_distance": str(a_k),
            "center": str(centers[k]),
            "block_outsiders": len(outsiders),
            "cut_points": len(cuts),
            "cut_diameter": str(diam),
        }
    return IsolationReport(by_part, by_crit, safe, int(n_max), R, margin, radii, details)


# -- retraction ---------------------------------------------------------------------------


def last_exit(z, ray: RayApprox, k: str) -> tuple[Fraction, object]:
    """Largest arclength at which the ray sits in component ``k``, and that vertex."""
    sp = z.space
    hits = [i for i, v in enumerate(ray.indices) if k in z.members[int(v)]]
    if not hits:
        raise GeometryError("NEVER_MEETS", f"ray to {ray.target!r} never meets component {k}")
    i = hits[-1]
    return Fraction(int(ray.arcs[i]), sp.scale), sp.vertices[int(ray.indices[i])]


@dataclass(frozen=True)
class Retraction:
    exit_t: Fraction
    exit_vertex: object
    ray: int  # index into the component boundary
    target: object
    level: int
    block: int


def _segment_product(b: Bicombing, ie: int, iv: int, ray: RayApprox, consts) -> Fraction:
    """Gromov-product of the segment ``e -> v`` with a component ray, on the integer grid."""
    sp = b.host
    s = sp.scale
    dv = Fraction(int(sp.dist[ie, iv]), s)
    top = min(dv, Fraction(int(ray.arcs[-1]), s))
    best = 0
    for t in range(int(math.floor(max(dv, ray.R))) + 1):
        if _close(sp.dist[b.reparam_index(ie, iv, t), ray.at_index(t)], consts.D1, s):
            best = t
    return min(top, Fraction(best))


def retract(z, k: str, ray: RayApprox, boundary_of_k: BoundaryApprox, level: int | None = None) -> Retraction:
    """Nearest-ray surrogate of the retraction onto the boundary of component ``k``.

    The ray is cut at its last exit from ``k``; the component ray with the
    largest product against the component geodesic to that exit point wins
    (smallest target id on ties) and its block at ``level`` is returned.
    """
    t, v = last_exit(z, ray, k)
    bk = boundary_of_k
    cb = bk.rays[0].host
    ki = z.K.index(k)
    loc = int(z._loc[z.space.idx(v), ki])
    X = cb.host
    ie = X.idx(bk.rays[0].e)
    level = int(math.floor(bk.R)) if level is None else int(level)
    tree = _tree_cache(bk, level)
    scores = [(_segment_product(cb, ie, loc, r, bk.consts), r.target) for r in bk.rays]
    best = max(sc for sc, _ in scores)
    j = min((str(tg), i) for i, (sc, tg) in enumerate(scores) if sc == best)[1]
    return Retraction(t, v, j, bk.rays[j].target, level, int(tree.labels[level, j]))


def _tree_cache(bk: BoundaryApprox, level: int) -> PartitionTree:
    cache = bk.__dict__.setdefault("_trees", {})
    if level not in cache:
        cache[level] = partition_tree(bk, level)
    return cache[level]


def continuity_modulus(B: BoundaryApprox, images: list[Retraction], boundary_of_k: BoundaryApprox) -> dict:
    """``n -> min`` component product of retracted rays over ray pairs with product ``>= n``.

    Returns the table and the smallest constant ``c`` with ``modulus(n) >= n / c``
    for every ``n >= 1`` that has pairs (``None`` if some modulus is zero).
    """
    P = B.products
    Q = boundary_of_k.products
    img = np.array([r.ray for r in images])
    top = int(P.max()) if P.size else 0
    table = {}
    const = Fraction(1)
    finite = True
    iu = np.triu_indices(len(images), k=1)
    pp = P[iu]
    qq = Q[img[iu[0]], img[iu[1]]]
    for n in range(top + 1):
        sel = pp >= n
        if not sel.any():
            break
        m = int(qq[sel].min())
        table[n] = m
        if n >= 1:
            if m == 0:
                finite = False
            else:
                const = max(const, Fraction(n, m))
    return {"modulus": table, "constant": const if finite else None}


@dataclass
class RetractionReport:
    """Retraction of every frontier ray that meets component ``k``, with its checks."""

    component: str
    R: Fraction
    component_R: Fraction
    consts: GromovConstants
    images: dict  # frontier ray index -> Retraction
    skipped: list
    identity: bool
    constant: bool
    modulus: dict | None
    boundary: BoundaryApprox = field(repr=False, default=None)
    component_boundary: BoundaryApprox = field(repr=False, default=None)

    @property
    def monotone(self) -> bool:
        if not self.modulus:
            return True
        vals = [self.modulus["modulus"][n] for n in sorted(self.modulus["modulus"])]
        return all(a <= b for a, b in zip(vals, vals[1:]))

    @property
    def ok(self) -> bool:
        return self.identity and self.constant and self.monotone

    def to_dict(self) -> dict:
        B = self.boundary
        rows = [
            {"ray": str(B.rays[i].target), "exit_t": str(im.exit_t), "exit_vertex": str(im.exit_vertex),
             "image": str(im.target), "block": im.block}
            for i, im in self.images.items()
        ]
        out = {
            "component": self.component, "R": str(self.R), "component_R": str(self.component_R),
            "constants": {k: str(v) for k, v in self.consts.as_dict().items()},
            "rows": rows, "skipped": self.skipped,
            "identity_on_component": self.identity, "constant_on_exits": self.constant,
        }
        if self.modulus is not None:
            out["modulus"] = {
                "modulus": {str(n): m for n, m in self.modulus["modulus"].items()},
                "constant": None if self.modulus["constant"] is None else str(self.modulus["constant"]),
            }
            out["modulus_monotone"] = self.monotone
        return out


def component_bicombing(obj, k: str) -> Bicombing:
    """The component's own bicombing: normal geodesics on a horoball, canonical otherwise."""
    horoballs = getattr(obj, "horoballs", {})
    if k in horoballs:
        return Bicombing.on_horoball(horoballs[k])
    z = getattr(obj, "z", obj)
    return Bicombing(z.components[k])


def retraction_check(obj, k: str, R, consts: GromovConstants | None = None, component_R=None,
                     targets=None) -> RetractionReport:
    """Retract the frontier rays of ``obj`` onto the boundary of component ``k``.

    The component boundary is taken from the point where tree geodesics
    enter ``k``, at ``component_R`` (default: that point's eccentricity
    minus one).  Checks: the identity on rays lying wholly in ``k``; one
    block per last-exit vertex; a monotone continuity modulus.
    """
    z = getattr(obj, "z", obj)
    if k not in z.K:
        raise GeometryError("UNKNOWN_VERTEX", f"no component {k!r}")
    consts = consts or derive_constants(1, 0, 1, 0)
    sp = z.space
    ki = z.K.index(k)
    cb = component_bicombing(obj, k)
    ek = cb.host.vertices[int(z._loc[entry_vertex(z, k), ki])]
    ecc = cb.host.eccentricity(ek)
    Rk = ecc - 1 if component_R is None else min(parse_length(component_R), ecc)
    bk = build_boundary(cb, ek, Rk, consts)
    B = build_boundary(z.bicombing(), sp.basepoint, R, consts)
    if targets is None:
        picks = [i for i, r in enumerate(B.rays) if any(k in z.members[int(v)] for v in r.indices)]
        skipped = [str(r.target) for r in B.rays if not any(k in z.members[int(v)] for v in r.indices)]
    else:
        picks, skipped = [], []
        for t in targets:
            if t not in B.targets:
                raise GeometryError("UNKNOWN_VERTEX", f"{t!r} is not a frontier target at radius {B.R}")
            picks.append(B.index_of(t))
    images = {i: retract(z, k, B.rays[i], bk) for i in picks}
    by_exit: dict = {}
    for im in images.values():
        by_exit.setdefault(im.exit_vertex, set()).add(im.block)
    constant = all(len(s) == 1 for s in by_exit.values())
    identity = True
    if images:
        level = next(iter(images.values())).level
        tree = _tree_cache(bk, level)
        for i, im in images.items():
            ray = B.rays[i]
            if all(k in z.members[int(v)] for v in ray.indices):
                loc = cb.host.vertices[int(z._loc[sp.idx(ray.target), ki])]
                if loc in bk.targets:
                    identity &= int(tree.labels[level, bk.index_of(loc)]) == im.block
    modulus = None
    if len(images) > 1 and targets is None:
        sub = list(images)
        Bsub = BoundaryApprox([B.rays[i] for i in sub], B.products[np.ix_(sub, sub)], consts, B.R)
        modulus = continuity_modulus(Bsub, [images[i] for i in sub], bk)
    return RetractionReport(k, B.R, Rk, consts, images, skipped, identity, constant, modulus, B, bk)
