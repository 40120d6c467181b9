"""Command line entry point: ``horobound <command> [flags]``.

Exit status: 0 when every certificate passes, 2 when violations are found,
1 on input errors (the module error code is printed verbatim with its
location).  Reports are deterministic JSON unless another ``--format`` is
chosen; sampling always needs ``--seed``, which is echoed in the report.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bicombing as bc
from .boundary import (
    build_boundary,
    frontier_rays,
    isolated_centers,
    partition_tree,
    ray_product,
    retraction_check,
    zero_dim_certificate,
)
from .emit import to_dot, to_graphml
from .errors import GeometryError
from .fixtures import HERE as FIXTURES
from .horoball import (
    HoroballGraph,
    hausdorff_deviation,
    min_diameter_triangles,
    normal_geodesic,
)
from .metric import Space, _read_document, load_space, parse_length
from .trees import AugmentedSpace, TreeOfSpaces, augment, build_tree_of_spaces, check_EC_transfer, free_product

COMMANDS = (
    "validate", "horoball", "geodesic", "hyperbolicity", "convexity", "gromov",
    "assemble", "freeproduct", "augment", "boundary", "retract", "certify",
)
FORMATS = ("text", "dot", "graphml", "csv", "newick")


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    output: str | None = None
    fmt: str = "text"
    depth_max: int | None = None
    glued: bool = False
    radius: Fraction | None = None
    n_max: int | None = None
    margin: Fraction | None = None
    word_depth: int | None = None
    level: int = 0
    lam: Fraction = Fraction(1)
    k: Fraction = Fraction(0)
    E: Fraction | None = None
    C: Fraction | None = None
    fit: bool = False
    seed: int | None = None
    sample: int | None = None
    all: bool = False
    bound: Fraction = Fraction(9)
    source: str | None = None
    target: str | None = None
    compare: str | None = None
    triple: str | None = None
    component: str | None = None
    base2: str | None = None
    isolated: bool = False
    cut_radius: Fraction | None = None

    def check(self) -> None:
        if self.sample is not None and self.seed is None:
            raise GeometryError("BAD_CONFIG", "--sample needs --seed")
        if self.sample is not None and self.all:
            raise GeometryError("BAD_CONFIG", "--sample and --all are exclusive")
        if self.fmt not in FORMATS:
            raise GeometryError("BAD_CONFIG", f"unknown format {self.fmt!r}")

    @property
    def tuples(self):
        return self.sample if self.sample is not None else "all"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="horobound", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", action="append", default=[], help="document path or bundled fixture name; repeat for two factors")
    p.add_argument("--output")
    p.add_argument("--format", dest="fmt", default="text", choices=FORMATS)
    p.add_argument("--depth-max", type=int)
    p.add_argument("--glued", action="store_true", help="metric horoball (glued to the base) instead of combinatorial")
    p.add_argument("--radius")
    p.add_argument("--n-max", type=int)
    p.add_argument("--margin")
    p.add_argument("--word-depth", type=int)
    p.add_argument("--level", type=int, default=0, help="augmentation level n")
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--k", default="0")
    p.add_argument("--E")
    p.add_argument("--C")
    p.add_argument("--fit", action="store_true", help="fit (E, C) on the tuples instead of taking --E/--C")
    p.add_argument("--seed", type=int)
    p.add_argument("--sample", type=int)
    p.add_argument("--all", action="store_true")
    p.add_argument("--bound", default="9")
    p.add_argument("--from", dest="source")
    p.add_argument("--to", dest="target")
    p.add_argument("--compare", help="comma separated path to compare with the selected geodesic")
    p.add_argument("--triple", help="e,x,y for a single Gromov product")
    p.add_argument("--component")
    p.add_argument("--base2", help="second basepoint for a cross ray product")
    p.add_argument("--isolated", action="store_true", help="run the isolated-center detectors")
    p.add_argument("--cut-radius", help="declared radius for the bounded-cut criterion")
    return p


def _frac(v):
    return None if v is None else parse_length(v)


def config_from_args(argv=None) -> RunConfig:
    a = build_parser().parse_args(argv)
    cfg = RunConfig(
        a.command, a.input, a.output, a.fmt, a.depth_max, a.glued, _frac(a.radius), a.n_max,
        _frac(a.margin), a.word_depth, a.level, _frac(a.lam), _frac(a.k), _frac(a.E), _frac(a.C),
        a.fit, a.seed, a.sample, a.all, _frac(a.bound), a.source, a.target, a.compare, a.triple,
        a.component, a.base2, a.isolated, _frac(a.cut_radius),
    )
    cfg.check()
    return cfg


# -- inputs ---------------------------------------------------------------------


def resolve(path: str) -> str:
    p = Path(path)
    if p.exists():
        return str(p)
    f = FIXTURES / (path if path.endswith(".json") else f"{path}.json")
    if f.exists():
        return str(f)
    raise GeometryError("BAD_INPUT", f"no such file or bundled fixture: {path}")


def load_inputs(cfg: RunConfig):
    """A ``Space``, a ``TreeOfSpaces`` (tree document or two factors), per the inputs."""
    if not cfg.inputs:
        raise GeometryError("BAD_INPUT", "--input is required")
    paths = [resolve(p) for p in cfg.inputs]
    if len(paths) == 2:
        X, Y = load_space(paths[0]), load_space(paths[1])
        return free_product(X, Y, cfg.word_depth if cfg.word_depth is not None else 1)
    if len(paths) > 2:
        raise GeometryError("BAD_INPUT", "at most two --input documents")
    doc, _ = _read_document(paths[0])
    if isinstance(doc, dict) and "components" in doc:
        return build_tree_of_spaces(paths[0])
    return load_space(paths[0])


def load_host(cfg: RunConfig):
    obj = load_inputs(cfg)
    if cfg.depth_max is not None:
        if isinstance(obj, TreeOfSpaces):
            return augment(obj, cfg.level, cfg.depth_max)
        return HoroballGraph(obj, cfg.depth_max, glued=cfg.glued)
    return obj


def space_of(obj) -> Space:
    return obj if isinstance(obj, Space) else obj.space


def bicombing_of(obj) -> bc.Bicombing:
    if isinstance(obj, HoroballGraph):
        return bc.Bicombing.on_horoball(obj)
    if isinstance(obj, Space):
        return bc.Bicombing(obj)
    return obj.bicombing()


def _s(x) -> str:
    return str(x)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_s) + "\n"


def graph_output(cfg: RunConfig, obj, report: dict) -> str:
    if cfg.fmt == "dot":
        return to_dot(obj)
    if cfg.fmt == "graphml":
        return to_graphml(obj)
    return dumps(report)


def describe(obj) -> dict:
    sp = space_of(obj)
    out = {
        "name": sp.name,
        "vertices": sp.n,
        "edges": len(sp.edges),
        "lattice": len(sp.lattice),
        "basepoint": sp.basepoint,
        "max_edge": sp.max_edge,
    }
    if isinstance(obj, HoroballGraph):
        out.update(kind="metric horoball" if obj.glued else "combinatorial horoball", depth_max=obj.depth_max,
                   sufficient_depth=obj.sufficient_depth,
                   horizontal_edges={l: len(e) for l, e in obj.horizontal_edges.items()},
                   vertical_edges=len(obj.vertical_edges))
    elif isinstance(obj, AugmentedSpace):
        out.update(kind="augmented space", level=obj.n, depth_max=obj.depth_max,
                   components=list(obj.z.K), replaced=obj.replaced)
    elif isinstance(obj, TreeOfSpaces):
        out.update(kind="tree of spaces", components=list(obj.K), L=list(obj.L), Linterior=list(obj.Linterior))
        if obj.truncated:
            out["truncated"] = list(obj.truncated)
    else:
        out["kind"] = "space"
    return out


# -- commands -------------------------------------------------------------------------


def cmd_validate(cfg):
    obj = load_host(cfg)
    space_of(obj).dist
    return graph_output(cfg, obj, {"valid": True, **describe(obj)}), 0


def cmd_horoball(cfg):
    if cfg.depth_max is None:
        raise GeometryError("DEPTH_TOO_SMALL", "--depth-max is required")
    obj = load_inputs(cfg)
    if isinstance(obj, TreeOfSpaces):
        raise GeometryError("BAD_INPUT", "horoball takes a single space")
    h = HoroballGraph(obj, cfg.depth_max, glued=cfg.glued)
    return graph_output(cfg, h, describe(h)), 0


def _path_text(p) -> dict:
    return {"vertices": list(p.vertices), "length": p.length}


def cmd_geodesic(cfg):
    obj = load_host(cfg)
    sp = space_of(obj)
    u = cfg.source if cfg.source is not None else sp.basepoint
    v = cfg.target if cfg.target is not None else sp.vertices[-1]
    sp.idx(u), sp.idx(v)
    rep = {"from": u, "to": v, "distance": sp.distance(u, v)}
    if isinstance(obj, HoroballGraph):
        ng = normal_geodesic(obj, u, v)
        rep.update(normal={"lead": ng.lead, "up": ng.up, "across": ng.across, "down": ng.down,
                           "tail": ng.tail, "level": ng.level, "length": ng.length,
                           "horizontal_edges": ng.horizontal_edges},
                   bfs=_path_text(sp.geodesic(u, v)))
        chosen = ng.path
    else:
        chosen = bicombing_of(obj).path(u, v)
        rep["path"] = _path_text(chosen)
    status = 0
    if cfg.compare:
        other = [x.strip() for x in cfg.compare.split(",")]
        other_path = sp.make_path([sp.idx(x) for x in other])
        dev = hausdorff_deviation(sp, other_path, chosen)
        rep["compare"] = {"path": other, "hausdorff": dev}
    return dumps(rep), status


def _triples(cfg, n):
    if cfg.sample is None:
        return "all"
    if cfg.sample <= 0:
        raise GeometryError("EMPTY_SAMPLE", "sample size must be positive")
    rng = np.random.default_rng(cfg.seed)
    return [tuple(int(x) for x in row) for row in rng.integers(0, n, size=(cfg.sample, 3))]


def cmd_hyperbolicity(cfg):
    obj = load_host(cfg)
    if isinstance(obj, (TreeOfSpaces, AugmentedSpace)):
        obj = obj.space
    sp = space_of(obj)
    value, witness = min_diameter_triangles(obj, _triples(cfg, sp.n), return_witness=True)
    ok = value <= cfg.bound
    rep = {"host": sp.name, "vertices": sp.n, "triples": "all" if cfg.sample is None else cfg.sample,
           "seed": cfg.seed, "max_min_diameter": value, "witness": list(witness), "bound": cfg.bound, "pass": ok}
    return dumps(rep), 0 if ok else 2


def _params(cfg, b) -> bc.ConvexityParams:
    if cfg.fit:
        return bc.fit_constants(b, cfg.tuples, seed=cfg.seed)
    return bc.ConvexityParams(cfg.E if cfg.E is not None else 1, cfg.C if cfg.C is not None else 0)


def cmd_convexity(cfg):
    obj = load_host(cfg)
    b = bicombing_of(obj)
    params = _params(cfg, b)
    rep = bc.check_convexity(b, params, cfg.tuples, seed=cfg.seed)
    return rep.to_text() + "\n", rep.exit_status


def _consts(cfg, b):
    if cfg.fit:
        p = bc.fit_constants(b, cfg.tuples, seed=cfg.seed)
        E, C = p.E, p.C
    else:
        E = cfg.E if cfg.E is not None else 1
        C = cfg.C if cfg.C is not None else 0
    return bc.derive_constants(cfg.lam, cfg.k, E, C)


def cmd_gromov(cfg):
    obj = load_host(cfg)
    b = bicombing_of(obj)
    consts = _consts(cfg, b)
    out = {"constants": consts.as_dict()}
    status = 0
    if cfg.triple:
        e, x, y = [t.strip() for t in cfg.triple.split(",")]
        out["product"] = bc.gromov_product(b, consts, e, x, y)
        low = bc.check_gprod_lower_bound(b, consts, [(e, x, y)])
        out["lower_bound"] = low.to_dict()
        status = low.exit_status
    else:
        qu = bc.check_quasi_ultrametric(b, consts, cfg.tuples, seed=cfg.seed)
        low = bc.check_gprod_lower_bound(b, consts)
        out["quasi_ultrametric"] = qu.to_dict()
        out["lower_bound"] = low.to_dict()
        status = max(qu.exit_status, low.exit_status)
    return dumps(out), status


def cmd_assemble(cfg):
    obj = load_inputs(cfg)
    if not isinstance(obj, TreeOfSpaces):
        raise GeometryError("NOT_BIPARTITE", "assemble needs a tree-of-spaces document")
    return graph_output(cfg, obj, describe(obj)), 0


def cmd_freeproduct(cfg):
    if len(cfg.inputs) != 2:
        raise GeometryError("BAD_INPUT", "freeproduct needs two --input spaces")
    if cfg.word_depth is None:
        raise GeometryError("BAD_DEPTH", "--word-depth is required")
    obj = load_inputs(cfg)
    return graph_output(cfg, obj, describe(obj)), 0


def cmd_augment(cfg):
    obj = load_inputs(cfg)
    if not isinstance(obj, TreeOfSpaces):
        raise GeometryError("BAD_INPUT", "augment needs a tree of spaces or two factors")
    if cfg.depth_max is None:
        raise GeometryError("DEPTH_TOO_SMALL", "--depth-max is required")
    a = augment(obj, cfg.level, cfg.depth_max)
    rep = describe(a)
    rep["centers"] = {k: v for k, v in a.centers.items()}
    return graph_output(cfg, a, rep), 0


def _radius(cfg, sp) -> Fraction:
    return cfg.radius if cfg.radius is not None else sp.eccentricity(sp.basepoint) - 1


def cmd_boundary(cfg):
    obj = load_host(cfg)
    b = bicombing_of(obj)
    sp = b.host
    consts = _consts(cfg, b)
    R = _radius(cfg, sp)
    margin = consts.D1 + 5 if cfg.margin is None else cfg.margin
    if cfg.base2 is not None:
        r1 = frontier_rays(b, sp.basepoint, R)[0]
        r2 = frontier_rays(b, cfg.base2, R)[0]
        return dumps({"product": ray_product(r1, r2, consts)}), 0
    if cfg.isolated:
        if not isinstance(obj, AugmentedSpace):
            raise GeometryError("NOT_FULLY_AUGMENTED", "isolated centers need an augmented space (--depth-max)")
        n_max = cfg.n_max if cfg.n_max is not None else max(0, math.floor(R - margin))
        rep = isolated_centers(obj, R, n_max, consts, radius=cfg.cut_radius, margin=margin)
        return rep.to_text() + "\n", 0 if rep.agree else 2
    B = build_boundary(b, sp.basepoint, R, consts)
    n_max = cfg.n_max if cfg.n_max is not None else math.floor(R)
    tree = partition_tree(B, n_max)
    if cfg.fmt == "csv":
        return B.to_csv(), 0
    if cfg.fmt == "newick":
        return tree.to_newick() + "\n", 0
    cert = zero_dim_certificate(tree, B.products, R - margin)
    ok = cert.order_one and (cert.perfect or not cert.safe_blocks) and (
        cert.perfect_scale is None or cert.perfect_scale <= 2 * consts.D1)
    rep = {"constants": consts.as_dict(), "R": R, "margin": margin, "rays": [str(t) for t in B.targets],
           "partition": tree.to_nested(), "certificate": cert.to_dict(), "pass": ok}
    return dumps(rep), 0 if ok else 2


def cmd_retract(cfg):
    obj = load_host(cfg)
    if not isinstance(obj, (TreeOfSpaces, AugmentedSpace)):
        raise GeometryError("BAD_INPUT", "retract needs a tree of spaces")
    z = obj.z if isinstance(obj, AugmentedSpace) else obj
    sp = z.space
    k = cfg.component or z.basepoint_pair[0]
    consts = _consts(cfg, z.bicombing())
    R = _radius(cfg, sp)
    targets = None if cfg.target is None else [cfg.target]
    rep = retraction_check(obj, k, R, consts, component_R=cfg.radius, targets=targets)
    return dumps(rep.to_dict()), 0 if rep.ok else 2


def cmd_certify(cfg):
    obj = load_host(cfg)
    b = bicombing_of(obj)
    sp = b.host
    checks = {}
    status = 0

    def record(name, passed, detail):
        nonlocal status
        checks[name] = {"pass": bool(passed), **detail}
        if not passed:
            status = 2

    if isinstance(obj, HoroballGraph):
        exact = bool(np.array_equal(b.arcs()[:, :, -1], sp.dist))
        across = max(normal_geodesic(obj, u, v).horizontal_edges for u in range(sp.n) for v in range(sp.n))
        record("normal_geodesic", exact and across <= 5, {"max_horizontal_edges": across})
        hv = min_diameter_triangles(obj, _triples(cfg, sp.n))
        record("hyperbolicity", hv <= cfg.bound, {"value": hv, "bound": cfg.bound})
    if isinstance(obj, (TreeOfSpaces, AugmentedSpace)) and not isinstance(obj, AugmentedSpace):
        fitted = {k: bc.fit_constants(bc.Bicombing(obj.components[k])) for k in obj.K}
        rep = check_EC_transfer(obj, fitted, cfg.tuples, seed=cfg.seed)
        record("ec_transfer", rep.ok, {"violations": len(rep), "checked": rep.checked,
                                        "params": {k2: str(v) for k2, v in rep.params.items()}})
    params = _params(cfg, b) if (cfg.fit or cfg.E is not None or cfg.C is not None) else \
        bc.fit_constants(b, cfg.tuples, seed=cfg.seed)
    conv = bc.check_convexity(b, params, cfg.tuples, seed=cfg.seed)
    record("convexity", conv.ok, {"E": params.E, "C": params.C, "violations": len(conv), "checked": conv.checked})
    consts = bc.derive_constants(cfg.lam, cfg.k, params.E, params.C)
    qu = bc.check_quasi_ultrametric(b, consts, cfg.tuples, seed=cfg.seed)
    record("quasi_ultrametric", qu.ok, {"D2": consts.D2, "violations": len(qu), "checked": qu.checked})
    low = bc.check_gprod_lower_bound(b, consts)
    record("gprod_lower_bound", low.ok, {"violations": len(low), "checked": low.checked})
    out = {"host": sp.name, "vertices": sp.n, "seed": cfg.seed,
           "tuples": "all" if cfg.sample is None else cfg.sample, "checks": checks}
    return dumps(out), status


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def run(cfg: RunConfig) -> int:
    text, status = HANDLERS[cfg.command](cfg)
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return status


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: BAD_INPUT: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
