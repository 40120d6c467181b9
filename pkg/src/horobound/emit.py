"""Text emitters: DOT and GraphML for graphs, CSV for matrices."""
from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .metric import Space

__all__ = ["to_dot", "to_graphml", "vertex_attributes", "edge_kinds"]


def vertex_attributes(obj) -> tuple[Space, dict, dict]:
    """The space of ``obj`` with per-vertex and per-edge attribute maps.

    Vertices get ``lattice`` always, ``depth`` for horoballs and augmented
    spaces, ``component`` for trees of spaces.  Edges get ``kind`` in
    ``{vertical, horizontal, base}`` where depth is known.
    """
    space = getattr(obj, "space", obj)
    depth = {}
    comp = {}
    if hasattr(obj, "depth") and hasattr(obj, "vid"):  # horoball
        depth = {space.vertices[i]: int(d) for i, d in enumerate(obj.depth)}
    z = getattr(obj, "z", None) or (obj if hasattr(obj, "members") else None)
    if z is not None:
        comp = {space.vertices[i]: "|".join(m) for i, m in enumerate(z.members)}
        hb = getattr(obj, "horoballs", {})
        for k in z.K:
            h = hb.get(k)
            if h is None:
                for v in z.components[k].vertices:
                    depth.setdefault(z.gid(k, v), 0)
            else:
                for i, v in enumerate(h.space.vertices):
                    depth[z.gid(k, v)] = int(h.depth[i])
    vattr = {}
    for v in space.vertices:
        a = {"lattice": str(space.in_lattice(v)).lower()}
        if depth:
            a["depth"] = str(depth.get(v, 0))
        if comp:
            a["component"] = comp[v]
        vattr[v] = a
    eattr = {}
    for u, v, w in space.edges:
        a = {"length": str(w)}
        if depth:
            a["kind"] = edge_kinds(depth.get(u, 0), depth.get(v, 0))
        eattr[(u, v)] = a
    return space, vattr, eattr


def edge_kinds(du: int, dv: int) -> str:
    if du != dv:
        return "vertical"
    return "base" if du == 0 else "horizontal"


def _dot_id(x) -> str:
    return '"' + str(x).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(obj) -> str:
    space, vattr, eattr = vertex_attributes(obj)
    lines = [f"graph {_dot_id(space.name)} {{"]
    for v in space.vertices:
        attrs = ", ".join(f"{k}={_dot_id(x)}" for k, x in vattr[v].items())
        lines.append(f"  {_dot_id(v)} [{attrs}];")
    for (u, v), a in eattr.items():
        attrs = ", ".join(f"{k}={_dot_id(x)}" for k, x in a.items())
        lines.append(f"  {_dot_id(u)} -- {_dot_id(v)} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_graphml(obj) -> str:
    space, vattr, eattr = vertex_attributes(obj)
    vkeys = sorted({k for a in vattr.values() for k in a})
    ekeys = sorted({k for a in eattr.values() for k in a})
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
    ]
    for k in vkeys:
        out.append(f'  <key id="v_{k}" for="node" attr.name="{k}" attr.type="string"/>')
    for k in ekeys:
        out.append(f'  <key id="e_{k}" for="edge" attr.name="{k}" attr.type="string"/>')
    out.append(f'  <graph id={quoteattr(str(space.name))} edgedefault="undirected">')
    for v in space.vertices:
        out.append(f"    <node id={quoteattr(str(v))}>")
        for k, x in vattr[v].items():
            out.append(f'      <data key="v_{k}">{escape(x)}</data>')
        out.append("    </node>")
    for (u, v), a in eattr.items():
        out.append(f"    <edge source={quoteattr(str(u))} target={quoteattr(str(v))}>")
        for k, x in a.items():
            out.append(f'      <data key="e_{k}">{escape(x)}</data>')
        out.append("    </edge>")
    out += ["  </graph>", "</graphml>"]
    return "\n".join(out) + "\n"
