"""Geodesic bicombings on finite spaces: convexity checks, Gromov products, constants.

A bicombing here is a deterministic choice of geodesic for every ordered
pair of vertices.  ``eval(x, y, t)`` reads the selected path at parameter
``t`` in ``[0, 1]``: it returns the path vertex whose arclength from ``x``
is closest to ``t * d(x, y)``, the earlier vertex on ties.

All inequality checks are exact: lengths are scaled integers (see
``metric``), the constants are ``Fraction`` and the comparisons are
cross-multiplied integer comparisons.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import GeometryError
from .metric import Path, Space, parse_length
from .paths import PathTable, next_hop_table

__all__ = [
    "Bicombing",
    "ConvexityParams",
    "GromovConstants",
    "ViolationReport",
    "DEFAULT_GRID",
    "derive_constants",
    "reparametrize",
    "check_convexity",
    "fit_constants",
    "gromov_product",
    "gromov_products",
    "check_quasi_ultrametric",
    "check_gprod_lower_bound",
    "sample_tuples",
]

DEFAULT_GRID = tuple(Fraction(i, 4) for i in range(5))


@dataclass(frozen=True)
class ConvexityParams:
    E: Fraction
    C: Fraction

    def __post_init__(self):
        E, C = parse_length(self.E), parse_length(self.C)
        if E < 1 or C < 0:
            raise GeometryError("BAD_PARAMS", f"need E >= 1 and C >= 0, got E={E}, C={C}")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "C", C)


@dataclass(frozen=True)
class GromovConstants:
    lam: Fraction
    k: Fraction
    E: Fraction
    C: Fraction
    k1: Fraction
    D: Fraction
    D1: Fraction
    D2: Fraction

    def as_dict(self) -> dict:
        return {f: str(getattr(self, f)) for f in ("lam", "k", "E", "C", "k1", "D", "D1", "D2")}


def derive_constants(lam=1, k=0, E=1, C=0) -> GromovConstants:
    """``k1 = lam + k``, ``D = 2(1+E)k1 + C``, ``D1 = 2D + 2``, ``D2 = E(D1 + 2 k1)``."""
    try:
        lam, k, E, C = (parse_length(v) for v in (lam, k, E, C))
    except (ValueError, ZeroDivisionError) as exc:
        raise GeometryError("BAD_PARAMS", str(exc))
    if lam < 1 or k < 0 or E < 1 or C < 0:
        raise GeometryError("BAD_PARAMS", f"need lambda>=1, k>=0, E>=1, C>=0; got {lam}, {k}, {E}, {C}")
    k1 = lam + k
    D = 2 * (1 + E) * k1 + C
    D1 = 2 * D + 2
    D2 = E * (D1 + 2 * k1)
    return GromovConstants(lam, k, E, C, k1, D, D1, D2)


class Bicombing:
    """A host space plus a geodesic selector ``(i, j) -> [vertex indices]``.

    The default selector is the canonical (lexicographically smallest)
    geodesic of the host.  ``table`` materialises the selector for every pair
    and is what the vectorised checks consume.
    """

    def __init__(self, host: Space, selector: Callable[[int, int], Sequence[int]] | None = None,
                 table: Callable[[], PathTable] | None = None, name: str | None = None):
        self.host = host
        self.name = name or host.name
        self._selector = selector or host.geodesic_indices
        self._table_fn = table if table is not None else (
            (lambda: next_hop_table(host.next_hop)) if selector is None else None
        )
        self._paths: dict[tuple[int, int], np.ndarray] = {}
        self._table: PathTable | None = None
        self._arcs: np.ndarray | None = None

    @classmethod
    def on_horoball(cls, h) -> "Bicombing":
        """Normal geodesics of a horoball as the bicombing."""
        from .horoball import normal_geodesic, normal_table

        space = h.space

        def sel(i, j):
            return [space.index[v] for v in normal_geodesic(h, i, j).vertices]

        return cls(space, sel, table=lambda: normal_table(h), name=space.name)

    # -- single pair ----------------------------------------------------------

    def path_indices(self, i: int, j: int) -> np.ndarray:
        key = (i, j)
        p = self._paths.get(key)
        if p is None:
            if self._table is not None:
                p = np.asarray(self._table.path(i, j), dtype=np.int64)
            else:
                p = np.asarray(self._selector(i, j), dtype=np.int64)
            self._paths[key] = p
        return p

    def path(self, x, y) -> Path:
        return self.host.make_path(self.path_indices(self.host.idx(x), self.host.idx(y)).tolist())

    def _arc(self, p: np.ndarray) -> np.ndarray:
        D = self.host.dist
        return np.concatenate([[0], np.cumsum(D[p[:-1], p[1:]])]) if len(p) > 1 else np.zeros(1, dtype=np.int64)

    def eval_index(self, i: int, j: int, t: Fraction) -> int:
        t = Fraction(t)
        p = self.path_indices(i, j)
        arc = self._arc(p)
        d = int(arc[-1])
        err = np.abs(t.denominator * arc - t.numerator * d)
        return int(p[int(np.argmin(err))])

    def eval(self, x, y, t) -> object:
        t = parse_length(t)
        if not 0 <= t <= 1:
            raise ValueError(f"t must lie in [0, 1], got {t}")
        return self.host.vertices[self.eval_index(self.host.idx(x), self.host.idx(y), t)]

    def reparam_index(self, i: int, j: int, s: Fraction) -> int:
        """Vertex at arclength ``min(s, d(i, j))`` along the selected path."""
        p = self.path_indices(i, j)
        arc = self._arc(p)
        target = Fraction(s) * self.host.scale
        if target >= arc[-1]:
            return int(p[-1])
        err = np.abs(target.denominator * arc - target.numerator)
        return int(p[int(np.argmin(err))])

    # -- all pairs ------------------------------------------------------------

    def table(self) -> PathTable:
        if self._table is None:
            if self._table_fn is not None:
                self._table = self._table_fn()
            else:
                self._table = _loop_table(self.host.n, self._selector)
        return self._table

    def arcs(self) -> np.ndarray:
        """Scaled arclength of every padded path position."""
        if self._arcs is None:
            V = self.table().verts
            D = self.host.dist
            steps = D[V[:, :, :-1], V[:, :, 1:]]
            self._arcs = np.concatenate([np.zeros(V.shape[:2] + (1,), dtype=np.int64),
                                         np.cumsum(steps, axis=2)], axis=2)
        return self._arcs

    def eval_table(self, t: Fraction) -> np.ndarray:
        """``(n, n)`` array of ``eval(i, j, t)`` for every pair."""
        t = Fraction(t)
        arcs = self.arcs()
        V = self.table().verts
        d = arcs[:, :, -1:]
        err = np.abs(t.denominator * arcs - t.numerator * d)
        k = np.argmin(err, axis=2)
        return np.take_along_axis(V, k[:, :, None], axis=2)[:, :, 0]


def _loop_table(n: int, selector) -> PathTable:
    rows = {(i, j): list(selector(i, j)) for i in range(n) for j in range(n)}
    K = max(len(p) for p in rows.values())
    verts = np.empty((n, n, K), dtype=np.int32)
    count = np.empty((n, n), dtype=np.int32)
    for (i, j), p in rows.items():
        verts[i, j, : len(p)] = p
        verts[i, j, len(p):] = p[-1]
        count[i, j] = len(p)
    return PathTable(verts, count)


def reparametrize(b: Bicombing, x, y, t) -> object:
    """Point at arclength ``t`` along the selected geodesic, ``y`` once ``t >= d(x, y)``."""
    t = parse_length(t)
    if t < 0:
        raise ValueError("t must be nonnegative")
    return b.host.vertices[b.reparam_index(b.host.idx(x), b.host.idx(y), t)]


# -- reports -------------------------------------------------------------------


@dataclass
class ViolationReport:
    """Outcome of an inequality check over a set of tuples."""

    check: str
    params: dict
    slack: Fraction
    checked: int
    columns: tuple
    rows: list = field(default_factory=list)
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return not self.rows

    @property
    def exit_status(self) -> int:
        return 0 if self.ok else 2

    def __len__(self) -> int:
        return len(self.rows)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "params": {k: str(v) for k, v in self.params.items()},
            "slack": str(self.slack),
            "seed": self.seed,
            "checked": self.checked,
            "violations": len(self.rows),
            "columns": list(self.columns),
            "rows": [[str(v) for v in row] for row in self.rows],
        }

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def sample_tuples(n: int, arity: int, quadruples, seed: int | None) -> tuple[np.ndarray, int | None]:
    """Expand ``"all"``, an explicit list, or a sample size into an index array."""
    if isinstance(quadruples, str):
        if quadruples.lower() != "all":
            raise GeometryError("EMPTY_SAMPLE", f"unknown tuple selector {quadruples!r}")
        grids = np.meshgrid(*[np.arange(n)] * arity, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1), None
    if isinstance(quadruples, (int, np.integer)):
        if quadruples <= 0:
            raise GeometryError("EMPTY_SAMPLE", "sample size must be positive")
        if seed is None:
            raise GeometryError("EMPTY_SAMPLE", "a seed is required when sampling")
        rng = np.random.default_rng(seed)
        return rng.integers(0, n, size=(int(quadruples), arity)), seed
    arr = np.asarray(quadruples, dtype=np.int64)
    if arr.size == 0:
        raise GeometryError("EMPTY_SAMPLE", "no tuples given")
    return arr.reshape(-1, arity), None


def _index_tuples(b: Bicombing, tuples, arity: int, seed):
    if not isinstance(tuples, (str, int, np.integer, np.ndarray)):
        tuples = [[t if isinstance(t, (int, np.integer)) else b.host.idx(t) for t in row] for row in tuples]
    return sample_tuples(b.host.n, arity, tuples, seed)


def _grid(c_grid) -> list[Fraction]:
    g = sorted({parse_length(c) for c in c_grid})
    if not g:
        raise GeometryError("EMPTY_SAMPLE", "empty parameter grid")
    if g[0] < 0 or g[-1] > 1:
        raise ValueError("grid values must lie in [0, 1]")
    return g


def _convexity_terms(b: Bicombing, Q: np.ndarray, grid: list[Fraction], chunk: int = 4096):
    """Yield ``(rows, a, bb, c, lhs, d12, dprime)`` blocks over all grid triples.

    ``lhs = d(eval(x1,y1,ca), eval(x2,y2,cb))``, ``d12 = d(x1,x2)`` and
    ``dprime = d(eval(x1,y1,a), eval(x2,y2,b))``; all scaled integers.
    """
    D = b.host.dist
    tabs = {}
    for t in set(grid) | {c * a for c in grid for a in grid}:
        tabs[t] = b.eval_table(t)
    for start in range(0, len(Q), chunk):
        q = Q[start:start + chunk]
        x1, x2, y1, y2 = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
        d12 = D[x1, x2]
        for a in grid:
            p1 = tabs[a][x1, y1]
            for bb in grid:
                p2 = tabs[bb][x2, y2]
                dprime = D[p1, p2]
                for c in grid:
                    lhs = D[tabs[c * a][x1, y1], tabs[c * bb][x2, y2]]
                    yield start, a, bb, c, lhs, d12, dprime


def check_convexity(
    b: Bicombing,
    params: ConvexityParams,
    quadruples="all",
    c_grid: Iterable = DEFAULT_GRID,
    seed: int | None = None,
    slack=None,
    max_rows: int | None = None,
) -> ViolationReport:
    """Check ``d(g(x1,y1,ca), g(x2,y2,cb)) <= (1-c)E d(x1,x2) + cE d(y1',y2') + C + slack``.

    ``y1' = g(x1,y1,a)``, ``y2' = g(x2,y2,b)`` and ``a, b, c`` range over
    ``c_grid``.  The default slack is two maximal edge lengths, one for each
    quantised evaluation on the left.
    """
    Q, seed = _index_tuples(b, quadruples, 4, seed)
    grid = _grid(c_grid)
    host = b.host
    sl = 2 * host.max_edge if slack is None else parse_length(slack)
    E, C = params.E, params.C
    Cs = C * host.scale + sl * host.scale  # scaled, rational
    rows = []
    for start, a, bb, c, lhs, d12, dp in _convexity_terms(b, Q, grid):
        den = c.denominator * E.denominator * Cs.denominator
        left = lhs * den
        right = (
            (c.denominator - c.numerator) * E.numerator * d12 * (den // (c.denominator * E.denominator))
            + c.numerator * E.numerator * dp * (den // (c.denominator * E.denominator))
            + Cs.numerator * (den // Cs.denominator)
        )
        bad = np.nonzero(left > right)[0]
        for i in bad:
            if max_rows is not None and len(rows) >= max_rows:
                break
            x1, x2, y1, y2 = (host.vertices[v] for v in Q[start + i])
            rhs = (1 - c) * E * Fraction(int(d12[i]), host.scale) + c * E * Fraction(int(dp[i]), host.scale) + C + sl
            rows.append((x1, x2, y1, y2, a, bb, c, Fraction(int(lhs[i]), host.scale), rhs))
    return ViolationReport(
        "convexity",
        {"E": E, "C": C, "host": host.name, "grid": ",".join(map(str, grid))},
        sl,
        len(Q) * len(grid) ** 3,
        ("x1", "x2", "y1", "y2", "a", "b", "c", "lhs", "rhs"),
        rows,
        seed,
    )


def default_E_grid(E_max=4) -> list[Fraction]:
    E_max = parse_length(E_max)
    out, e = [], Fraction(1)
    while e <= E_max:
        out.append(e)
        e += Fraction(1, 2)
    return out


def fit_constants(
    b: Bicombing,
    quadruples="all",
    c_grid: Iterable = DEFAULT_GRID,
    E_grid: Iterable | None = None,
    seed: int | None = None,
    slack=None,
) -> ConvexityParams:
    """Smallest certified ``C`` for each ``E`` on the grid; returns the pair with least ``D2``.

    For a fixed ``E`` the smallest ``C`` passing ``check_convexity`` on the
    sample is the largest excess of the left side over the ``C``-free right
    side, so it is computed directly instead of searched for.  Across the
    ``E`` grid the pair minimising the quasi-ultrametric constant ``D2`` of
    ``derive_constants(1, 0, E, C)`` is returned, the smaller ``E`` on ties.
    """
    Q, seed = _index_tuples(b, quadruples, 4, seed)
    grid = _grid(c_grid)
    Es = default_E_grid() if E_grid is None else sorted(parse_length(e) for e in E_grid)
    host = b.host
    sl = 2 * host.max_edge if slack is None else parse_length(slack)
    sls = sl * host.scale
    worst = {E: Fraction(0) for E in Es}
    for _, a, bb, c, lhs, d12, dp in _convexity_terms(b, Q, grid):
        for E in Es:
            den = c.denominator * E.denominator * sls.denominator
            num = (
                lhs * den
                - (c.denominator - c.numerator) * E.numerator * d12 * (den // (c.denominator * E.denominator))
                - c.numerator * E.numerator * dp * (den // (c.denominator * E.denominator))
                - sls.numerator * (den // sls.denominator)
            )
            top = int(num.max())
            if top > 0:
                worst[E] = max(worst[E], Fraction(top, den * host.scale))
    best = min(Es, key=lambda E: (derive_constants(1, 0, E, worst[E]).D2, E))
    return ConvexityParams(best, worst[best])


# -- Gromov products -------------------------------------------------------------


def _ray_positions(b: Bicombing, e: int, T: int) -> np.ndarray:
    """``P[x, t]`` = reparametrised point at integer arclength ``t`` toward ``x``."""
    n = b.host.n
    P = np.empty((n, T + 1), dtype=np.int64)
    for x in range(n):
        for t in range(T + 1):
            P[x, t] = b.reparam_index(e, x, t)
    return P


def _close(dist: np.ndarray, D1: Fraction, scale: int) -> np.ndarray:
    return dist * D1.denominator <= D1.numerator * scale


def gromov_product(b: Bicombing, consts: GromovConstants, e, x, y) -> Fraction:
    """``min{d(e,x), d(e,y), sup t : d(g(e,x,t), g(e,y,t)) <= D1}`` on the integer grid.

    ``t`` runs over ``0, 1, 2, ...`` together with ``min(d(e,x), d(e,y))``;
    past ``max(d(e,x), d(e,y))`` both points are frozen, so if they end
    ``D1``-close the supremum is infinite and the product is the clamp.
    """
    host = b.host
    ie, ix, iy = host.idx(e), host.idx(x), host.idx(y)
    D = host.dist
    s = host.scale
    dx, dy = Fraction(int(D[ie, ix]), s), Fraction(int(D[ie, iy]), s)
    m = min(dx, dy)
    if _close(np.array(D[ix, iy]), consts.D1, s):
        return m
    best = Fraction(0)
    for t in range(0, int(max(dx, dy)) + 1):
        if t > m:
            break
        if _close(np.array(D[b.reparam_index(ie, ix, t), b.reparam_index(ie, iy, t)]), consts.D1, s):
            best = Fraction(t)
    if _close(np.array(D[b.reparam_index(ie, ix, m), b.reparam_index(ie, iy, m)]), consts.D1, s):
        best = m
    return min(m, best)


def gromov_products(b: Bicombing, consts: GromovConstants, e) -> np.ndarray:
    """Scaled integer matrix of ``(x | y)_e`` over all vertex pairs."""
    host = b.host
    ie = host.idx(e)
    D = host.dist
    s = host.scale
    de = D[ie]
    n = host.n
    T = int(de.max()) // s
    P = _ray_positions(b, ie, T)
    close = _close(D[P[:, None, :], P[None, :, :]], consts.D1, s)  # (n, n, T+1)
    m = np.minimum(de[:, None], de[None, :])  # scaled
    tgrid = np.arange(T + 1) * s
    valid = close & (tgrid[None, None, :] <= m[:, :, None])
    last = np.where(valid.any(axis=2), (T - np.argmax(valid[:, :, ::-1], axis=2)) * s, 0)
    # clamp point t = m
    at_m = np.empty((n, n), dtype=bool)
    for x in range(n):
        for y in range(n):
            mm = Fraction(int(m[x, y]), s)
            at_m[x, y] = D[b.reparam_index(ie, x, mm), b.reparam_index(ie, y, mm)] * consts.D1.denominator \
                <= consts.D1.numerator * s
    final = _close(D, consts.D1, s)
    out = np.where(at_m | final, m, np.minimum(last, m))
    return out


def check_quasi_ultrametric(
    b: Bicombing, consts: GromovConstants, triples="all", e=None, slack=1, seed=None
) -> ViolationReport:
    """Check ``(x|z) >= min{(x|y), (y|z)} / D2 - slack`` for every triple."""
    host = b.host
    e = host.basepoint if e is None else e
    Tr, seed = _index_tuples(b, triples, 3, seed)
    G = gromov_products(b, consts, e)
    s = host.scale
    sl = parse_length(slack)
    D2 = consts.D2
    x, y, z = Tr[:, 0], Tr[:, 1], Tr[:, 2]
    lo = np.minimum(G[x, y], G[y, z])
    # G[x,z] >= lo / D2 - sl  <=>  G[x,z]*D2n*sl.den >= lo*D2d*sl.den - sl.num*s*D2n
    left = G[x, z] * D2.numerator * sl.denominator
    right = lo * D2.denominator * sl.denominator - sl.numerator * s * D2.numerator
    rows = []
    for i in np.nonzero(left < right)[0]:
        rows.append((
            host.vertices[x[i]], host.vertices[y[i]], host.vertices[z[i]],
            Fraction(int(G[x[i], z[i]]), s), Fraction(int(lo[i]), s) / D2 - sl,
        ))
    return ViolationReport(
        "quasi_ultrametric",
        {"D2": D2, "D1": consts.D1, "e": e, "host": host.name},
        sl, len(Tr), ("x", "y", "z", "(x|z)", "min/D2 - slack"), rows, seed,
    )


def check_gprod_lower_bound(
    b: Bicombing, consts: GromovConstants, triples="all", e=None, slack=1, seed=None
) -> ViolationReport:
    """Check ``(x|y)_e >= min{d(e,x), d(e,y)} / (2 E d(x,y)) - slack``.

    ``triples`` are ``(e, x, y)``; with ``"all"`` the basepoint ``e`` (or
    the host basepoint) is combined with every pair ``x != y``.
    """
    host = b.host
    s = host.scale
    D = host.dist
    if isinstance(triples, str):
        ie = host.idx(host.basepoint if e is None else e)
        pairs, _ = sample_tuples(host.n, 2, "all", None)
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        Tr = np.column_stack([np.full(len(pairs), ie), pairs])
    else:
        Tr, seed = _index_tuples(b, triples, 3, seed)
    if np.any(Tr[:, 1] == Tr[:, 2]):
        raise GeometryError("DIVISION_BY_ZERO", "x = y in a sampled triple")
    sl = parse_length(slack)
    E = consts.E
    rows = []
    cache: dict[int, np.ndarray] = {}
    for ie, ix, iy in Tr:
        ie, ix, iy = int(ie), int(ix), int(iy)
        if ie not in cache:
            cache[ie] = gromov_products(b, consts, host.vertices[ie])
        g = Fraction(int(cache[ie][ix, iy]), s)
        bound = Fraction(int(min(D[ie, ix], D[ie, iy])), s) / (2 * E * Fraction(int(D[ix, iy]), s))
        if g < bound - sl:
            rows.append((host.vertices[ie], host.vertices[ix], host.vertices[iy], g, bound))
    return ViolationReport(
        "gprod_lower_bound", {"E": E, "D1": consts.D1, "host": host.name},
        sl, len(Tr), ("e", "x", "y", "(x|y)_e", "bound"), rows, seed,
    )
