"""Curve graphs of the marked torus, explored inside a weight-bounded vertex set.

Vertex sets are infinite, so every graph here is the induced subgraph on
classes of total normal weight at most ``weight_bound`` (query endpoints are
always admitted).  Distances found this way are exact for that subgraph and
upper bounds for the full graph.  The closed torus is the exception: its curve
graph is the Farey graph, where geodesics run through the continued-fraction
ladder and distances are computed exactly.

Gromov products and four-point deficiencies are half-integers; they are kept
as doubled integers internally and exposed as Fractions.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from pathlib import Path

from .arrangements import (Arrangement, CapacityExceeded, PolygonalRealization, choose_bigon_punctures, combine,
                           perturb_transverse)
from .curves import (CurveClass, MatchingViolation, NotConnected, NullClass, algebraic_intersection,
                     intersection_number, is_surviving, normal_class, primitive, slope_class, slope_weights, trace)
from .surfaces import SurfaceSpec, Triangulation, make_surface


@dataclass(frozen=True)
class GraphKind:
    name: str  # "curve", "surviving" or "dagger"

    @staticmethod
    def curve() -> "GraphKind":
        return GraphKind("curve")

    @staticmethod
    def surviving() -> "GraphKind":
        return GraphKind("surviving")

    @staticmethod
    def dagger() -> "GraphKind":
        return GraphKind("dagger")

    def admits(self, c: CurveClass) -> bool:
        if c.is_peripheral:
            return False
        return self.name == "curve" or is_surviving(c)


CURVE = GraphKind.curve()
SURVIVING = GraphKind.surviving()
DAGGER = GraphKind.dagger()


class Unresolved:
    """Distance beyond the explored ball; ``lower`` holds the certified bound within it."""

    def __init__(self, lower: int):
        self.lower = lower

    def __repr__(self):
        return f"Unresolved(>= {self.lower})"

    def __eq__(self, other):
        return isinstance(other, Unresolved) and other.lower == self.lower

    def __hash__(self):
        return hash(("unresolved", self.lower))


@dataclass
class DistanceResult:
    value: int | None
    explored_radius: int
    weight_bound: int | None
    witness_path: list | None = None
    certified: str = "truncated"  # "exact" for the Farey oracle
    detail: dict = field(default_factory=dict)

    @property
    def resolved(self) -> bool:
        return self.value is not None

    @property
    def lower_bound(self) -> int:
        return self.value if self.value is not None else self.explored_radius + 1

    def to_json(self) -> dict:
        return {"value": self.value, "resolved": self.resolved, "lower_bound": self.lower_bound,
                "explored_radius": self.explored_radius, "weight_bound": self.weight_bound,
                "bound_kind": self.certified,
                "witness_path": None if self.witness_path is None else [_vertex_json(v) for v in self.witness_path],
                **self.detail}


def _vertex_json(v):
    return list(v.weights) if isinstance(v, CurveClass) else list(v)


# --- Farey graph -------------------------------------------------------------------

def _sl2_to_infinity(a) -> tuple[tuple[int, int], tuple[int, int]]:
    """Matrix sending the primitive vector a to (1, 0)."""
    p, q = a
    # find r, s with p s - q r = 1
    r, s = _bezout(p, q)
    # [[p, r],[q, s]] sends (1,0) to (p,q); invert it
    return ((s, -r), (-q, p))


def _bezout(p: int, q: int) -> tuple[int, int]:
    old_r, r = p, q
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_s, s = s, old_s - k * s
        old_t, t = t, old_t - k * t
    # p*old_s + q*old_t = old_r = ±1; want p*s' - q*r' = 1
    sign = 1 if old_r == 1 else -1
    return -old_t * sign, old_s * sign


def _ladder(x: int, y: int) -> list[tuple[int, int]]:
    """Vertices of the Farey ladder from 1/0 to x/y (y > 0)."""
    cf = []
    a, b = x, y
    while b:
        cf.append(a // b)
        a, b = b, a - (a // b) * b
    out = {(1, 0)}
    pm, qm = 1, 0
    p, q = cf[0], 1
    out.add((p, q))
    for ak in cf[1:]:
        for j in range(1, ak + 1):
            out.add((j * p + pm, j * q + qm))
        pm, qm, p, q = p, q, ak * p + pm, ak * q + qm
    return sorted(out)


def farey_path(a, b) -> list[tuple[int, int]]:
    """A geodesic between two slopes of the closed torus."""
    a, b = primitive(a), primitive(b)
    m = _sl2_to_infinity(a)
    x, y = m[0][0] * b[0] + m[0][1] * b[1], m[1][0] * b[0] + m[1][1] * b[1]
    if y < 0:
        x, y = -x, -y
    if y == 0:
        return [a]
    verts = _ladder(x, y)
    start, goal = (1, 0), (x, y)
    prev = {start: None}
    dq = deque([start])
    while dq:
        u = dq.popleft()
        if u == goal:
            break
        for v in verts:
            if v not in prev and abs(u[0] * v[1] - u[1] * v[0]) == 1:
                prev[v] = u
                dq.append(v)
    path = []
    u = goal
    while u is not None:
        path.append(u)
        u = prev[u]
    path.reverse()
    inv = ((m[1][1], -m[0][1]), (-m[1][0], m[0][0]))
    return [primitive((inv[0][0] * u + inv[0][1] * v, inv[1][0] * u + inv[1][1] * v)) for u, v in path]


def farey_distance(a, b) -> int:
    return len(farey_path(a, b)) - 1


# --- weight-bounded vertex stores -----------------------------------------------------

def enumerate_classes(surface: SurfaceSpec, weight_bound: int, kind: GraphKind = CURVE) -> list[CurveClass]:
    """All vertices of ``kind`` with total normal weight at most ``weight_bound``, in a fixed order."""
    tri = surface.triangulation
    order = []
    for t in range(tri.n_triangles):
        for e, _ in tri.triangles[t]:
            if e not in order:
                order.append(e)
    done_at = {}
    for t in range(tri.n_triangles):
        last = max(order.index(e) for e, _ in tri.triangles[t])
        done_at.setdefault(last, []).append(t)
    w = [0] * tri.n_edges
    found = []

    def ok(t):
        a, b, c = (w[e] for e, _ in tri.triangles[t])
        s = a + b + c
        return s % 2 == 0 and 2 * max(a, b, c) <= s

    def rec(i, left):
        if i == len(order):
            if any(w) and len(trace(tri, w)) == 1:
                found.append(tuple(w))
            return
        e = order[i]
        for x in range(left + 1):
            w[e] = x
            if all(ok(t) for t in done_at.get(i, ())):
                rec(i + 1, left - x)
        w[e] = 0

    rec(0, weight_bound)
    found.sort(key=lambda v: (sum(v), v))
    out = []
    for v in found:
        try:
            c = normal_class(surface, v)
        except (NullClass, NotConnected, MatchingViolation):
            continue
        if kind.admits(c):
            out.append(c)
    return out


def _adjacent(a: CurveClass, b: CurveClass) -> bool:
    if a.weights == b.weights:
        return False
    if algebraic_intersection(a, b) > 1:
        return False
    return intersection_number(a, b) <= 1


_CACHE_DIR: Path | None = None
_STORES: dict = {}


def set_cache_dir(path) -> None:
    """Persist adjacency stores under ``path`` (None disables persistence)."""
    global _CACHE_DIR
    _CACHE_DIR = Path(path) if path else None
    if _CACHE_DIR:
        _CACHE_DIR.mkdir(parents=True, exist_ok=True)


def cache_dir_from_env() -> Path | None:
    p = os.environ.get("CURVELAB_CACHE_DIR")
    return Path(p) if p else None


def surface_key(surface: SurfaceSpec) -> str:
    blob = surface.triangulation.to_json() + json.dumps(list(surface.vertex_marked))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


class GraphStore:
    """Induced subgraph of a curve graph on the classes of weight ≤ bound."""

    def __init__(self, surface: SurfaceSpec, kind: GraphKind, weight_bound: int):
        self.surface = surface
        self.kind = kind
        self.weight_bound = weight_bound
        self.key = f"{surface_key(surface)}-{kind.name}-{weight_bound}"
        self.vertices = enumerate_classes(surface, weight_bound, kind)
        self.index = {v.weights: i for i, v in enumerate(self.vertices)}
        self.adj = self._load() or self._build()
        self._bfs: dict[int, dict[int, int]] = {}

    def _build(self) -> list[list[int]]:
        n = len(self.vertices)
        adj = [[] for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if _adjacent(self.vertices[i], self.vertices[j]):
                    adj[i].append(j)
                    adj[j].append(i)
        self._save(adj)
        return adj

    def _path(self) -> Path | None:
        return _CACHE_DIR / f"{self.key}.json" if _CACHE_DIR else None

    def _load(self):
        p = self._path()
        if p is None or not p.exists():
            return None
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError:
            return None
        if [list(v.weights) for v in self.vertices] != data.get("vertices") or _checksum(data) != data.get("checksum"):
            return None
        return data["adjacency"]

    def _save(self, adj) -> None:
        p = self._path()
        if p is None:
            return
        data = {"surface": json.loads(self.surface.triangulation.to_json()), "kind": self.kind.name,
                "vertex_marked": list(self.surface.vertex_marked),
                "weight_bound": self.weight_bound, "vertices": [list(v.weights) for v in self.vertices],
                "adjacency": adj}
        data["checksum"] = _checksum(data)
        p.write_text(json.dumps(data, sort_keys=True))

    def neighbors_of(self, c: CurveClass) -> list[int]:
        i = self.index.get(c.weights)
        if i is not None:
            return self.adj[i]
        return [j for j, v in enumerate(self.vertices) if _adjacent(c, v)]

    def bfs_from(self, i: int) -> dict[int, int]:
        if i not in self._bfs:
            dist = {i: 0}
            dq = deque([i])
            while dq:
                u = dq.popleft()
                for v in self.adj[u]:
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        dq.append(v)
            self._bfs[i] = dist
        return self._bfs[i]


def _checksum(data: dict) -> str:
    blob = json.dumps({"vertices": data.get("vertices"), "adjacency": data.get("adjacency")}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def cache_entries(path) -> list[Path]:
    return sorted(Path(path).glob("*-*-*.json"))


def inspect_cache(path) -> list[dict]:
    out = []
    for f in cache_entries(path):
        try:
            data = json.loads(f.read_text())
            out.append({"key": f.stem, "kind": data.get("kind"), "weight_bound": data.get("weight_bound"),
                        "vertices": len(data.get("vertices", [])),
                        "edges": sum(len(a) for a in data.get("adjacency", [])) // 2})
        except (json.JSONDecodeError, TypeError):
            out.append({"key": f.stem, "error": "unreadable"})
    return out


def clear_cache(path) -> int:
    entries = cache_entries(path)
    for f in entries:
        f.unlink()
    return len(entries)


def verify_cache(path, fraction: float = 0.01, seed: int = 0) -> list[dict]:
    """Checksums of every entry plus recomputation of a sampled fraction of vertex pairs."""
    from .surfaces import surface_from_triangulation
    from dataclasses import replace
    bad = []
    rng = random.Random(seed)
    for f in cache_entries(path):
        try:
            data = json.loads(f.read_text())
        except json.JSONDecodeError:
            bad.append({"key": f.stem, "reason": "unreadable"})
            continue
        if _checksum(data) != data.get("checksum"):
            bad.append({"key": f.stem, "reason": "checksum mismatch"})
            continue
        tri = Triangulation.from_json(json.dumps(data["surface"]))
        surface = replace(surface_from_triangulation(tri), vertex_marked=tuple(data["vertex_marked"]))
        verts = [CurveClass(surface, tuple(w)) for w in data["vertices"]]
        n = len(verts)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for i, j in rng.sample(pairs, max(1, int(len(pairs) * fraction))) if pairs else []:
            if _adjacent(verts[i], verts[j]) != (j in data["adjacency"][i]):
                bad.append({"key": f.stem, "reason": f"adjacency of {i},{j} differs"})
                break
    return bad


def store(surface: SurfaceSpec, kind: GraphKind, weight_bound: int) -> GraphStore:
    key = (surface_key(surface), kind.name, weight_bound)
    if key not in _STORES:
        _STORES[key] = GraphStore(surface, kind, weight_bound)
    return _STORES[key]


def clear_memory_cache() -> None:
    _STORES.clear()


# --- queries -----------------------------------------------------------------------------

def neighbors(a: CurveClass, kind: GraphKind, weight_bound: int) -> list[CurveClass]:
    if a.surface.is_closed:
        out = []
        for c in _slopes(weight_bound):
            if c != a.slope and abs(a.slope[0] * c[1] - a.slope[1] * c[0]) <= 1:
                out.append(slope_class(a.surface, *c))
        return out
    st = store(a.surface, kind, weight_bound)
    return [st.vertices[j] for j in st.neighbors_of(a)]


def _slopes(weight_bound: int) -> list[tuple[int, int]]:
    out = []
    for p in range(0, weight_bound + 1):
        for q in range(-weight_bound, weight_bound + 1):
            if gcd(p, q) == 1 and (p > 0 or q > 0) and sum(slope_weights(p, q)) <= weight_bound:
                out.append((p, q))
    return out


def distance(a: CurveClass, b: CurveClass, kind: GraphKind = SURVIVING, radius_cap: int = 4,
             weight_bound: int = 12) -> DistanceResult:
    if kind.name == "dagger":
        raise ValueError("use dagger_distance for actual curves")
    if a.tri != b.tri:
        raise ValueError("classes live on different surfaces")
    if a.surface.is_closed:
        path = farey_path(a.slope, b.slope)
        d = len(path) - 1
        if d > radius_cap:
            return DistanceResult(None, radius_cap, None, certified="exact")
        return DistanceResult(d, d, None, [slope_class(a.surface, *s) for s in path], certified="exact")
    for c in (a, b):
        if not kind.admits(c):
            raise ValueError(f"{c} is not a vertex of the {kind.name} graph")
    if a.weights == b.weights:
        return DistanceResult(0, 0, weight_bound, [a])
    if _adjacent(a, b):
        return DistanceResult(1, 1, weight_bound, [a, b])
    st = store(a.surface, kind, weight_bound)
    src = st.neighbors_of(a)
    ia, ib = st.index.get(a.weights), st.index.get(b.weights)
    dst = set(st.neighbors_of(b))
    # BFS over the store, from a's neighbours (distance 1) towards b's neighbours
    prev = {j: None for j in src}
    layer = list(src)
    depth = 1
    while layer:
        hit = [j for j in layer if j in dst or j == ib]
        if hit:
            j = ib if ib in hit else min(hit)
            path = []
            u = j
            while u is not None:
                path.append(st.vertices[u])
                u = prev[u]
            path.reverse()
            path = [a] + path
            if j != ib:
                path.append(b)
            d = len(path) - 1
            if d <= radius_cap:
                return DistanceResult(d, d, weight_bound, path)
            return DistanceResult(None, radius_cap, weight_bound)
        if depth + 1 >= radius_cap:
            return DistanceResult(None, radius_cap, weight_bound)
        nxt = []
        for u in layer:
            for v in st.adj[u]:
                if v not in prev and v != ia:
                    prev[v] = u
                    nxt.append(v)
        layer = sorted(nxt)
        depth += 1
    # component exhausted without reaching b
    return DistanceResult(None, depth, weight_bound, detail={"component_exhausted": True})


def gromov_product(x: CurveClass, y: CurveClass, w: CurveClass, kind: GraphKind = SURVIVING,
                   radius_cap: int = 4, weight_bound: int = 12):
    ds = [distance(w, x, kind, radius_cap, weight_bound), distance(w, y, kind, radius_cap, weight_bound),
          distance(x, y, kind, radius_cap, weight_bound)]
    if not all(d.resolved for d in ds):
        return Unresolved(0)
    return Fraction(ds[0].value + ds[1].value - ds[2].value, 2)


@dataclass
class DeltaReport:
    kind: str
    quadruples: int
    resolved: int
    worst_doubled: int
    witnesses: list
    weight_bound: int | None
    skipped: int = 0

    @property
    def worst(self) -> Fraction:
        return Fraction(self.worst_doubled, 2)

    def to_json(self) -> dict:
        return {"kind": self.kind, "quadruples": self.quadruples, "resolved": self.resolved,
                "unresolved": self.quadruples - self.resolved, "worst_deficiency": str(self.worst),
                "weight_bound": self.weight_bound, "bound_kind": "empirical",
                "capacity_skipped": self.skipped, "witnesses": self.witnesses}


def deficiency_doubled(d) -> int:
    """Twice the four-point deficiency of (w, x, y, z) = (0, 1, 2, 3) from a distance table."""
    def gp2(p, q):  # doubled Gromov product at w = 0
        return d[0][p] + d[0][q] - d[p][q]
    return max(0, min(gp2(1, 2), gp2(2, 3)) - gp2(1, 3))


@dataclass(frozen=True)
class SampleSpec:
    radius: int = 3
    weight_bound: int = 12
    quadruples: int = 10_000
    seed: int = 0
    center: tuple | None = None
    radius_cap: int = 8


class DistanceTable:
    """All-pairs distances inside one store (or on slopes of the closed torus)."""

    def __init__(self, surface: SurfaceSpec, kind: GraphKind, weight_bound: int):
        self.surface = surface
        if surface.is_closed:
            self.vertices = [slope_class(surface, *s) for s in sorted(_slopes(weight_bound))]
            self._st = None
        else:
            self._st = store(surface, kind, weight_bound)
            self.vertices = self._st.vertices
        self._farey: dict = {}

    def d(self, i: int, j: int) -> int | None:
        if self._st is None:
            key = (min(i, j), max(i, j))
            if key not in self._farey:
                self._farey[key] = farey_distance(self.vertices[i].slope, self.vertices[j].slope)
            return self._farey[key]
        return self._st.bfs_from(i).get(j)

    def ball(self, center: int, radius: int) -> list[int]:
        return [j for j in range(len(self.vertices)) if (x := self.d(center, j)) is not None and x <= radius]


def delta_estimate(surface: SurfaceSpec, kind: GraphKind, spec: SampleSpec) -> DeltaReport:
    table = DistanceTable(surface, kind, spec.weight_bound)
    worst, resolved, wit = 0, 0, []
    for q in _quadruples(table, spec):
        d = [[table.d(a, b) for b in q] for a in q]
        if any(x is None for row in d for x in row):
            continue
        resolved += 1
        dd = deficiency_doubled(d)
        if dd > worst:
            worst, wit = dd, []
        if dd == worst and dd > 0 and len(wit) < 5:
            wit.append([list(table.vertices[i].weights) for i in q])
    return DeltaReport(kind.name if not surface.is_closed else "curve(closed)", spec.quadruples, resolved, worst,
                       wit, spec.weight_bound)


def _quadruples(table: DistanceTable, spec: SampleSpec):
    c = 0 if spec.center is None else next(i for i, v in enumerate(table.vertices) if v.weights == tuple(spec.center))
    ball = table.ball(c, spec.radius)
    rng = random.Random(spec.seed)
    for _ in range(spec.quadruples):
        yield [rng.choice(ball) for _ in range(4)]


def dagger_delta_estimate(surface: SurfaceSpec, spec: SampleSpec, radius_cap: int = 6) -> DeltaReport:
    """Four-point deficiency of d† on the quadruples drawn by :func:`delta_estimate` with the same spec.

    Each quadruple is laid out by :func:`combine`; quadruples whose pairs need
    more punctures than the backend supports are counted as skipped.
    """
    table = DistanceTable(surface, SURVIVING, spec.weight_bound)
    memo: dict = {}
    worst, resolved, skipped, wit = 0, 0, 0, []
    for q in _quadruples(table, spec):
        ws = [table.vertices[i].weights for i in q]
        arr = None
        d = [[0] * 4 for _ in range(4)]
        try:
            for i in range(4):
                for j in range(i + 1, 4):
                    key = (ws[i], i, ws[j], j)
                    if key not in memo:
                        arr = arr or combine(surface, ws)
                        r = dagger_distance(_sub_arrangement(arr, i, j), radius_cap=radius_cap,
                                            weight_bound=spec.weight_bound)
                        memo[key] = r.value if r.resolved else None
                    d[i][j] = d[j][i] = memo[key]
        except CapacityExceeded:
            skipped += 1
            continue
        if any(x is None for row in d for x in row):
            continue
        resolved += 1
        dd = deficiency_doubled(d)
        if dd > worst:
            worst, wit = dd, []
        if dd == worst and dd > 0 and len(wit) < 5:
            wit.append([list(w) for w in ws])
    return DeltaReport("dagger", spec.quadruples, resolved, worst, wit, spec.weight_bound, skipped)


# --- dagger model ------------------------------------------------------------------------

def _as_pair(ra, rb=None) -> Arrangement:
    if isinstance(ra, Arrangement):
        return ra
    return perturb_transverse([ra, rb])


def dagger_distance(ra, rb=None, radius_cap: int = 4, weight_bound: int = 12,
                    placement: str = "first", extra: int = 0) -> DistanceResult:
    """d† between two actual curves, computed in the surviving graph rel a bigon-hitting puncture set.

    ``ra`` may be a two-curve :class:`Arrangement`, or two realizations that
    are first put in general position.  ``placement`` and ``extra`` select
    among valid puncture sets (see :func:`choose_bigon_punctures`).
    """
    cfg = _as_pair(ra, rb)
    refined = choose_bigon_punctures(cfg, placement=placement, extra=extra)
    a, b = refined.curve_class(0), refined.curve_class(1)
    detail = {"marked": list(refined.surface.marked.points), "crossings": refined.crossings(0, 1)}
    if a.weights == b.weights:
        # distinct actual curves that are isotopic rel the punctures: disjoint, hence adjacent
        return DistanceResult(1, 1, weight_bound, [a, b], detail=detail)
    res = distance(a, b, SURVIVING, radius_cap, weight_bound)
    res.detail.update(detail)
    return res


def geodesic_off_marked(a: CurveClass, b: CurveClass, radius_cap: int = 4, weight_bound: int = 12) -> list:
    """A geodesic whose vertices are classes rel the marked set, so interior curves miss it."""
    res = distance(a, b, SURVIVING, radius_cap, weight_bound)
    if not res.resolved:
        return Unresolved(res.lower_bound)
    return res.witness_path


def dagger_table(curves: list[tuple[int, ...]], surface: SurfaceSpec, radius_cap: int = 6,
                 weight_bound: int = 12):
    """Pairwise d† among curves laid out together by :func:`combine`."""
    arr = combine(surface, curves)
    n = len(curves)
    d = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            sub = _sub_arrangement(arr, i, j)
            r = dagger_distance(sub, radius_cap=radius_cap, weight_bound=weight_bound)
            d[i][j] = d[j][i] = r.value
    return d


def _sub_arrangement(arr: Arrangement, i: int, j: int) -> Arrangement:
    relabel = {i: 0, j: 1}
    layers = tuple(tuple(relabel[c] for c in lay if c in relabel) for lay in arr.layers)
    return Arrangement(arr.surface, (arr.weights[i], arr.weights[j]), layers)
