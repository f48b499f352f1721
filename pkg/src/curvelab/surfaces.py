"""Torus surfaces with marked points and their model triangulations.

A triangulation is stored as an edge list (tail, head) plus, for every
triangle, its three sides in counter-clockwise order.  Side ``k`` of a
triangle runs from corner ``k`` to corner ``k + 1``; its sign is ``+1`` when
the edge is traversed tail-to-head along that direction.  Every triangle also
carries planar coordinates for its corners in the universal cover so that
homology classes can be read off from edge gluings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

MAX_MARKED = 4


class UnsupportedBackend(ValueError):
    pass


Point = tuple[Fraction, Fraction]


def _pt(x, y) -> Point:
    return (Fraction(x), Fraction(y))


def _add(p: Point, q: Point) -> Point:
    return (p[0] + q[0], p[1] + q[1])


def _sub(p: Point, q: Point) -> Point:
    return (p[0] - q[0], p[1] - q[1])


def _mid(p: Point, q: Point) -> Point:
    return ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)


@dataclass(frozen=True)
class Triangulation:
    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    triangles: tuple[tuple[tuple[int, int], ...], ...]
    coords: tuple[tuple[Point, Point, Point], ...]
    sides_of_edge: tuple[tuple[tuple[int, int], ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sides = [[] for _ in self.edges]
        for t, tri in enumerate(self.triangles):
            for k, (e, _) in enumerate(tri):
                sides[e].append((t, k))
        object.__setattr__(self, "sides_of_edge", tuple(tuple(s) for s in sides))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def corner(self, t: int, k: int) -> int:
        """Vertex at corner ``k`` of triangle ``t``."""
        e, s = self.triangles[t][k % 3]
        tail, head = self.edges[e]
        return tail if s > 0 else head

    def other_side(self, t: int, k: int) -> tuple[int, int]:
        e = self.triangles[t][k][0]
        a, b = self.sides_of_edge[e]
        return b if a == (t, k) else a

    def gluing(self, t: int, k: int) -> tuple[Fraction, Fraction]:
        """Translation carrying the neighbour across side (t, k) onto this copy."""
        t2, k2 = self.other_side(t, k)
        p = self.coords[t][k]
        # the neighbour traverses the shared edge in the opposite direction
        q = self.coords[t2][(k2 + 1) % 3]
        return _sub(p, q)

    def degree(self, v: int) -> int:
        return sum((a == v) + (b == v) for a, b in self.edges)

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_triangles

    def to_json(self) -> str:
        return json.dumps({
            "n_vertices": self.n_vertices,
            "edges": [list(e) for e in self.edges],
            "triangles": [[list(s) for s in tri] for tri in self.triangles],
            "coords": [[[str(c) for c in p] for p in tri] for tri in self.coords],
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Triangulation":
        d = json.loads(text)
        return cls(
            n_vertices=d["n_vertices"],
            edges=tuple(tuple(e) for e in d["edges"]),
            triangles=tuple(tuple(tuple(s) for s in tri) for tri in d["triangles"]),
            coords=tuple(tuple(_pt(*(Fraction(c) for c in p)) for p in tri) for tri in d["coords"]),
        )


@dataclass(frozen=True)
class MarkedSet:
    """Puncture identifiers bound to triangulation vertices (by index)."""

    points: tuple[str, ...]
    positions: tuple[Point, ...] = ()

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def index(self, name: str) -> int:
        return self.points.index(name)


@dataclass(frozen=True)
class SurfaceSpec:
    genus: int
    marked: MarkedSet
    triangulation: Triangulation
    # n = 0 reuses the one-vertex model with its vertex unmarked
    vertex_marked: tuple[bool, ...]

    def __post_init__(self):
        if self.genus != 1:
            raise UnsupportedBackend(f"genus {self.genus} backend not available; only the torus is implemented")

    @property
    def n_marked(self) -> int:
        return len(self.marked)

    @property
    def is_closed(self) -> bool:
        return not any(self.vertex_marked)


def one_vertex_torus() -> Triangulation:
    o, x, y, xy = _pt(0, 0), _pt(1, 0), _pt(0, 1), _pt(1, 1)
    return Triangulation(
        n_vertices=1,
        edges=((0, 0), (0, 0), (0, 0)),
        triangles=(((0, 1), (1, 1), (2, -1)), ((2, 1), (0, -1), (1, -1))),
        coords=((o, x, xy), (o, xy, y)),
    )


def split_edge(tri: Triangulation, e: int) -> tuple[Triangulation, dict]:
    """Insert a new vertex in the interior of edge ``e``.

    Returns the refined triangulation and a record describing how new edges and
    triangles sit over the old ones.  The old edge keeps id ``e`` for its tail
    half; the head half and one new edge per adjacent triangle are appended.
    """
    v = tri.n_vertices
    tail, head = tri.edges[e]
    edges = list(tri.edges)
    edges[e] = (tail, v)
    eb = len(edges)
    edges.append((v, head))
    triangles = [list(t) for t in tri.triangles]
    coords = [list(c) for c in tri.coords]
    parent_tri = list(range(tri.n_triangles))
    new_edges = []
    for t, k in tri.sides_of_edge[e]:
        sign = tri.triangles[t][k][1]
        A, B, C = coords[t][k], coords[t][(k + 1) % 3], coords[t][(k + 2) % 3]
        M = _mid(A, B)
        s_next = tri.triangles[t][(k + 1) % 3]
        s_prev = tri.triangles[t][(k + 2) % 3]
        g = len(edges)
        edges.append((v, tri.corner(t, k + 2)))
        new_edges.append(g)
        first, second = ((e, 1), (eb, 1)) if sign > 0 else ((eb, -1), (e, -1))
        # (A, M, C) replaces t, (M, B, C) is appended
        triangles[t] = [first, (g, 1), s_prev]
        coords[t] = [A, M, C]
        triangles.append([second, s_next, (g, -1)])
        coords.append([M, B, C])
        parent_tri.append(t)
    out = Triangulation(
        n_vertices=v + 1,
        edges=tuple(edges),
        triangles=tuple(tuple(t) for t in triangles),
        coords=tuple(tuple(c) for c in coords),
    )
    record = {"vertex": v, "edge": e, "head_half": eb, "new_edges": tuple(new_edges),
              "parent_triangle": tuple(parent_tri)}
    return out, record


def flip(tri: Triangulation, e: int) -> Triangulation:
    """Replace edge ``e`` by the other diagonal of its quadrilateral (same id)."""
    (t1, k1), (t2, k2) = tri.sides_of_edge[e]
    if t1 == t2:
        raise ValueError(f"edge {e} is not flippable")
    A, B, C = (tri.coords[t1][(k1 + i) % 3] for i in range(3))
    s1 = tri.triangles[t1][(k1 + 1) % 3]
    s2 = tri.triangles[t1][(k1 + 2) % 3]
    s3 = tri.triangles[t2][(k2 + 1) % 3]
    s4 = tri.triangles[t2][(k2 + 2) % 3]
    tau = tri.gluing(t1, k1)
    D = _add(tri.coords[t2][(k2 + 2) % 3], tau)
    vC = tri.corner(t1, k1 + 2)
    vD = tri.corner(t2, k2 + 2)
    edges = list(tri.edges)
    edges[e] = (vC, vD)
    triangles = list(tri.triangles)
    coords = list(tri.coords)
    triangles[t1] = (s2, s3, (e, -1))
    coords[t1] = (C, A, D)
    triangles[t2] = (s4, s1, (e, 1))
    coords[t2] = (D, B, C)
    return Triangulation(tri.n_vertices, tuple(edges), tuple(triangles), tuple(coords))


def flip_weights(tri: Triangulation, weights, e: int) -> list[int]:
    """Normal coordinates after flipping ``e`` (max-plus update)."""
    (t1, k1), (t2, k2) = tri.sides_of_edge[e]
    a = weights[tri.triangles[t1][(k1 + 2) % 3][0]]
    b = weights[tri.triangles[t2][(k2 + 1) % 3][0]]
    c = weights[tri.triangles[t2][(k2 + 2) % 3][0]]
    d = weights[tri.triangles[t1][(k1 + 1) % 3][0]]
    out = list(weights)
    out[e] = max(a + c, b + d) - weights[e]
    return out


def _reduce_degree_flips(tri: Triangulation, v: int) -> list[int]:
    """Greedy flip sequence bringing vertex ``v`` down to degree three."""
    seq = []
    cur = tri
    for _ in range(64):
        if cur.degree(v) <= 3:
            return seq
        done = False
        deg = cur.degree(v)
        cands = sorted((a == b, e) for e, (a, b) in enumerate(cur.edges) if v in (a, b))
        for loop, e in cands:
            if loop and deg - 2 < 3:
                continue
            (t1, k1), (t2, k2) = cur.sides_of_edge[e]
            if t1 == t2:
                continue
            if v in (cur.corner(t1, k1 + 2), cur.corner(t2, k2 + 2)):
                continue
            seq.append(e)
            cur = flip(cur, e)
            done = True
            break
        if not done:
            break
    raise ValueError(f"cannot reduce degree of vertex {v}")


def remove_vertex(tri: Triangulation, v: int) -> tuple[Triangulation, list[int], dict]:
    """Forget vertex ``v``.

    Returns (new triangulation, flip sequence applied first, merge record).  The
    merge record maps old edge ids to new ones (``None`` for deleted edges) and
    old triangles to new ones; vertices above ``v`` are renumbered down by one.
    """
    if tri.n_vertices < 2:
        raise ValueError("cannot remove the only vertex")
    seq = _reduce_degree_flips(tri, v)
    cur = tri
    for e in seq:
        cur = flip(cur, e)
    spokes = [e for e, (a, b) in enumerate(cur.edges) if v in (a, b)]
    around = sorted({t for e in spokes for t, _ in cur.sides_of_edge[e]})
    if len(spokes) != 3 or len(around) != 3:
        raise ValueError("vertex link is not a simple triangle")
    # outer sides in ccw order around v: in each triangle the side opposite v
    outer = {}
    for t in around:
        k = next(k for k in range(3) if cur.corner(t, k) == v)
        outer[t] = (k + 1) % 3
    # place triangles consistently around v starting from the first one
    start = around[0]
    placed = {start: cur.coords[start]}
    order = [start]
    t = start
    while len(order) < 3:
        k = next(k for k in range(3) if cur.corner(t, k) == v)
        t2, k2 = cur.other_side(t, (k + 2) % 3)
        tau = _sub(placed[t][(k + 2) % 3], cur.coords[t2][(k2 + 1) % 3])
        placed[t2] = tuple(_add(p, tau) for p in cur.coords[t2])
        order.append(t2)
        t = t2
    # crossing the incoming spoke moves counter-clockwise around v, so the
    # outer sides already chain in ccw order
    tri_sides = [cur.triangles[t][outer[t]] for t in order]
    tri_pts = [placed[t][outer[t]] for t in order]
    ren_v = lambda x: x - 1 if x > v else x
    keep_edges = [e for e in range(cur.n_edges) if e not in spokes]
    emap = {e: (keep_edges.index(e) if e in keep_edges else None) for e in range(cur.n_edges)}
    keep_tris = [t for t in range(cur.n_triangles) if t not in around]
    new_tris, new_coords = [], []
    for t in keep_tris:
        new_tris.append(tuple((emap[e], s) for e, s in cur.triangles[t]))
        new_coords.append(cur.coords[t])
    merged = len(new_tris)
    new_tris.append(tuple((emap[e], s) for e, s in tri_sides))
    new_coords.append(tuple(tri_pts))
    tmap = {t: (keep_tris.index(t) if t in keep_tris else merged) for t in range(cur.n_triangles)}
    out = Triangulation(
        n_vertices=tri.n_vertices - 1,
        edges=tuple((ren_v(a), ren_v(b)) for e, (a, b) in enumerate(cur.edges) if e in keep_edges),
        triangles=tuple(new_tris),
        coords=tuple(new_coords),
    )
    return out, seq, {"edge_map": emap, "triangle_map": tmap, "intermediate": cur}


_MODEL_SPLITS = {2: [2], 3: [2, 4], 4: [2, 4, 5]}


def model_triangulation(n: int) -> Triangulation:
    tri = one_vertex_torus()
    for e in _MODEL_SPLITS.get(n, []):
        tri, _ = split_edge(tri, e)
    return tri


def make_surface(genus: int, n_marked: int) -> SurfaceSpec:
    if genus != 1:
        raise UnsupportedBackend(f"genus {genus} backend not available; only the torus is implemented")
    if not 0 <= n_marked <= MAX_MARKED:
        raise UnsupportedBackend(f"{n_marked} marked points exceeds model capacity {MAX_MARKED}")
    tri = model_triangulation(max(n_marked, 1))
    names = tuple(f"p{i + 1}" for i in range(n_marked))
    marked = MarkedSet(names, tuple(_vertex_position(tri, i) for i in range(n_marked)))
    flags = (False,) if n_marked == 0 else (True,) * n_marked
    return SurfaceSpec(genus=1, marked=marked, triangulation=tri, vertex_marked=flags)


def _vertex_position(tri: Triangulation, v: int) -> Point:
    for t in range(tri.n_triangles):
        for k in range(3):
            if tri.corner(t, k) == v:
                p = tri.coords[t][k]
                return (p[0] % 1, p[1] % 1)
    raise ValueError(v)


def _cross(u: Point, v: Point) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def locate(tri: Triangulation, p: Point) -> tuple[int, Point]:
    """Triangle strictly containing p, with the lattice shift placing it there."""
    for t in range(tri.n_triangles):
        c = tri.coords[t]
        lo = [min(q[i] for q in c) for i in (0, 1)]
        for mx in range(int(lo[0]) - 2, int(lo[0]) + 3):
            for my in range(int(lo[1]) - 2, int(lo[1]) + 3):
                q = (p[0] - mx, p[1] - my)
                if all(_cross(_sub(c[(k + 1) % 3], c[k]), _sub(q, c[k])) > 0 for k in range(3)):
                    return t, (Fraction(mx), Fraction(my))
    raise ValueError(f"{p} lies on the 1-skeleton")


def trace_segment(tri: Triangulation, start: Point, vec: Point) -> list[tuple[int, int]]:
    """Sides (t, k) left through, in order, by the straight segment start -> start + vec.

    The segment must avoid vertices and must not end on an edge.
    """
    start = _pt(*start)
    vec = _pt(*vec)
    t, shift = locate(tri, start)
    out = []
    s = Fraction(0)
    while True:
        c = [_add(q, shift) for q in tri.coords[t]]
        best = None
        for k in range(3):
            a, b = c[k], c[(k + 1) % 3]
            d = _sub(b, a)
            den = _cross(vec, d)
            if den == 0:
                continue
            # start + s vec = a + r d
            w = _sub(a, start)
            sk = _cross(w, d) / den
            r = _cross(w, vec) / den
            if sk > s and 0 <= r <= 1:
                if r in (0, 1):
                    raise ValueError("segment passes through a vertex")
                if best is None or sk < best[0]:
                    best = (sk, k)
        if best is None or best[0] > 1:
            return out
        if best[0] == 1:
            raise ValueError("segment ends on an edge")
        s, k = best
        out.append((t, k))
        shift = _add(shift, tri.gluing(t, k))
        t, _ = tri.other_side(t, k)


def surface_from_triangulation(tri: Triangulation, names=None) -> SurfaceSpec:
    names = tuple(names or (f"p{i + 1}" for i in range(tri.n_vertices)))
    marked = MarkedSet(names, tuple(_vertex_position(tri, i) for i in range(tri.n_vertices)))
    return SurfaceSpec(genus=1, marked=marked, triangulation=tri, vertex_marked=(True,) * tri.n_vertices)


@dataclass
class TriangulationReport:
    euler: int
    n_vertices: int
    n_edges: int
    n_triangles: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def check_triangulation(t: Triangulation) -> TriangulationReport:
    failures = []
    for e in range(t.n_edges):
        n = len(t.sides_of_edge[e])
        if n != 2:
            failures.append(f"unpaired side: edge {e} has {n} sides")
    for tt, tri in enumerate(t.triangles):
        for k, (e, s) in enumerate(tri):
            if not 0 <= e < t.n_edges:
                failures.append(f"triangle {tt} side {k} references missing edge {e}")
    if not failures:
        for tt in range(t.n_triangles):
            for k in range(3):
                e, s = t.triangles[tt][k]
                a, b = t.edges[e]
                start, end = (a, b) if s > 0 else (b, a)
                nxt_e, nxt_s = t.triangles[tt][(k + 1) % 3]
                na, nb = t.edges[nxt_e]
                if end != (na if nxt_s > 0 else nb):
                    failures.append(f"triangle {tt}: sides {k},{k + 1} do not meet at a corner")
            # side pairing must reverse direction
            for k in range(3):
                t2, k2 = t.other_side(tt, k)
                if t.triangles[t2][k2][1] == t.triangles[tt][k][1] and (t2, k2) != (tt, k):
                    pass  # orientation is encoded by the shared edge, both signs allowed
    chi = t.euler_characteristic()
    if chi != 0:
        failures.append(f"euler characteristic {chi} != 0")
    return TriangulationReport(chi, t.n_vertices, t.n_edges, t.n_triangles, failures)
