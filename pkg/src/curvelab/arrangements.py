"""Explicit curves in a triangulated torus and their crossing configurations.

An :class:`Arrangement` holds several actual simple closed curves.  Each curve
is normal with respect to the triangulation; on every edge the points of all
curves sit in a definite order (the *layering*).  Inside a triangle each curve
uses its unique planar normal matching, and two arcs of different curves cross
exactly when their endpoints interleave around the triangle.

Complementary regions of the union are assembled from the faces of the chord
arrangement in each triangle, glued across edge segments and at vertices.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .curves import CurveClass, arc_partner, corner_counts, normal_class, trace
from .surfaces import MAX_MARKED, MarkedSet, SurfaceSpec, Triangulation, split_edge, _vertex_position


class CapacityExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Region:
    key: int
    faces: tuple[tuple[int, int], ...]
    segments: tuple[tuple[int, int], ...]  # (edge, segment index); segment s lies between points s-1 and s
    vertices: tuple[int, ...]
    corners: int
    curves: frozenset
    marked: tuple[int, ...]

    @property
    def euler(self) -> int:
        return len(self.vertices) - len(self.segments) + len(self.faces)

    @property
    def is_disk(self) -> bool:
        return self.euler == 1

    @property
    def is_bigon(self) -> bool:
        return self.is_disk and self.corners == 2

    @property
    def is_empty_bigon(self) -> bool:
        return self.is_bigon and not self.marked


def _cross_param(pu, pv, pa, pb):
    """Parameter along pu->pv where it meets segment pa-pb (assumed to cross)."""
    dx, dy = pv[0] - pu[0], pv[1] - pu[1]
    ex, ey = pb[0] - pa[0], pb[1] - pa[1]
    den = dx * ey - dy * ex
    return ((pa[0] - pu[0]) * ey - (pa[1] - pu[1]) * ex) / den


def _interleave(a, b, c, d) -> bool:
    """Do chords (a, b) and (c, d) on a circle of integer slots interleave?"""
    if a > b:
        a, b = b, a
    return (a < c < b) != (a < d < b)


class _TriangleFaces:
    """Planar chord arrangement inside one triangle."""

    def __init__(self, boundary, chords):
        self.boundary = boundary  # list of ('c', k) / ('p', k, j)
        self.chords = chords  # list of (curve, u, v)
        nb = len(boundary)
        pts = [(Fraction(i), Fraction(i * i)) for i in range(nb)]
        self.points = pts
        along = [[] for _ in chords]
        self.crossing_of = []  # vertex id -> (q1, q2)
        for q1 in range(len(chords)):
            c1, u1, v1 = chords[q1]
            for q2 in range(q1 + 1, len(chords)):
                c2, u2, v2 = chords[q2]
                if not _interleave(u1, v1, u2, v2):
                    continue
                if c1 == c2:
                    raise ValueError("arcs of one curve cross")
                x = nb + len(self.crossing_of)
                self.crossing_of.append((q1, q2))
                along[q1].append((_cross_param(pts[u1], pts[v1], pts[u2], pts[v2]), x))
                along[q2].append((_cross_param(pts[u2], pts[v2], pts[u1], pts[v1]), x))
        for lst in along:
            lst.sort()
            for i in range(1, len(lst)):
                if lst[i][0] == lst[i - 1][0]:
                    raise ValueError("degenerate concurrent crossings")
        self.along = [[x for _, x in lst] for lst in along]
        nv = nb + len(self.crossing_of)
        # neighbours keyed by the boundary slot each direction heads to
        rot = [[] for _ in range(nv)]
        self.piece_curve = {}
        for i in range(nb):
            j = (i + 1) % nb
            rot[i].append(("next", j))
            rot[j].append(("prev", i))
        for q, (c, u, v) in enumerate(chords):
            seq = [u] + self.along[q] + [v]
            for a, b in zip(seq, seq[1:]):
                rot[a].append((v, b))  # heading towards v
                rot[b].append((u, a))  # heading towards u
                self.piece_curve[(a, b)] = c
                self.piece_curve[(b, a)] = c
        order = []
        for x in range(nv):
            if x < nb:
                kind = {n[0] if isinstance(n[0], str) else "chord": n[1] for n in rot[x]}
                lst = [kind["next"]] + ([kind["chord"]] if "chord" in kind else []) + [kind["prev"]]
            else:
                lst = [b for _, b in sorted(rot[x], key=lambda n: n[0])]
            order.append(lst)
        self.rot = order
        self.nb = nb
        self._trace()

    def _trace(self):
        pos = {}
        for x, lst in enumerate(self.rot):
            for i, y in enumerate(lst):
                pos[(x, y)] = i
        seen = set()
        faces = []
        outer = (1 % self.nb, 0)
        for he in pos:
            if he in seen:
                continue
            orbit = []
            h = he
            while h not in seen:
                seen.add(h)
                orbit.append(h)
                u, v = h
                i = pos[(v, u)]
                w = self.rot[v][i - 1]
                h = (v, w)
            if outer in orbit and self.nb > 1:
                continue
            faces.append(orbit)
        self.faces = faces
        self.face_of = {}
        for f, orbit in enumerate(faces):
            for h in orbit:
                self.face_of[h] = f

    def corners_of(self, f) -> int:
        return sum(1 for u, _ in self.faces[f] if u >= self.nb)


@dataclass(frozen=True, eq=False)
class Arrangement:
    surface: SurfaceSpec
    weights: tuple[tuple[int, ...], ...]
    layers: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        tri = self.surface.triangulation
        for e in range(tri.n_edges):
            for c in range(len(self.weights)):
                if self.layers[e].count(c) != self.weights[c][e]:
                    raise ValueError(f"layering on edge {e} disagrees with weights of curve {c}")

    @property
    def tri(self) -> Triangulation:
        return self.surface.triangulation

    @property
    def n_curves(self) -> int:
        return len(self.weights)

    def curve_class(self, c: int) -> CurveClass:
        return normal_class(self.surface, self.weights[c])

    def realization(self, c: int) -> "PolygonalRealization":
        return realize(self.curve_class(c))

    # -- per-triangle structure -------------------------------------------
    def _boundary(self, t: int):
        tri = self.tri
        bnd = []
        for k in range(3):
            bnd.append(("c", k))
            e, s = tri.triangles[t][k]
            bnd.extend(("p", k, j) for j in range(len(self.layers[e])))
        return bnd

    def _global_pos(self, t, k, j):
        e, s = self.tri.triangles[t][k]
        m = len(self.layers[e])
        return e, (j if s > 0 else m - 1 - j)

    def chords(self, t: int):
        tri = self.tri
        bnd = self._boundary(t)
        slot = {b: i for i, b in enumerate(bnd)}
        out = []
        for c, w_all in enumerate(self.weights):
            w = tuple(w_all[e] for e, _ in tri.triangles[t])
            if not any(w):
                continue
            cc = corner_counts(w_all, tri, t)
            # ccw slots of this curve's points on each side
            local = []
            for k in range(3):
                e, s = tri.triangles[t][k]
                m = len(self.layers[e])
                js = [j for j in range(m) if self.layers[e][j if s > 0 else m - 1 - j] == c]
                local.append(js)
            for k in range(3):
                for li in range(w[k]):
                    k2, l2 = arc_partner(k, li, w, cc)
                    if (k, li) < (k2, l2):
                        out.append((c, slot[("p", k, local[k][li])], slot[("p", k2, local[k2][l2])]))
        return bnd, out

    @cached_property
    def _faces(self):
        return [_TriangleFaces(*self.chords(t)) for t in range(self.tri.n_triangles)]

    def crossings(self, i: int | None = None, j: int | None = None) -> int:
        n = 0
        for tf in self._faces:
            for q1, q2 in tf.crossing_of:
                pair = {tf.chords[q1][0], tf.chords[q2][0]}
                if i is None or pair == {i, j}:
                    n += 1
        return n

    @cached_property
    def regions(self) -> list[Region]:
        tri = self.tri
        parent = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

        faces = self._faces
        for t, tf in enumerate(faces):
            for f in range(len(tf.faces)):
                parent[(t, f)] = (t, f)
        seg_faces = {}
        vert_faces = {}
        for t, tf in enumerate(faces):
            for i, b in enumerate(tf.boundary):
                f = tf.face_of[(i, (i + 1) % tf.nb)]
                k = b[1]
                e, s = tri.triangles[t][k]
                m = len(self.layers[e])
                ccw_seg = 0 if b[0] == "c" else b[2] + 1
                seg = ccw_seg if s > 0 else m - ccw_seg
                seg_faces.setdefault((e, seg), []).append((t, f))
                if b[0] == "c":
                    vert_faces.setdefault(tri.corner(t, k), []).append((t, f))
        for lst in list(seg_faces.values()) + list(vert_faces.values()):
            for x in lst[1:]:
                union(lst[0], x)
        groups = {}
        for x in parent:
            groups.setdefault(find(x), []).append(x)
        seg_of = {}
        for sg, lst in seg_faces.items():
            seg_of.setdefault(find(lst[0]), []).append(sg)
        vert_of = {}
        for v, lst in vert_faces.items():
            vert_of.setdefault(find(lst[0]), []).append(v)
        out = []
        for r, (root, fs) in enumerate(sorted(groups.items())):
            corners = sum(faces[t].corners_of(f) for t, f in fs)
            curves = set()
            for t, f in fs:
                for h in faces[t].faces[f]:
                    c = faces[t].piece_curve.get(h)
                    if c is not None:
                        curves.add(c)
            vs = tuple(sorted(vert_of.get(root, [])))
            marked = tuple(v for v in vs if self.surface.vertex_marked[v])
            out.append(Region(r, tuple(sorted(fs)), tuple(sorted(seg_of.get(root, []))), vs, corners,
                              frozenset(curves), marked))
        return out

    def bigons(self, empty_only: bool = True) -> list[Region]:
        return [r for r in self.regions if (r.is_empty_bigon if empty_only else r.is_bigon)]

    # -- moves ----------------------------------------------------------------
    def swap(self, e: int, s: int) -> "Arrangement":
        """Exchange the points at positions s-1 and s of edge e."""
        layers = list(self.layers)
        lay = list(layers[e])
        lay[s - 1], lay[s] = lay[s], lay[s - 1]
        layers[e] = tuple(lay)
        return Arrangement(self.surface, self.weights, tuple(layers))

    def push_across(self, bigon: Region) -> "Arrangement":
        out = self
        for e, s in bigon.segments:
            pair = {self.layers[e][s - 1], self.layers[e][s]}
            if len(pair) != 2 or not pair <= bigon.curves:
                raise ValueError("region is not an empty bigon")
            out = out.swap(e, s)
        return out

    def split(self, e: int, s: int, name: str) -> "Arrangement":
        """Add a marked point on segment s of edge e (between points s-1 and s)."""
        tri = self.tri
        new_tri, rec = split_edge(tri, e)
        eb = rec["head_half"]
        layers = list(self.layers) + [()] * (new_tri.n_edges - tri.n_edges)
        old = self.layers[e]
        layers[e] = tuple(old[:s])
        layers[eb] = tuple(old[s:])
        for (t, k), g in zip(tri.sides_of_edge[e], rec["new_edges"]):
            tf = self._faces[t]
            sign = tri.triangles[t][k][1]
            m = len(old)
            ccw_seg = s if sign > 0 else m - s
            # M sits between ccw slots of side k; corner k+2 is the apex C
            base = tf.boundary.index(("c", k))
            pm = Fraction(base + ccw_seg) + Fraction(1, 2) + Fraction(1, 997)
            pM = (pm, pm * pm)
            ci = tf.boundary.index(("c", (k + 2) % 3))
            pC = tf.points[ci]
            hits = []
            for c, u, v in tf.chords:
                # does chord separate M from C ?
                lo, hi = min(u, v), max(u, v)
                if (lo < pm < hi) != (lo < ci < hi):
                    par = _cross_param(pM, pC, tf.points[u], tf.points[v])
                    hits.append((par, c))
            hits.sort()
            for i in range(1, len(hits)):
                if hits[i][0] == hits[i - 1][0]:
                    raise ValueError("degenerate split position")
            layers[g] = tuple(c for _, c in hits)
        weights = tuple(tuple(lay.count(c) for lay in layers) for c in range(self.n_curves))
        names = self.surface.marked.points + (name,)
        pos = self.surface.marked.positions + (_vertex_position(new_tri, new_tri.n_vertices - 1),)
        surf = SurfaceSpec(1, MarkedSet(names, pos), new_tri, self.surface.vertex_marked + (True,))
        return Arrangement(surf, weights, tuple(layers))


@dataclass(frozen=True)
class PolygonalRealization:
    """One actual curve: the arcs of its normal representative, in order.

    Each arc is (triangle, entry side, entry index, exit side, exit index) with
    indices counted counter-clockwise along the side.
    """

    surface: SurfaceSpec
    weights: tuple[int, ...]
    arcs: tuple[tuple[int, int, int, int, int], ...]

    def arrangement(self) -> Arrangement:
        return single(self.surface, self.weights)


def single(surface: SurfaceSpec, weights) -> Arrangement:
    weights = tuple(weights)
    return Arrangement(surface, (weights,), tuple((0,) * w for w in weights))


def realize(a: CurveClass) -> PolygonalRealization:
    return PolygonalRealization(a.surface, a.weights, tuple(a.arcs))


def class_of(r: PolygonalRealization) -> CurveClass:
    tri = r.surface.triangulation
    counts = [0] * tri.n_edges
    for t, _, _, k2, _ in r.arcs:
        counts[tri.triangles[t][k2][0]] += 1
    return normal_class(r.surface, counts)


def _push_off_keys(tri: Triangulation, weights, layer: int):
    """Sort keys placing a curve as a push-off to its left, one layer out."""
    keys = {}
    comp = trace(tri, weights)[0]
    for t, _, _, k2, j2 in comp:
        e, s = tri.triangles[t][k2]
        w = weights[e]
        pos = j2 if s > 0 else w - 1 - j2
        # leaving t through side k2: the curve's left is towards the corner k2+1,
        # i.e. towards the head of e when s > 0
        side = 1 if s > 0 else -1
        keys[(e, pos)] = (Fraction(pos + 1, w + 1), side * layer)
    return keys


def combine(surface: SurfaceSpec, curves, layers_of=None) -> Arrangement:
    """Lay several standalone curves into one arrangement.

    Curve ``i`` is placed as a parallel copy at depth ``i`` of its own normal
    position, so copies of one class come out pairwise disjoint.
    """
    tri = surface.triangulation
    per_edge = [[] for _ in range(tri.n_edges)]
    for c, w in enumerate(curves):
        keys = _push_off_keys(tri, w, c if layers_of is None else layers_of[c])
        for (e, pos), key in keys.items():
            per_edge[e].append((key, c))
    layers = tuple(tuple(c for _, c in sorted(lst)) for lst in per_edge)
    return Arrangement(surface, tuple(tuple(w) for w in curves), layers)


def random_layering(surface: SurfaceSpec, curves, rng: random.Random) -> Arrangement:
    """Arrangement with each edge's interleaving drawn uniformly at random."""
    tri = surface.triangulation
    layers = []
    for e in range(tri.n_edges):
        lab = [c for c, w in enumerate(curves) for _ in range(w[e])]
        rng.shuffle(lab)
        layers.append(tuple(lab))
    return Arrangement(surface, tuple(tuple(w) for w in curves), tuple(layers))


def _bigon_key(r: Region):
    return (r.faces[0][0], r.segments[0] if r.segments else (-1, -1))


def bigon_reduce(cfg: Arrangement, rng: random.Random | None = None, trail: list | None = None) -> Arrangement:
    """Push across empty bigons until none remain.

    Without ``rng`` the bigon with the lowest (triangle, segment) key is taken
    each time; with ``rng`` a random one, which is how order independence is
    tested.  Each step removes exactly two crossings.
    """
    cur = cfg
    while True:
        bs = cur.bigons()
        if not bs:
            return cur
        b = rng.choice(bs) if rng is not None else min(bs, key=_bigon_key)
        before = cur.crossings()
        cur = cur.push_across(b)
        after = cur.crossings()
        if before - after != 2:
            raise AssertionError(f"bigon move changed crossings by {before - after}")
        if trail is not None:
            trail.append(after)


def bigon_intersection(a: CurveClass, b: CurveClass, rng: random.Random | None = None) -> int:
    """Geometric intersection through bigon removal on a fixed layering."""
    if a.weights == b.weights:
        cfg = combine(a.surface, [a.weights, b.weights])
    elif rng is None:
        cfg = Arrangement(a.surface, (a.weights, b.weights),
                          tuple((0,) * wa + (1,) * wb for wa, wb in zip(a.weights, b.weights)))
    else:
        cfg = random_layering(a.surface, [a.weights, b.weights], rng)
    return bigon_reduce(cfg, rng).crossings(0, 1)


def perturb_transverse(reals) -> Arrangement:
    """Put standalone realizations into general position with one another.

    An :class:`Arrangement` is already transverse and is returned unchanged.
    """
    if isinstance(reals, Arrangement):
        return reals
    reals = list(reals)
    surface = reals[0].surface
    return combine(surface, [r.weights for r in reals])


def choose_bigon_punctures(cfg: Arrangement, base: MarkedSet | None = None, limit: int = MAX_MARKED,
                           placement: str = "first", extra: int = 0) -> Arrangement:
    """Add one marked point inside every empty bigon.

    ``placement`` picks the edge segment of each bigon used for the new point
    ("first" or "last").  ``extra`` further points go into the first regions
    that are not bigons.  All of these give valid puncture sets.
    """
    base = base if base is not None else cfg.surface.marked
    if tuple(base.points) != tuple(cfg.surface.marked.points):
        raise ValueError("base marked set must match the arrangement surface")
    bigons = cfg.bigons()
    others = [r for r in cfg.regions if not r.is_bigon and r.segments][:extra]
    if len(others) < extra:
        raise CapacityExceeded(f"only {len(others)} regions available for extra points")
    need = len(base) + len(bigons) + extra
    if need > limit:
        raise CapacityExceeded(f"{len(bigons)} empty bigons and {extra} extra points need {need} marked points; "
                               f"limit is {limit}")
    sites = []
    for r in bigons + others:
        segs = sorted(r.segments)
        sites.append(segs[-1] if placement == "last" and r.is_bigon else segs[0])
    out = cfg
    for i, (e, s) in enumerate(sorted(sites, reverse=True)):
        out = out.split(e, s, f"q{len(base) + i + 1}")
    if out.bigons():
        raise AssertionError("puncture insertion left an empty bigon")
    return out
