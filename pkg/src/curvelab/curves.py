"""Isotopy classes of simple closed curves as normal coordinates.

A class is a weight per triangulation edge.  Tracing the normal arcs gives a
cyclic walk in the dual graph (one step per triangle visit).  Because every
vertex of the triangulation is a puncture, the punctured surface retracts onto
the dual graph, so a class is the same thing as a reduced cyclic walk and
intersection numbers can be read from how lifts link in the dual tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd

from .surfaces import SurfaceSpec, Triangulation, flip, flip_weights, make_surface, remove_vertex, \
    surface_from_triangulation, trace_segment


class MatchingViolation(ValueError):
    pass


class NotConnected(ValueError):
    pass


class NullClass(ValueError):
    pass


class Inessential:
    """Returned by :func:`forget_punctures` when the curve dies."""

    def __repr__(self):
        return "Inessential"

    def __eq__(self, other):
        return isinstance(other, Inessential)

    def __hash__(self):
        return 0


INESSENTIAL = Inessential()

# one step of a dual walk: (triangle, side entered through, side left through)
Step = tuple[int, int, int]


def corner_counts(weights, tri: Triangulation, t: int) -> tuple[int, int, int]:
    """Arcs cutting off corner k (between sides k-1 and k) of triangle t."""
    w = [weights[e] for e, _ in tri.triangles[t]]
    out = []
    for k in range(3):
        twice = w[k - 1] + w[k] - w[(k + 1) % 3]
        if twice < 0 or twice % 2:
            raise MatchingViolation(f"triangle {t} weights {w} violate the matching conditions")
        out.append(twice // 2)
    return tuple(out)


def side_index(tri: Triangulation, t: int, k: int, pos: int, w: int) -> int:
    """ccw index on side (t, k) of the point at edge position ``pos``."""
    return pos if tri.triangles[t][k][1] > 0 else w - 1 - pos


def arc_partner(k: int, j: int, w: tuple[int, int, int], c: tuple[int, int, int]) -> tuple[int, int]:
    """Other end (side, ccw index) of the normal arc through index j of side k."""
    if j < c[k]:
        k2 = (k - 1) % 3
        return k2, w[k2] - 1 - j
    k2 = (k + 1) % 3
    return k2, w[k] - 1 - j


def trace(tri: Triangulation, weights) -> list[list[tuple]]:
    """Trace all components; each is a list of (t, k_in, j_in, k_out, j_out)."""
    counts = [corner_counts(weights, tri, t) for t in range(tri.n_triangles)]
    seen = set()
    comps = []
    for e in range(tri.n_edges):
        for pos in range(weights[e]):
            if (e, pos) in seen:
                continue
            t, k = tri.sides_of_edge[e][0]
            comp = []
            start = (e, pos)
            while True:
                seen.add((e, pos))
                w = tuple(weights[x] for x, _ in tri.triangles[t])
                j = side_index(tri, t, k, pos, weights[e])
                k2, j2 = arc_partner(k, j, w, counts[t])
                comp.append((t, k, j, k2, j2))
                e = tri.triangles[t][k2][0]
                pos = j2 if tri.triangles[t][k2][1] > 0 else weights[e] - 1 - j2
                t, k = tri.other_side(t, k2)
                if (e, pos) == start:
                    break
            comps.append(comp)
    return comps


def walk_homology(tri: Triangulation, walk) -> tuple[int, int]:
    off = (Fraction(0), Fraction(0))
    for t, _, k_out in walk:
        g = tri.gluing(t, k_out)
        off = (off[0] + g[0], off[1] + g[1])
    assert off[0].denominator == 1 and off[1].denominator == 1
    return (int(off[0]), int(off[1]))


def primitive(v) -> tuple[int, int]:
    p, q = v
    g = gcd(p, q)
    if g == 0:
        return (0, 0)
    p, q = p // g, q // g
    if p < 0 or (p == 0 and q < 0):
        p, q = -p, -q
    return (p, q)


def slope_weights(p: int, q: int) -> tuple[int, int, int]:
    """Normal coordinates of slope p/q on the one-vertex model (edges (1,0),(0,1),(1,1))."""
    return (abs(q), abs(p), abs(q - p))


def vertex_link(tri: Triangulation, v: int) -> tuple[int, ...]:
    return tuple((a == v) + (b == v) for a, b in tri.edges)


@dataclass(frozen=True, eq=False)
class CurveClass:
    surface: SurfaceSpec
    weights: tuple[int, ...]

    def __eq__(self, other):
        return (isinstance(other, CurveClass) and self.weights == other.weights
                and self.surface.triangulation == other.surface.triangulation)

    def __hash__(self):
        return hash(self.weights)

    def __repr__(self):
        return f"CurveClass({list(self.weights)})"

    @property
    def tri(self) -> Triangulation:
        return self.surface.triangulation

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    @cached_property
    def arcs(self):
        return trace(self.tri, self.weights)[0]

    @cached_property
    def walk(self) -> tuple[Step, ...]:
        return tuple((t, k, k2) for t, k, _, k2, _ in self.arcs)

    @cached_property
    def homology(self) -> tuple[int, int]:
        return walk_homology(self.tri, self.walk)

    @property
    def slope(self) -> tuple[int, int]:
        return primitive(self.homology)

    @cached_property
    def is_peripheral(self) -> bool:
        return any(self.weights == vertex_link(self.tri, v) for v in range(self.tri.n_vertices))

    def to_json(self) -> dict:
        return {"edges": {str(e): w for e, w in enumerate(self.weights)}}


def normal_class(surface: SurfaceSpec, weights) -> CurveClass:
    tri = surface.triangulation
    weights = tuple(int(w) for w in weights)
    if len(weights) != tri.n_edges:
        raise ValueError(f"expected {tri.n_edges} weights, got {len(weights)}")
    if any(w < 0 for w in weights):
        raise MatchingViolation("negative weight")
    for t in range(tri.n_triangles):
        corner_counts(weights, tri, t)
    if not any(weights):
        raise NullClass("empty weight vector")
    comps = trace(tri, weights)
    if len(comps) != 1:
        raise NotConnected(f"weights describe {len(comps)} components")
    c = CurveClass(surface, weights)
    if surface.is_closed and (c.is_peripheral or c.homology == (0, 0)):
        raise NullClass("curve bounds a disk in the closed torus")
    return c


def slope_class(surface: SurfaceSpec, p: int, q: int) -> CurveClass:
    """Class of slope p/q on a surface with at most one marked point."""
    if surface.triangulation.n_vertices != 1:
        raise ValueError("slope_class needs the one-vertex model")
    if gcd(p, q) != 1:
        raise ValueError(f"{p}/{q} is not a primitive slope")
    return normal_class(surface, slope_weights(p, q))


def reverse_walk(walk):
    return tuple((t, ko, ki) for t, ki, ko in reversed(walk))


def _ccw(a: int, b: int, c: int) -> bool:
    return (b - a) % 3 == 1


def linked_lifts(wa, wb) -> int:
    """Count crossing pairs of lifts, up to deck transformations.

    Two axes in the dual tree cross iff they share a segment and leave it on
    opposite sides.  Each pair is counted once, at the vertex where the shared
    segment starts (oriented along ``wa``).  Trivalence of the dual graph means
    a shared segment always contains at least one edge.
    """
    la, lb = len(wa), len(wb)
    if not la or not lb:
        return 0
    count = 0
    for sw in (tuple(wb), reverse_walk(wb)):
        index: dict[Step, list[int]] = {}
        for j, step in enumerate(sw):
            index.setdefault(step, []).append(j)
        for i, (t, ki, ko) in enumerate(wa):
            third = 3 - ki - ko
            for j in index.get((t, third, ko), ()):
                ii, jj, n = i, j, 0
                while True:
                    ii = (ii + 1) % la
                    jj = (jj + 1) % lb
                    n += 1
                    if wa[ii][2] != sw[jj][2] or n > la + lb:
                        break
                if n > la + lb:
                    continue  # same axis
                start = _ccw(ko, ki, third)
                end = _ccw(wa[ii][1], wa[ii][2], sw[jj][2])
                if start == end:
                    count += 1
    return count


def intersection_number(a: CurveClass, b: CurveClass) -> int:
    if a.tri != b.tri:
        raise ValueError("classes live on different surfaces")
    if a.weights == b.weights:
        return 0
    if a.tri.n_vertices == 1:
        (p, q), (r, s) = a.homology, b.homology
        return abs(p * s - q * r)
    return linked_lifts(a.walk, b.walk)


def algebraic_intersection(a: CurveClass, b: CurveClass) -> int:
    (p, q), (r, s) = a.homology, b.homology
    return abs(p * s - q * r)


def is_surviving(a: CurveClass) -> bool:
    return a.homology != (0, 0)


# --- forgetting punctures -------------------------------------------------

def _crossings(tri: Triangulation, walk):
    """Walk as a cyclic list of (edge, side it is left through)."""
    return [(tri.triangles[t][ko][0], (t, ko)) for t, _, ko in walk]


def reduce_crossings(tri: Triangulation, xs):
    """Cancel immediate back-and-forth crossings, cyclically."""
    stack = []
    for e, side in xs:
        if stack and stack[-1][0] == e and tri.other_side(*stack[-1][1]) == side:
            stack.pop()
        else:
            stack.append((e, side))
    while len(stack) >= 2 and stack[0][0] == stack[-1][0] and tri.other_side(*stack[-1][1]) == stack[0][1]:
        stack.pop()
        stack.pop(0)
    return stack


def crossings_to_weights(tri: Triangulation, xs) -> tuple[int, ...]:
    out = [0] * tri.n_edges
    for e, _ in xs:
        out[e] += 1
    return tuple(out)


def crossings_to_walk(tri: Triangulation, xs) -> tuple[Step, ...]:
    """Cyclic dual walk from a reduced cyclic crossing sequence."""
    walk = []
    for i, (_, (t, ko)) in enumerate(xs):
        _, (tp, kp) = xs[i - 1]
        t_in, k_in = tri.other_side(tp, kp)
        assert t_in == t
        walk.append((t, k_in, ko))
    return tuple(walk)


def segment_crossings(tri: Triangulation, start, vec):
    return [(tri.triangles[t][k][0], (t, k)) for t, k in trace_segment(tri, start, vec)]


def line_class(surface: SurfaceSpec, direction, through) -> CurveClass:
    """Class of the straight closed curve with integer direction through a point."""
    p, q = direction
    if gcd(p, q) != 1:
        raise ValueError(f"{direction} is not primitive")
    tri = surface.triangulation
    xs = reduce_crossings(tri, segment_crossings(tri, through, direction))
    return normal_class(surface, crossings_to_weights(tri, xs))


def _drop_vertex(tri: Triangulation, weights, v: int):
    new, seq, rec = remove_vertex(tri, v)
    for e in seq:
        weights = flip_weights(tri, weights, e)
        tri = flip(tri, e)
    comps = trace(tri, weights)
    assert len(comps) == 1
    walk = [(t, k, k2) for t, k, _, k2, _ in comps[0]]
    emap, tmap = rec["edge_map"], rec["triangle_map"]
    xs = []
    for e, (t, ko) in _crossings(tri, walk):
        ne = emap[e]
        if ne is None:
            continue
        nt = tmap[t]
        nk = next(k for k in range(3) if new.triangles[nt][k][0] == ne
                  and new.triangles[nt][k][1] == tri.triangles[t][ko][1])
        xs.append((ne, (nt, nk)))
    xs = reduce_crossings(new, xs)
    out = [0] * new.n_edges
    for e, _ in xs:
        out[e] += 1
    return new, tuple(out)


def forget_punctures(a: CurveClass, keep) -> CurveClass | Inessential:
    names = list(a.surface.marked.points)
    keep = list(keep)
    if not set(keep) <= set(names):
        raise ValueError(f"{keep} is not a subset of {names}")
    if not keep:
        h = a.homology
        if h == (0, 0):
            return INESSENTIAL
        p, q = primitive(h)
        return normal_class(make_surface(1, 0), slope_weights(p, q))
    tri, weights = a.tri, a.weights
    for name in reversed(names):
        if name in keep:
            continue
        v = names.index(name)
        tri, weights = _drop_vertex(tri, weights, v)
        names.pop(v)
        if not any(weights):
            return INESSENTIAL
    c = CurveClass(surface_from_triangulation(tri, names), weights)
    if len(trace(tri, weights)) != 1 or c.is_peripheral:
        return INESSENTIAL
    return c
