"""Mapping classes of the marked torus as words in Dehn twists.

A twist acts on a curve by surgery: lay both curves out transversely, walk
along the curve, and at every crossing with the core take one full lap around
the core, always turning the same way.  Cancelling back-and-forth edge
crossings then leaves the normal representative of the image.  Any transverse
layering works, since bigons contribute a lap and its reverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

import numpy as np

from .curves import (CurveClass, INESSENTIAL, crossings_to_walk, forget_punctures, line_class, linked_lifts,
                     normal_class, primitive, reduce_crossings, segment_crossings, slope_class, crossings_to_weights)
from .surfaces import MarkedSet, SurfaceSpec, make_surface, one_vertex_torus


class MarkedSetMismatch(ValueError):
    pass


class NotPreserved(ValueError):
    pass


Matrix = tuple[tuple[int, int], tuple[int, int]]
IDENTITY: Matrix = ((1, 0), (0, 1))


def _mat(m) -> Matrix:
    a = np.asarray(m, dtype=np.int64)
    return ((int(a[0, 0]), int(a[0, 1])), (int(a[1, 0]), int(a[1, 1])))


def _mul(a: Matrix, b: Matrix) -> Matrix:
    return _mat(np.asarray(a, dtype=object) @ np.asarray(b, dtype=object))


def _inv(a: Matrix) -> Matrix:
    (p, q), (r, s) = a
    return ((s, -q), (-r, p))


def transvection(h, power: int = 1) -> Matrix:
    """Shadow of the twist along a curve with homology h (sign of h irrelevant)."""
    p, q = h
    return ((1 - power * p * q, power * p * p), (-power * q * q, 1 + power * p * q))


# --- twist surgery -------------------------------------------------------------

def _slot_tables(tri, wa, wc):
    """ccw slot of every a-point and c-point when a's points precede c's on each edge."""
    offs = []
    for t in range(tri.n_triangles):
        off, o = [], 0
        for e, _ in tri.triangles[t]:
            off.append(o)
            o += 1 + wa[e] + wc[e]
        offs.append((off, o))

    def slot(t, k, j, mine, other):
        e, s = tri.triangles[t][k]
        ccw = j if s > 0 else other[e] + j
        return offs[t][0][k] + 1 + ccw

    def slot_a(t, k, j):
        return slot(t, k, j, wa, wc)

    def slot_c(t, k, j):
        e, s = tri.triangles[t][k]
        ccw = wa[e] + j if s > 0 else j
        return offs[t][0][k] + 1 + ccw

    return slot_a, slot_c, [o for _, o in offs]


def _between(x, lo, hi, n) -> bool:
    """x strictly inside the ccw arc from lo to hi on a circle of n slots."""
    return 0 < (x - lo) % n < (hi - lo) % n


def twist_image(c: CurveClass, a: CurveClass, power: int = 1) -> CurveClass:
    if power == 0:
        return a
    if a.tri != c.tri:
        raise MarkedSetMismatch("twist core and curve live on different triangulations")
    step = 1 if power > 0 else -1
    for _ in range(abs(power)):
        a = _twist_once(c, a, step)
    return a


def _twist_once(c: CurveClass, a: CurveClass, eps: int) -> CurveClass:
    tri = a.tri
    if a.weights == c.weights:
        return a
    slot_a, slot_c, sizes = _slot_tables(tri, a.weights, c.weights)
    c_arcs = c.arcs
    lc = len(c_arcs)
    by_tri = {}
    for n, (t, k, j, k2, j2) in enumerate(c_arcs):
        by_tri.setdefault(t, []).append((n, slot_c(t, k, j), slot_c(t, k2, j2)))
    exits_c = [(tri.triangles[t][k2][0], (t, k2)) for t, _, _, k2, _ in c_arcs]
    entries_c = [(tri.triangles[t][k][0], (t, k)) for t, k, _, _, _ in c_arcs]
    out = []
    for t, k, j, k2, j2 in a.arcs:
        ua, va = slot_a(t, k, j), slot_a(t, k2, j2)
        size = sizes[t]
        hits = []
        for n, uc, vc in by_tri.get(t, ()):
            if _between(uc, ua, va, size) == _between(vc, ua, va, size):
                continue
            near = uc if _between(uc, ua, va, size) else vc
            left = _between(vc, va, ua, size)
            hits.append(((near - ua) % size, n, left))
        hits.sort()
        for _, n, left in hits:
            if left == (eps < 0):
                out.extend(exits_c[(n + i) % lc] for i in range(lc))
            else:
                out.extend(entries_c[(n - i) % lc] for i in range(lc))
        out.append((tri.triangles[t][k2][0], (t, k2)))
    xs = reduce_crossings(tri, out)
    return normal_class(a.surface, crossings_to_weights(tri, xs))


# --- mapping classes -------------------------------------------------------------

@dataclass(frozen=True)
class MappingClass:
    """Composition ``word[0] ∘ word[1] ∘ ...`` of twists (core, ±1).

    ``linear`` marks an affine map given only by its matrix; such a map is
    applied to slopes directly and may move marked points.
    """

    surface: SurfaceSpec
    word: tuple[tuple[CurveClass, int], ...]
    shadow: Matrix = IDENTITY
    perm: tuple[int, ...] | None = None
    linear: bool = False
    label: str = ""

    def __post_init__(self):
        if self.perm is None and not self.linear:
            object.__setattr__(self, "perm", tuple(range(self.surface.n_marked)))

    def __mul__(self, other: "MappingClass") -> "MappingClass":
        if self.linear or other.linear:
            raise ValueError("affine maps do not compose with twist words here")
        if self.surface.triangulation != other.surface.triangulation:
            raise MarkedSetMismatch("mapping classes on different models")
        return MappingClass(self.surface, self.word + other.word, _mul(self.shadow, other.shadow),
                            label=f"{self.label}*{other.label}")

    def inverse(self) -> "MappingClass":
        if self.linear:
            return MappingClass(self.surface, (), _inv(self.shadow), _perm_of(self.surface, _inv(self.shadow)),
                                linear=True, label=f"{self.label}^-1")
        return MappingClass(self.surface, tuple((c, -p) for c, p in reversed(self.word)), _inv(self.shadow),
                            label=f"{self.label}^-1")

    def __pow__(self, n: int) -> "MappingClass":
        base = self if n >= 0 else self.inverse()
        out = identity(self.surface)
        for _ in range(abs(n)):
            out = out * base
        return MappingClass(out.surface, out.word, out.shadow, label=f"({self.label})^{n}")

    def conjugate(self, by: "MappingClass") -> "MappingClass":
        """by ∘ self ∘ by⁻¹"""
        m = by * self * by.inverse()
        return MappingClass(m.surface, m.word, m.shadow, label=f"{by.label}.{self.label}")

    def to_json(self) -> dict:
        return {"label": self.label,
                "shadow": [list(r) for r in self.shadow],
                "linear": self.linear,
                "word": [{"twist": list(c.weights), "power": p} for c, p in self.word]}


def identity(surface: SurfaceSpec) -> MappingClass:
    return MappingClass(surface, (), IDENTITY, label="id")


def twist(c: CurveClass, power: int = 1) -> MappingClass:
    return MappingClass(c.surface, ((c, power),), transvection(c.homology, power), label=f"T{list(c.weights)}")


def from_json(surface: SurfaceSpec, data: dict) -> MappingClass:
    if data.get("linear"):
        return linear_map(surface, data["shadow"])
    m = identity(surface)
    for item in data["word"]:
        m = m * twist(normal_class(surface, item["twist"]), item["power"])
    return MappingClass(surface, m.word, m.shadow, label=data.get("label", ""))


def _perm_of(surface: SurfaceSpec, matrix: Matrix):
    pos = [(p[0] % 1, p[1] % 1) for p in surface.marked.positions]
    out = []
    for x, y in pos:
        im = ((matrix[0][0] * x + matrix[0][1] * y) % 1, (matrix[1][0] * x + matrix[1][1] * y) % 1)
        if im not in pos:
            return None
        out.append(pos.index(im))
    return tuple(out)


def linear_map(surface: SurfaceSpec, matrix) -> MappingClass:
    m = _mat(matrix)
    if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 1:
        raise ValueError("shadow must have determinant 1")
    return MappingClass(surface, (), m, _perm_of(surface, m), linear=True, label=f"A{[list(r) for r in m]}")


def act(m: MappingClass, a: CurveClass) -> CurveClass:
    if a.tri != m.surface.triangulation:
        raise MarkedSetMismatch("curve is not on the mapping class's model")
    if m.linear:
        if m.perm is None or a.tri.n_vertices > 1:
            raise MarkedSetMismatch("affine map only acts on slopes of the one-vertex model")
        (p, q), ((x, y), (z, w)) = a.homology, m.shadow
        return slope_class(a.surface, *primitive((x * p + y * q, z * p + w * q)))
    for c, power in reversed(m.word):
        a = twist_image(c, a, power)
    return a


# --- standard curves and the Anosov lift -----------------------------------------

def axis_curve(surface: SurfaceSpec, direction, offset=Fraction(3, 8)) -> CurveClass:
    """Straight curve of slope (1,0) or (0,1) placed off the marked points."""
    if surface.triangulation.n_vertices == 1:
        return slope_class(surface, *direction)
    if tuple(direction) == (1, 0):
        return line_class(surface, (1, 0), (Fraction(1, 7), offset))
    return line_class(surface, (0, 1), (offset, Fraction(1, 7)))


def factor_sl2(matrix) -> list[tuple[str, int]]:
    """Write a matrix of SL(2,Z) as a product of powers of Ta=[[1,1],[0,1]] and Tb=[[1,0],[-1,1]]."""
    a = [list(r) for r in _mat(matrix)]
    if a[0][0] * a[1][1] - a[0][1] * a[1][0] != 1:
        raise ValueError("not in SL(2,Z)")
    out = []

    def left(m, a):
        return [[m[0][0] * a[0][0] + m[0][1] * a[1][0], m[0][0] * a[0][1] + m[0][1] * a[1][1]],
                [m[1][0] * a[0][0] + m[1][1] * a[1][0], m[1][0] * a[0][1] + m[1][1] * a[1][1]]]

    while a[1][0] != 0:
        if a[0][0] == 0:
            a = left([[1, 1], [0, 1]], a)
            out.append(("a", -1))
        elif abs(a[0][0]) > abs(a[1][0]):
            q = a[0][0] // a[1][0]
            a = left([[1, -q], [0, 1]], a)
            out.append(("a", q))
        else:
            q = a[1][0] // a[0][0]
            a = left([[1, 0], [-q, 1]], a)
            out.append(("b", -q))
    if a[0][0] == 1:
        out.append(("a", a[0][1]))
    else:
        out.append(("a", -a[0][1]))
        out.extend([("a", 1), ("b", 1), ("a", 1)] * 2)
    return [(g, p) for g, p in out if p]


def anosov(surface: SurfaceSpec, matrix=((2, 1), (1, 1))) -> MappingClass:
    """Twist word along the two axis curves whose shadow is ``matrix``."""
    gens = {"a": axis_curve(surface, (1, 0)), "b": axis_curve(surface, (0, 1))}
    m = identity(surface)
    for g, p in factor_sl2(matrix):
        m = m * twist(gens[g], p)
    if m.shadow != _mat(matrix):
        raise AssertionError("factorisation mismatch")
    return MappingClass(surface, m.word, m.shadow, label=f"phi{[list(r) for r in _mat(matrix)]}")


# --- loops and point pushes ------------------------------------------------------

_INV = {"x": "X", "X": "x", "y": "Y", "Y": "y"}


@dataclass(frozen=True)
class LoopWord:
    """Loop at a marked point in the free group on x (along +x) and y (along +y).

    Capital letters are inverses.  The generators are the straight loops
    through the base point; they must miss every other marked point.
    """

    base: str
    letters: str

    def __post_init__(self):
        if set(self.letters) - set(_INV):
            raise ValueError(f"letters must come from xXyY, got {self.letters!r}")
        w = self.letters
        if any(_INV[w[i]] == w[i + 1] for i in range(len(w) - 1)) or (len(w) > 1 and _INV[w[0]] == w[-1]):
            raise ValueError(f"{w!r} is not cyclically reduced")

    @property
    def homology(self) -> tuple[int, int]:
        w = self.letters
        return (w.count("x") - w.count("X"), w.count("y") - w.count("Y"))

    def inverse(self) -> "LoopWord":
        return LoopWord(self.base, "".join(_INV[ch] for ch in reversed(self.letters)))

    def to_json(self) -> dict:
        return {"base": self.base, "word": self.letters}


EPS = Fraction(1, 8)
_GENERIC = Fraction(1, 7)


def _push_generator(surface: SurfaceSpec, base: str, letter: str) -> MappingClass:
    x0, y0 = surface.marked.positions[surface.marked.index(base)]
    others = [p for n, p in zip(surface.marked.points, surface.marked.positions) if n != base]
    horizontal = letter.lower() == "x"
    for px, py in others:
        d = (py - y0) % 1 if horizontal else (px - x0) % 1
        if d <= EPS or d >= 1 - EPS:
            raise ValueError(f"loop {letter} through {base} passes too close to another marked point")
    if horizontal:
        left = line_class(surface, (1, 0), (x0 + _GENERIC, y0 + EPS))
        right = line_class(surface, (1, 0), (x0 + _GENERIC, y0 - EPS))
    else:
        left = line_class(surface, (0, 1), (x0 - EPS, y0 + _GENERIC))
        right = line_class(surface, (0, 1), (x0 + EPS, y0 + _GENERIC))
    m = twist(left) * twist(right, -1)
    return m if letter.islower() else m.inverse()


def point_push(surface: SurfaceSpec, gamma: LoopWord) -> MappingClass:
    """Push the base point around gamma: product of T_left ∘ T_right⁻¹ over the letters."""
    if surface.n_marked < 2:
        raise ValueError("point pushes need at least two marked points")
    m = identity(surface)
    for ch in gamma.letters:
        m = m * _push_generator(surface, gamma.base, ch)
    return MappingClass(surface, m.word, m.shadow, label=f"push[{gamma.base}:{gamma.letters}]")


def loop_walk(surface: SurfaceSpec, gamma: LoopWord):
    """gamma as a reduced cyclic dual walk on the one-vertex torus whose vertex is the other marked point."""
    if surface.n_marked != 2:
        raise ValueError("the filling test is implemented for two marked points")
    tri = one_vertex_torus()
    bx, by = surface.marked.positions[surface.marked.index(gamma.base)]
    ox, oy = [p for n, p in zip(surface.marked.points, surface.marked.positions) if n != gamma.base][0]
    start = (bx - ox + Fraction(1, 101), by - oy + Fraction(1, 103))
    seg = {"x": segment_crossings(tri, start, (1, 0)), "y": segment_crossings(tri, start, (0, 1))}
    xs = []
    for ch in gamma.letters:
        part = seg[ch.lower()]
        if ch.isupper():
            part = [(e, tri.other_side(*side)) for e, side in reversed(part)]
        xs.extend(part)
    xs = reduce_crossings(tri, xs)
    return tri, crossings_to_walk(tri, xs)


def is_filling(surface: SurfaceSpec, gamma: LoopWord, bound: int | None = None) -> bool:
    """Does gamma meet every essential simple closed curve of the torus minus the other point?

    Those curves are the slopes.  A slope missed by gamma carries all of
    gamma's homology, so when that homology is nonzero a single slope decides.
    A null-homologous loop is tested against every slope of size up to the
    word length (or ``bound``).
    """
    if not gamma.letters:
        return False
    tri, walk = loop_walk(surface, gamma)
    if not walk:
        return False
    s1 = make_surface(1, 1)
    h = gamma.homology
    if h != (0, 0):
        p, q = primitive(h)
        return linked_lifts(walk, slope_class(s1, p, q).walk) > 0
    n = bound or len(gamma.letters)
    from math import gcd
    for p, q in iproduct(range(0, n + 1), range(-n, n + 1)):
        if gcd(p, q) == 1 and (p > 0 or q > 0) and abs(p) + abs(q) <= n + 1:
            if linked_lifts(walk, slope_class(s1, p, q).walk) == 0:
                return False
    return True


def rel_class(m: MappingClass, keep: MarkedSet) -> MappingClass:
    """The induced class after forgetting the marked points outside ``keep``."""
    names = m.surface.marked.points
    keep_names = tuple(keep.points) if isinstance(keep, MarkedSet) else tuple(keep)
    if not set(keep_names) <= set(names):
        raise MarkedSetMismatch(f"{keep_names} not contained in {names}")
    idx = {names.index(n) for n in keep_names}
    if m.perm is None or {m.perm[i] for i in idx} != idx:
        raise NotPreserved(f"{m.label or 'map'} does not preserve {keep_names}")
    if set(keep_names) == set(names):
        return m
    word = []
    surf = None
    for c, p in m.word:
        f = forget_punctures(c, keep_names)
        if f == INESSENTIAL or f.is_peripheral:
            continue
        surf = f.surface
        word.append((f, p))
    if surf is None:
        surf = _forgotten_surface(m.surface, keep_names)
    word = tuple((CurveClass(surf, f.weights), p) for f, p in word)
    return MappingClass(surf, word, m.shadow, label=f"{m.label}|{','.join(keep_names)}")


def _forgotten_surface(surface: SurfaceSpec, keep_names) -> SurfaceSpec:
    probe = axis_curve(surface, (1, 0))
    return forget_punctures(probe, keep_names).surface
