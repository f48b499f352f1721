"""Orbits of mapping classes in curve graphs: translation lengths, axes, projections.

Orbit points of a pseudo-Anosov class grow exponentially in weight, so orbit
distances on a marked surface are measured in an *orbit band*: level k holds a
copy of the weight-bounded vertex set standing for its image under mᵏ.  Inside
a level, edges are the usual i ≤ 1 edges.  Between levels k and k+1, u and v
are joined when i(u, m·v) ≤ 1 and identified when u = m·v.  Every edge is a
genuine edge of the curve graph, so band distances bound true distances from
above, and a short m-invariant curve collapses the levels.

On the closed torus orbits are slopes moved by the shadow matrix and distances
come from the exact Farey oracle.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .curves import CurveClass, INESSENTIAL, forget_punctures, is_surviving, primitive
from .graphs import (CURVE, SURVIVING, GraphKind, _adjacent, farey_distance, store)
from .mcg import MappingClass, act, rel_class


class Inconclusive(RuntimeError):
    pass


class NotHyperbolic(ValueError):
    pass


class ProjectionNotConstant(ValueError):
    pass


def _shadow_slope(matrix, s, power: int = 1):
    (a, b), (c, d) = matrix
    for _ in range(abs(power)):
        if power > 0:
            s = (a * s[0] + b * s[1], c * s[0] + d * s[1])
        else:
            s = (d * s[0] - b * s[1], -c * s[0] + a * s[1])
    return primitive(s)


class OrbitBand:
    def __init__(self, m: MappingClass, kind: GraphKind = SURVIVING, weight_bound: int = 12, levels: int = 12,
                 vertices=None):
        self.m = m
        self.kind = kind
        self.weight_bound = weight_bound
        self.levels = levels
        surface = m.surface
        if vertices is None:
            st = store(surface, kind, weight_bound)
            verts, same = st.vertices, st.adj
        else:
            verts = list(vertices)
            same = [[j for j, v in enumerate(verts) if _adjacent(u, v)] for u in verts]
        self.vertices = verts
        self.index = {v.weights: i for i, v in enumerate(verts)}
        images = [act(m, v) for v in verts]
        self.images = images
        cross, ident = [], []
        for j, mv in enumerate(images):
            i = self.index.get(mv.weights)
            if i is not None:
                ident.append((i, j))
            for i, u in enumerate(verts):
                if u.weights != mv.weights and _adjacent(u, mv):
                    cross.append((i, j))
        self.cross, self.ident = cross, ident
        n = len(verts)
        ks = range(-levels, levels + 1)
        parent = {(k, i): (k, i) for k in ks for i in range(n)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for k in ks:
            if k + 1 > levels:
                continue
            for i, j in ident:
                a, b = find((k, i)), find((k + 1, j))
                if a != b:
                    parent[max(a, b)] = min(a, b)
        self._find = find
        adj: dict = {}

        def link(x, y):
            x, y = find(x), find(y)
            if x != y:
                adj.setdefault(x, set()).add(y)
                adj.setdefault(y, set()).add(x)

        for k in ks:
            for i in range(n):
                for j in same[i]:
                    link((k, i), (k, j))
            if k + 1 <= levels:
                for i, j in cross:
                    link((k, i), (k + 1, j))
        self.adj = {x: sorted(ys) for x, ys in adj.items()}
        self._bfs: dict = {}

    def node(self, level: int, c: CurveClass):
        return self._find((level, self.index[c.weights]))

    def _search(self, src):
        if src not in self._bfs:
            dist, parent = {src: 0}, {src: None}
            dq = deque([src])
            while dq:
                u = dq.popleft()
                for v in self.adj.get(u, ()):
                    if v not in dist:
                        dist[v], parent[v] = dist[u] + 1, u
                        dq.append(v)
            self._bfs[src] = dist, parent
        return self._bfs[src]

    def distance(self, x: CurveClass, i: int, j: int) -> int | None:
        """Band distance between the level-i and level-j copies of x."""
        src, dst = self.node(i, x), self.node(j, x)
        return self._search(src)[0].get(dst)

    def geodesic(self, x: CurveClass, i: int, j: int) -> list | None:
        src, dst = self.node(i, x), self.node(j, x)
        dist, parent = self._search(src)
        if dst not in dist:
            return None
        out = [dst]
        while parent[out[-1]] is not None:
            out.append(parent[out[-1]])
        return out[::-1]

    def realize(self, node) -> CurveClass:
        """The curve m^k·v standing for node (k, v); only small |k| is affordable."""
        k, i = node
        c = self.vertices[i]
        step = self.m if k >= 0 else self.m.inverse()
        for _ in range(abs(k)):
            c = act(step, c)
        return c

    def invariant_vertices(self) -> list[CurveClass]:
        return [self.vertices[i] for i, j in self.ident if i == j]


@dataclass
class TranslationEstimate:
    element: str
    graph: str
    samples: list
    upper: Fraction | None
    lower: Fraction | None
    slack: Fraction | None
    verdict: str
    weight_bound: int | None
    bound_kind: str
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"element": self.element, "graph": self.graph,
                "samples": [{"n": n, "distance": d, "resolved": d is not None} for n, d in self.samples],
                "upper": _s(self.upper), "lower": _s(self.lower), "slack": _s(self.slack),
                "verdict": self.verdict, "weight_bound": self.weight_bound, "bound_kind": self.bound_kind,
                "notes": self.notes}


def _s(x):
    return None if x is None else str(x)


def _orbit_distances(m: MappingClass, base: CurveClass, kind: GraphKind, n_max: int, weight_bound: int,
                     band: OrbitBand | None = None):
    if base.surface.is_closed or (kind.name == "curve" and base.surface.n_marked == 0):
        s = base.slope
        return [(n, farey_distance(s, _shadow_slope(m.shadow, s, n))) for n in range(1, n_max + 1)], None
    band = band or OrbitBand(m, kind, weight_bound, levels=n_max + 2)
    return [(n, band.distance(base, 0, n)) for n in range(1, n_max + 1)], band


def estimate_from_samples(samples) -> tuple:
    """(upper, lower, slack) from orbit distances d_n = d(x, gⁿx).

    The slack is the largest sampled Gromov product ⟨x, g²ⁿx⟩ at gⁿx, i.e.
    (2dₙ − d₂ₙ)/2; the lower bound is max over n of (dₙ − 2·slack)/n.
    """
    d = {n: v for n, v in samples if v is not None}
    if not d:
        return None, None, None
    upper = min(Fraction(v, n) for n, v in d.items())
    slacks = [Fraction(2 * d[n] - d[2 * n], 2) for n in d if 2 * n in d]
    slack = max(slacks + [Fraction(0)])
    lower = max(Fraction(v, 1) / n - 2 * slack / n for n, v in d.items())
    return upper, max(lower, Fraction(0)) if upper == 0 else lower, slack


def translation_estimate(m: MappingClass, kind: GraphKind, base: CurveClass, n_max: int = 10,
                         weight_bound: int = 12, band: OrbitBand | None = None) -> TranslationEstimate:
    samples, band = _orbit_distances(m, base, kind, n_max, weight_bound, band)
    upper, lower, slack = estimate_from_samples(samples)
    if upper is None:
        raise Inconclusive(f"no orbit distance of {m.label} resolved up to n = {n_max}")
    verdict = "Hyperbolic" if lower is not None and lower > 0 else "Inconclusive"
    graph = "Farey (exact)" if band is None else f"{kind.name} orbit band"
    notes = []
    if band is not None:
        inv = band.invariant_vertices()
        notes.append(f"{len(inv)} vertices of weight <= {weight_bound} fixed by the element")
    return TranslationEstimate(m.label, graph, samples, upper, lower, slack, verdict,
                               None if band is None else weight_bound,
                               "exact" if band is None else "certified within the orbit band", notes)


@dataclass
class MonotoneReport:
    rows: list  # (i, d rel P, d rel U)
    equivariance_failures: int
    passed: bool

    def to_json(self) -> dict:
        return {"rows": [{"i": i, "d_P": a, "d_U": b} for i, a, b in self.rows],
                "equivariance_failures": self.equivariance_failures, "passed": self.passed}


def monotone_projection_check(m_u: MappingClass, keep, base: CurveClass, n_max: int = 6,
                              weight_bound: int = 12) -> MonotoneReport:
    """Compare orbit distances rel U (all marked points of m_u) and rel P = keep.

    The rel-P band is built on the images of the rel-U vertex set under
    forgetting, so forgetting maps the rel-U band into it level by level.
    """
    band_u = OrbitBand(m_u, SURVIVING, weight_bound, levels=n_max + 2)
    m_p = rel_class(m_u, keep)
    images = []
    seen = set()
    fails = 0
    for v, mv in zip(band_u.vertices, band_u.images):
        fv = forget_punctures(v, keep)
        fmv = forget_punctures(mv, keep)
        if fv == INESSENTIAL or not is_surviving(fv):
            fails += 1
            continue
        if act(m_p, CurveClass(m_p.surface, fv.weights)).weights != fmv.weights:
            fails += 1
        if fv.weights not in seen:
            seen.add(fv.weights)
            images.append(CurveClass(m_p.surface, fv.weights))
    band_p = OrbitBand(m_p, SURVIVING, weight_bound, levels=n_max + 2, vertices=images)
    fb = CurveClass(m_p.surface, forget_punctures(base, keep).weights)
    rows = [(0, 0, 0)]
    ok = fails == 0
    for i in range(1, n_max + 1):
        dp, du = band_p.distance(fb, 0, i), band_u.distance(base, 0, i)
        rows.append((i, dp, du))
        if dp is None or du is None:
            raise Inconclusive(f"orbit distance at level {i} unresolved")
        if dp > du:
            ok = False
    return MonotoneReport(rows, fails, ok)


# --- axes and independence -----------------------------------------------------------

@dataclass
class AxisData:
    element: MappingClass
    base: CurveClass
    points: dict  # i -> CurveClass for the explicitly computed orbit points
    distances: dict  # |i - j| -> distance between orbit points
    K: Fraction
    L: Fraction
    tolerance: int = 0

    def translate(self, g: MappingClass) -> "AxisData":
        """The axis of g∘m∘g⁻¹ obtained by moving every point by g."""
        return AxisData(self.element.conjugate(g), act(g, self.base), {i: act(g, p) for i, p in self.points.items()},
                        self.distances, self.K, self.L, self.tolerance)

    def to_json(self) -> dict:
        return {"element": self.element.label, "base": list(self.base.weights),
                "points": {str(i): list(p.weights) for i, p in sorted(self.points.items())},
                "K": str(self.K), "L": str(self.L)}


def fit_quasi_geodesic(distances: dict, span: int):
    """Least (K, L) on a grid with |i−j|/K − L ≤ d ≤ K|i−j| + L for all gaps up to span."""
    gaps = [(g, distances[g]) for g in range(0, span + 1) if distances.get(g) is not None]
    for k2 in range(2, 41):
        K = Fraction(k2, 2)
        for L in range(0, 41):
            if all(g / K - L <= d <= K * g + L for g, d in gaps):
                return K, Fraction(L)
    raise NotHyperbolic("no quasi-geodesic constants on the grid")


def quasi_axis(m: MappingClass, base: CurveClass, n_max: int = 8, kind: GraphKind = SURVIVING,
               weight_bound: int = 12, n_points: int = 1, estimate: TranslationEstimate | None = None) -> AxisData:
    est = estimate or translation_estimate(m, kind, base, n_max, weight_bound)
    if est.verdict != "Hyperbolic":
        raise NotHyperbolic(f"{m.label}: translation verdict {est.verdict}")
    distances = {0: 0, **{n: d for n, d in est.samples}}
    K, L = fit_quasi_geodesic(distances, n_max)
    points = {0: base}
    fwd, bwd = base, base
    inv = m.inverse()
    for i in range(1, n_points + 1):
        fwd, bwd = act(m, fwd), act(inv, bwd)
        points[i], points[-i] = fwd, bwd
    return AxisData(m, base, points, distances, K, L)


@dataclass
class IndependenceReport:
    first: str
    second: str
    projections: tuple
    distance: int
    B: Fraction
    verdict: str

    def to_json(self) -> dict:
        return {"first": self.first, "second": self.second, "projections": [list(p) for p in self.projections],
                "projected_distance": self.distance, "B": str(self.B), "verdict": self.verdict}


def project_axis(axis: AxisData) -> tuple[int, int]:
    slopes = set()
    for p in axis.points.values():
        f = forget_punctures(p, ())
        if f == INESSENTIAL:
            raise ProjectionNotConstant("an axis point dies after filling the punctures")
        slopes.add(f.slope)
    if len(slopes) != 1 or axis.element.shadow not in (((1, 0), (0, 1)), ((-1, 0), (0, -1))):
        raise ProjectionNotConstant(f"{axis.element.label} moves the projection: {sorted(slopes)}")
    return slopes.pop()


def independence_test(a1: AxisData, a2: AxisData, B) -> IndependenceReport:
    p1, p2 = project_axis(a1), project_axis(a2)
    d = farey_distance(p1, p2)
    B = Fraction(B)
    return IndependenceReport(a1.element.label, a2.element.label, (p1, p2), d, B,
                              "Independent" if d > B else "Not independent")


def separation_growth(phi: MappingClass, alpha: CurveClass, k_max: int = 6) -> list[tuple[int, int]]:
    """Farey distances d(α, φᵏα) after forgetting the marked points."""
    s = forget_punctures(alpha, ()).slope if alpha.surface.n_marked else alpha.slope
    return [(k, farey_distance(s, _shadow_slope(phi.shadow, s, k))) for k in range(0, k_max + 1)]


def pair_costs(psi: MappingClass, phi: MappingClass, k: int, base: CurveClass, weight_bound: int = 12):
    """Explicit path lengths from base to s·base for s in {ψ, ψ², s₂, s₂²}, s₂ = φᵏψφ⁻ᵏ.

    ψ and ψ² are measured in ψ's band.  For s₂ the path runs base → φᵏbase,
    then along the φᵏ-image of the ψ path, then back, so its length is
    2·d(base, φᵏbase) + d(base, ψ base).  Also returns the curves along the
    ψ path, which is the base segment for counting.
    """
    band = OrbitBand(psi, SURVIVING, weight_bound, levels=3)
    l1, l2 = band.distance(base, 0, 1), band.distance(base, 0, 2)
    lp = 0
    if k:
        lp = OrbitBand(phi, SURVIVING, weight_bound, levels=k + 1).distance(base, 0, k)
    if None in (l1, l2, lp):
        raise Inconclusive("orbit displacement not reached inside the band")
    segment = [band.realize(n) for n in band.geodesic(base, 0, 1)]
    return {"a": l1, "aa": l2, "b": 2 * lp + l1, "bb": 2 * lp + l2}, segment
