"""Counting quasi-morphisms on the orbit graph of a two-generator subgroup.

The group ball is the set of reduced words in a, A = a⁻¹, b, B = b⁻¹ up to
length R.  The orbit graph joins g and g·f for every short word f carrying a
cost ℓ(f), the length of an explicit curve-graph path from x₀ to f·x₀.  The
base segment w is the path for a group word; each translate h·w inside the
ball gets a directed shortcut of cost ℓ(w) − σ.  Then

    c_w(g) = d(e, g) − d_shortcut(e, g),    h(g) = c_w(g) − c_{w⁻¹}(g).

Variant: shortcut counting on the orbit graph (an Epstein–Fujiwara style count).
"""

from __future__ import annotations

import csv
import heapq
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

_INV = {"a": "A", "A": "a", "b": "B", "B": "b"}
VARIANT = "shortcut counting on the orbit graph of <s1, s2>"


class DegenerateDefect(ZeroDivisionError):
    pass


class OutsideBall(ValueError):
    pass


def reduce_word(w: str) -> str:
    out: list[str] = []
    for ch in w:
        if ch not in _INV:
            raise ValueError(f"bad letter {ch!r}")
        if out and out[-1] == _INV[ch]:
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def inverse_word(w: str) -> str:
    return "".join(_INV[ch] for ch in reversed(w))


@dataclass(frozen=True)
class QmSpec:
    w: str = "a"
    costs: tuple = (("a", 2), ("aa", 3), ("b", 8), ("bb", 9))
    sigma: Fraction | None = None
    radius: int = 8
    segment: tuple = ()  # weights of the curve-graph vertices along w, when known

    def __post_init__(self):
        table = {}
        for f, c in self.costs:
            f = reduce_word(f)
            if not f or Fraction(c) <= 0:
                raise ValueError(f"bad edge {f!r}: {c}")
            table[f] = table[inverse_word(f)] = Fraction(c)
        for ch in "ab":
            if ch not in table:
                raise ValueError(f"no cost for generator {ch}")
        object.__setattr__(self, "costs", tuple(sorted(table.items())))
        if reduce_word(self.w) != self.w or not self.w:
            raise ValueError("w must be a nonempty reduced word")
        if self.sigma is None:
            object.__setattr__(self, "sigma", self.length - 1)
        object.__setattr__(self, "sigma", Fraction(self.sigma))
        if not 0 < self.sigma <= self.length - 1:
            raise ValueError(f"sigma {self.sigma} outside (0, {self.length - 1}]")

    @property
    def cost_table(self) -> dict:
        return dict(self.costs)

    @property
    def length(self) -> Fraction:
        t = self.cost_table
        return sum((t[ch] for ch in self.w), Fraction(0))

    def to_json(self) -> dict:
        return {"w": self.w, "sigma": str(self.sigma), "radius": self.radius,
                "costs": {f: str(c) for f, c in self.costs}, "length_w": str(self.length),
                "segment": [list(v) for v in self.segment], "variant": VARIANT}

    @staticmethod
    def from_json(data: dict) -> "QmSpec":
        return QmSpec(w=data.get("w", "a"),
                      costs=tuple((f, Fraction(c)) for f, c in data.get("costs", {"a": 2, "aa": 3, "b": 8, "bb": 9}).items()),
                      sigma=None if data.get("sigma") is None else Fraction(data["sigma"]),
                      radius=int(data.get("radius", 8)),
                      segment=tuple(tuple(v) for v in data.get("segment", ())))


class GroupBall:
    def __init__(self, radius: int):
        self.radius = radius
        words = [""]
        frontier = [""]
        for _ in range(radius):
            nxt = []
            for g in frontier:
                for ch in "aAbB":
                    if not g or g[-1] != _INV[ch]:
                        nxt.append(g + ch)
            words.extend(nxt)
            frontier = nxt
        self.words = words
        self.index = {g: i for i, g in enumerate(words)}

    def __contains__(self, g: str) -> bool:
        return g in self.index

    def __len__(self) -> int:
        return len(self.words)


def _dijkstra(n: int, adj) -> list:
    dist: list = [None] * n
    dist[0] = Fraction(0)
    heap = [(Fraction(0), 0)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, c in adj[u]:
            nd = d + c
            if dist[v] is None or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


class _Model:
    def __init__(self, spec: QmSpec):
        self.spec = spec
        ball = self.ball = GroupBall(spec.radius)
        n = len(ball)
        base = [[] for _ in range(n)]
        for i, g in enumerate(ball.words):
            for f, c in spec.costs:
                j = ball.index.get(reduce_word(g + f))
                if j is not None:
                    base[i].append((j, c))
        self.base = _dijkstra(n, base)
        self.short = {}
        for seg in (spec.w, inverse_word(spec.w)):
            adj = [list(row) for row in base]
            cost = spec.length - spec.sigma
            count = 0
            for i, h in enumerate(ball.words):
                path = [reduce_word(h + seg[:k]) for k in range(1, len(seg) + 1)]
                if all(p in ball for p in path):
                    adj[i].append((ball.index[path[-1]], cost))
                    count += 1
            self.short[seg] = _dijkstra(n, adj)
            self.translates = count

    def c(self, seg: str, g: str) -> Fraction:
        i = self.ball.index.get(g)
        if i is None:
            raise OutsideBall(f"{g!r} is longer than the radius {self.spec.radius}")
        return self.base[i] - self.short[seg][i]


@lru_cache(maxsize=16)
def _model(spec: QmSpec) -> _Model:
    return _Model(spec)


def orbit_distance(spec: QmSpec, g: str) -> Fraction:
    m = _model(spec)
    g = reduce_word(g)
    if g not in m.ball:
        raise OutsideBall(g)
    return m.base[m.ball.index[g]]


def counting_value(spec: QmSpec, g: str) -> Fraction:
    return _model(spec).c(spec.w, reduce_word(g))


def qm_value(spec: QmSpec, g: str) -> Fraction:
    g = reduce_word(g)
    m = _model(spec)
    return m.c(spec.w, g) - m.c(inverse_word(spec.w), g)


def random_word(rng: random.Random, max_len: int) -> str:
    n = rng.randint(0, max_len)
    out = ""
    while len(out) < n:
        ch = rng.choice("aAbB")
        if not out or out[-1] != _INV[ch]:
            out += ch
    return out


def sample_pairs(count: int, max_len: int = 4, seed: int = 0) -> list[tuple[str, str]]:
    rng = random.Random(seed)
    return [(random_word(rng, max_len), random_word(rng, max_len)) for _ in range(count)]


def defect_estimate(spec: QmSpec, pairs) -> Fraction:
    """Largest |h(ab) − h(a) − h(b)| over the pairs; a lower bound for the defect."""
    worst = Fraction(0)
    for a, b in pairs:
        d = abs(qm_value(spec, a + b) - qm_value(spec, a) - qm_value(spec, b))
        worst = max(worst, d)
    return worst


def counting_defect(spec: QmSpec, pairs) -> Fraction:
    worst = Fraction(0)
    for a, b in pairs:
        for seg in (spec.w, inverse_word(spec.w)):
            m = _model(spec)
            d = abs(m.c(seg, reduce_word(a + b)) - m.c(seg, reduce_word(a)) - m.c(seg, reduce_word(b)))
            worst = max(worst, d)
    return worst


@dataclass
class Homogenization:
    g: str
    rows: list  # (n, h(gⁿ), h(gⁿ)/n, (h(gⁿ)+D)/n)
    estimate: Fraction
    defect: Fraction

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["g", "n", "h_gn", "h_gn_over_n", "h_plus_D_over_n"])
        for n, h, r, u in self.rows:
            wr.writerow([self.g, n, h, r, u])
        return buf.getvalue()


def homogenize(spec: QmSpec, g: str, n_max: int | None = None, defect: Fraction = Fraction(0)) -> Homogenization:
    g = reduce_word(g)
    if not g:
        return Homogenization(g, [(1, Fraction(0), Fraction(0), defect)], Fraction(0), defect)
    if n_max is None:
        n_max = spec.radius // len(g)
    rows = []
    for n in range(1, n_max + 1):
        h = qm_value(spec, g * n)
        rows.append((n, h, h / n, (h + defect) / n))
    return Homogenization(g, rows, rows[-1][2], defect)


def scl_lower_bound(spec: QmSpec, g: str, defect: Fraction, n_max: int | None = None) -> Fraction:
    """|ĥ(g)|/(2·D̂); an estimate, since the sampled D̂ can undershoot the true defect."""
    hh = homogenize(spec, g, n_max, defect).estimate
    if hh == 0:
        return Fraction(0)
    if defect == 0:
        raise DegenerateDefect(f"sampled defect is 0 while h^({g}) = {hh}")
    return abs(hh) / (2 * defect)


@dataclass
class QmReport:
    spec: QmSpec
    values: dict
    defect: Fraction
    defect_doubled_sample: Fraction
    sample_size: int
    homogenized: dict
    scl: dict
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"variant": VARIANT, "spec": self.spec.to_json(),
                "values": {g or "e": str(v) for g, v in self.values.items()},
                "defect": {"value": str(self.defect), "doubled_sample": str(self.defect_doubled_sample),
                           "sample_size": self.sample_size, "kind": "empirical lower bound"},
                "homogenized": {g: {"estimate": str(h.estimate),
                                    "table": [[n, str(a), str(b), str(c)] for n, a, b, c in h.rows]}
                                for g, h in self.homogenized.items()},
                "scl_lower_bound": {g: {"value": None if v is None else str(v),
                                        "kind": "estimate (sampled defect)"} for g, v in self.scl.items()},
                "notes": self.notes}


def qm_report(spec: QmSpec, words=("", "a", "b", "ab", "aab", "abAB"), samples: int = 500, seed: int = 0,
              max_len: int = 4) -> QmReport:
    pairs = sample_pairs(2 * samples, max_len, seed)
    d1 = defect_estimate(spec, pairs[:samples])
    d2 = defect_estimate(spec, pairs)
    values = {g: qm_value(spec, g) for g in words}
    homog, scl = {}, {}
    for g in ("a", "b"):
        homog[g] = homogenize(spec, g, defect=d2)
        try:
            scl[g] = scl_lower_bound(spec, g, d2)
        except DegenerateDefect:
            scl[g] = None
    return QmReport(spec, values, d1, d2, samples, homog, scl,
                    [f"{_model(spec).translates} translates of w inside the ball"])
