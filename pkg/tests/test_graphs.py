import json
import random
from collections import deque
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from curvelab.curves import intersection_number, normal_class, slope_class
from curvelab.graphs import (CURVE, SURVIVING, DistanceTable, SampleSpec, Unresolved, _adjacent, cache_entries,
                             deficiency_doubled, delta_estimate, distance, enumerate_classes, farey_distance,
                             farey_path, gromov_product, neighbors, set_cache_dir, store, clear_memory_cache)
from curvelab.mcg import axis_curve
from curvelab.surfaces import make_surface

S0 = make_surface(1, 0)
S2 = make_surface(1, 2)


def brute_farey(a, b, bound):
    """BFS over primitive slopes with entries bounded by ``bound``."""
    verts = [(p, q) for p in range(0, bound + 1) for q in range(-bound, bound + 1)
             if gcd(p, q) == 1 and (p > 0 or q > 0)]
    norm = lambda s: s if (s[0] > 0 or (s[0] == 0 and s[1] > 0)) else (-s[0], -s[1])
    a, b = norm(a), norm(b)
    dist = {a: 0}
    dq = deque([a])
    while dq:
        u = dq.popleft()
        if u == b:
            return dist[u]
        for v in verts:
            if v not in dist and abs(u[0] * v[1] - u[1] * v[0]) == 1:
                dist[v] = dist[u] + 1
                dq.append(v)
    return None


def test_closed_neighbors():
    nb = {c.slope for c in neighbors(slope_class(S0, 1, 0), CURVE, 10)}
    assert (0, 1) in nb and (1, 1) in nb
    assert (5, 3) not in nb


def test_surviving_neighbors_skip_separating():
    sep = normal_class(S2, (2, 2, 0, 2, 2, 2))
    nb = neighbors(axis_curve(S2, (1, 0)), SURVIVING, 12)
    assert nb and sep not in nb
    assert all(intersection_number(axis_curve(S2, (1, 0)), c) <= 1 for c in nb)


def test_farey_values():
    assert farey_distance((1, 0), (0, 1)) == 1
    assert farey_distance((0, 1), (5, 3)) == 3
    assert farey_distance((1, 0), (5, 3)) == 2
    assert farey_distance((2, 1), (2, 1)) == 0
    assert brute_farey((0, 1), (5, 3), 6) == 3


slope = st.tuples(st.integers(0, 6), st.integers(-6, 6)).filter(lambda s: gcd(*s) == 1 and (s[0] > 0 or s[1] > 0))


@given(slope, slope)
def test_farey_matches_bfs(a, b):
    assert farey_distance(a, b) == brute_farey(a, b, 13)
    path = farey_path(a, b)
    assert len(path) - 1 == farey_distance(a, b)
    assert all(abs(u[0] * v[1] - u[1] * v[0]) == 1 for u, v in zip(path, path[1:]))


def test_closed_distance_is_exact():
    r = distance(slope_class(S0, 0, 1), slope_class(S0, 5, 3), CURVE)
    assert r.value == 3 and r.certified == "exact"
    assert distance(slope_class(S0, 2, 1), slope_class(S0, 2, 1), CURVE).value == 0


def test_surviving_distance_path():
    classes = enumerate_classes(S2, 12, SURVIVING)
    rng = random.Random(0)
    for _ in range(30):
        a, b = rng.choice(classes), rng.choice(classes)
        r = distance(a, b, SURVIVING)
        assert r.resolved
        assert len(r.witness_path) - 1 == r.value
        assert all(_adjacent(u, v) for u, v in zip(r.witness_path, r.witness_path[1:]))
        # forgetting the points cannot increase distance
        assert farey_distance(a.slope, b.slope) <= r.value


def test_truncation_reports_lower_bound():
    a, b = slope_class(S0, 0, 1), slope_class(S0, 5, 3)
    classes = enumerate_classes(S2, 12, SURVIVING)
    far = max(((x, y) for x in classes[:10] for y in classes),
              key=lambda p: distance(p[0], p[1], SURVIVING).value)
    d = distance(*far, SURVIVING).value
    r = distance(*far, SURVIVING, radius_cap=d - 2)
    assert not r.resolved
    assert r.lower_bound >= d - 1


def test_gromov_product():
    x, y, w = slope_class(S0, 1, 0), slope_class(S0, 0, 1), slope_class(S0, 1, 1)
    assert gromov_product(x, x, x, CURVE) == 0
    assert gromov_product(w, y, w, CURVE) == 0
    assert gromov_product(x, y, w, CURVE) == Fraction(1, 2)


@given(st.integers(0, 10 ** 6))
def test_repeated_vertex_has_no_deficiency(seed):
    rng = random.Random(seed)
    table = DistanceTable(S2, SURVIVING, 10)
    i, j, k = (rng.randrange(len(table.vertices)) for _ in range(3))
    for q in ([i, i, j, k], [i, j, i, k], [i, j, k, k], [i, j, k, j]):
        d = [[table.d(a, b) for b in q] for a in q]
        assert deficiency_doubled(d) == 0


def test_delta_estimate_small():
    rep = delta_estimate(S0, CURVE, SampleSpec(quadruples=500, seed=3))
    assert rep.resolved == 500
    assert 0 <= rep.worst <= 2
    again = delta_estimate(S0, CURVE, SampleSpec(quadruples=500, seed=3))
    assert again.to_json() == rep.to_json()


def test_store_persistence(tmp_path):
    clear_memory_cache()
    set_cache_dir(tmp_path)
    first = store(S2, SURVIVING, 8)
    [entry] = cache_entries(tmp_path)
    data = json.loads(entry.read_text())
    assert data["adjacency"] == first.adj
    clear_memory_cache()
    assert store(S2, SURVIVING, 8).adj == first.adj
    set_cache_dir(None)
    clear_memory_cache()
