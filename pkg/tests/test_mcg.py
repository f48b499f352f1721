import random
from math import gcd

import numpy as np
import pytest
from hypothesis import given, strategies as st

from curvelab.curves import forget_punctures, intersection_number, linked_lifts, slope_class
from curvelab.graphs import CURVE, SURVIVING, enumerate_classes
from curvelab.mcg import (LoopWord, MappingClass, MarkedSetMismatch, NotPreserved, act, anosov, axis_curve,
                          factor_sl2, from_json, identity, is_filling, linear_map, loop_walk, point_push, rel_class,
                          twist)
from curvelab.surfaces import make_surface

S1 = make_surface(1, 1)
S2 = make_surface(1, 2)
S3 = make_surface(1, 3)
SURFACES = {1: S1, 2: S2, 3: S3}


def random_element(surface, rng, length=3):
    cores = enumerate_classes(surface, 6, CURVE)
    m = identity(surface)
    for _ in range(length):
        m = m * twist(rng.choice(cores), rng.choice((-1, 1)))
    return m


def test_twist_sign():
    t = twist(slope_class(S1, 1, 0))
    assert act(t, slope_class(S1, 0, 1)) == slope_class(S1, 1, 1)
    assert t.shadow == ((1, 1), (0, 1))


def test_twist_fixes_core():
    for c in enumerate_classes(S2, 8, CURVE):
        assert act(twist(c), c) == c


def test_identity_word():
    for c in enumerate_classes(S2, 8, CURVE):
        assert act(identity(S2), c) == c


@given(st.sampled_from([1, 2, 3]), st.integers(0, 10 ** 6))
def test_intersection_invariance(n, seed):
    rng = random.Random(seed)
    s = SURFACES[n]
    m = random_element(s, rng)
    classes = enumerate_classes(s, 8, CURVE)
    a, b = rng.choice(classes), rng.choice(classes)
    assert intersection_number(act(m, a), act(m, b)) == intersection_number(a, b)


@given(st.sampled_from([1, 2, 3]), st.integers(0, 10 ** 6))
def test_inverse_round_trip(n, seed):
    rng = random.Random(seed)
    s = SURFACES[n]
    m = random_element(s, rng)
    a = rng.choice(enumerate_classes(s, 8, CURVE))
    assert act(m.inverse(), act(m, a)) == a


@given(st.integers(0, 10 ** 6))
def test_shadow_on_slopes(seed):
    rng = random.Random(seed)
    m = random_element(S1, rng, 4)
    a = rng.choice(enumerate_classes(S1, 10, CURVE))
    image = np.array(m.shadow) @ np.array(a.homology)
    assert act(m, a).slope in {tuple(int(x) for x in image), tuple(int(-x) for x in image)}
    assert act(linear_map(S1, m.shadow), a) == act(m, a)


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
def test_factor_sl2(a, b, c):
    if a == 0 or (1 + b * c) % a:
        return
    target = np.array([[a, b], [c, (1 + b * c) // a]])
    gens = {"a": np.array([[1, 1], [0, 1]]), "b": np.array([[1, 0], [-1, 1]])}
    out = np.eye(2, dtype=int)
    for g, p in factor_sl2(target.tolist()):
        m = gens[g] if p > 0 else np.round(np.linalg.inv(gens[g])).astype(int)
        out = out @ np.linalg.matrix_power(m, abs(p))
    assert (out == target).all()


def test_anosov_shadow():
    for s in (S1, S2):
        assert anosov(s).shadow == ((2, 1), (1, 1))


def test_json_round_trip():
    m = anosov(S2) * twist(axis_curve(S2, (1, 0)), -1)
    back = from_json(S2, m.to_json())
    for c in enumerate_classes(S2, 6, CURVE):
        assert act(back, c) == act(m, c)


def test_linear_map_needs_one_vertex():
    m = linear_map(S2, ((1, 1), (0, 1)))
    with pytest.raises(MarkedSetMismatch):
        act(m, axis_curve(S2, (1, 0)))
    with pytest.raises(MarkedSetMismatch):
        act(twist(slope_class(S1, 1, 0)), axis_curve(S2, (1, 0)))


def test_loop_words():
    with pytest.raises(ValueError):
        LoopWord("p1", "xX")
    with pytest.raises(ValueError):
        LoopWord("p1", "xyX")
    assert LoopWord("p1", "xxxyy").homology == (3, 2)


def test_trivial_push_is_identity():
    m = point_push(S2, LoopWord("p1", ""))
    assert m.word == ()
    for c in enumerate_classes(S2, 8, CURVE):
        assert act(m, c) == c


@pytest.mark.parametrize("word", ["x", "y", "xy", "xxxyy", "xyXY"])
def test_push_shadow_is_identity(word):
    m = point_push(S2, LoopWord("p1", word))
    assert m.shadow in (((1, 0), (0, 1)), ((-1, 0), (0, -1)))


def test_fixture_push_moves_curves():
    m = point_push(S2, LoopWord("p1", "xxxyy"))
    moved = [c for c in enumerate_classes(S2, 8, SURVIVING) if act(m, c) != c]
    assert moved


@pytest.mark.parametrize("word,expected", [("", False), ("x", False), ("y", False), ("xy", False),
                                           ("xyXY", False), ("xxxyy", True)])
def test_is_filling(word, expected):
    assert is_filling(S2, LoopWord("p1", word)) is expected


def test_fixture_loop_meets_every_slope():
    # exhaustive: every essential curve of the torus minus p2 is a slope; all of them cross the loop
    _, walk = loop_walk(S2, LoopWord("p1", "xxxyy"))
    for p in range(0, 11):
        for q in range(-10, 11):
            if gcd(p, q) == 1 and (p > 0 or q == 1) and p + abs(q) <= 10:
                assert linked_lifts(walk, slope_class(S1, p, q).walk) > 0
    # the same through the surviving classes of weight <= 10, via their slopes
    for c in enumerate_classes(S2, 10, SURVIVING):
        s = forget_punctures(c, ()).slope
        assert linked_lifts(walk, slope_class(S1, *s).walk) > 0


def test_rel_class_of_own_set():
    m = point_push(S2, LoopWord("p1", "xxxyy"))
    assert rel_class(m, ("p1", "p2")) is m


def test_rel_class_not_preserved():
    m = linear_map(S2, ((2, 1), (1, 1)))
    with pytest.raises(NotPreserved):
        rel_class(m, ("p1", "p2"))
    with pytest.raises(MarkedSetMismatch):
        rel_class(m, ("p9",))


def test_forgetting_after_a_push_of_the_forgotten_point():
    # pushing p3 becomes trivial once p3 is forgotten
    push3 = point_push(S3, LoopWord("p3", "xy"))
    rel = rel_class(push3, ("p1", "p2"))
    for c in enumerate_classes(rel.surface, 8, CURVE):
        assert act(rel, c) == c


@given(st.integers(0, 10 ** 6))
def test_rel_class_equivariance(seed):
    rng = random.Random(seed)
    phi = anosov(S3)
    psi = point_push(S3, LoopWord("p1", "xxxyy"))
    conj = psi.conjugate(phi)
    rel = rel_class(conj, ("p1", "p2"))
    a = rng.choice(enumerate_classes(S3, 8, SURVIVING))
    left = forget_punctures(act(conj, a), ("p1", "p2"))
    right = act(rel, type(a)(rel.surface, forget_punctures(a, ("p1", "p2")).weights))
    assert left.weights == right.weights
