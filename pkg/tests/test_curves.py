import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from curvelab.arrangements import Arrangement, bigon_intersection, class_of, realize
from curvelab.curves import (INESSENTIAL, MatchingViolation, NotConnected, NullClass, algebraic_intersection,
                             forget_punctures, intersection_number, is_surviving, line_class, normal_class,
                             slope_class, slope_weights)
from curvelab.graphs import CURVE, SURVIVING, _adjacent, enumerate_classes
from curvelab.mcg import axis_curve
from curvelab.surfaces import make_surface

S1 = make_surface(1, 1)
S2 = make_surface(1, 2)

slopes = st.tuples(st.integers(-7, 7), st.integers(-7, 7)).filter(lambda s: gcd(*s) == 1)


def test_base_slope():
    c = normal_class(S1, slope_weights(1, 0))
    assert c.slope == (1, 0)
    assert c.weights == (0, 1, 1)


def test_bad_weights():
    with pytest.raises(NullClass):
        normal_class(S1, (0, 0, 0))
    with pytest.raises(NotConnected):
        normal_class(S1, (0, 2, 2))
    with pytest.raises(MatchingViolation):
        normal_class(S1, (1, 0, 0))


@given(slopes, slopes)
def test_one_vertex_intersection_is_determinant(a, b):
    (p, q), (r, s) = a, b
    assert intersection_number(slope_class(S1, p, q), slope_class(S1, r, s)) == abs(p * s - q * r)


def test_equal_classes_do_not_meet():
    for c in enumerate_classes(S2, 10, CURVE):
        assert intersection_number(c, c) == 0


def test_fixture_pair_against_bigon_oracle():
    h, v = axis_curve(S2, (1, 0)), axis_curve(S2, (0, 1))
    # bigon reduction of the straight realizations
    assert bigon_intersection(h, v) == 1
    assert intersection_number(h, v) == 1


@given(st.integers(0, 10 ** 6))
def test_intersection_matches_bigon_reduction(seed):
    rng = random.Random(seed)
    classes = enumerate_classes(S2, 10, CURVE)
    a, b = rng.choice(classes), rng.choice(classes)
    assert intersection_number(a, b) == bigon_intersection(a, b, rng)
    assert intersection_number(a, b) >= algebraic_intersection(a, b)


def test_realize_round_trip():
    rng = random.Random(5)
    classes = enumerate_classes(S2, 14, CURVE) + enumerate_classes(make_surface(1, 3), 10, CURVE)
    for c in rng.sample(classes, 100):
        assert class_of(realize(c)) == c


def test_line_class_agrees_with_slopes():
    for p, q in [(1, 0), (0, 1), (1, 1), (2, 1), (1, -3), (3, 5)]:
        assert line_class(S1, (p, q), (Fraction(1, 7), Fraction(3, 11))) == slope_class(S1, p, q)


def test_surviving_matches_region_count():
    # a curve survives exactly when its complement is connected
    for c in enumerate_classes(S2, 10, CURVE):
        regions = Arrangement(S2, (c.weights,), tuple((0,) * w for w in c.weights)).regions
        assert (len(regions) == 1) == is_surviving(c)


def test_twice_punctured_disk_boundary():
    c = normal_class(S2, (2, 2, 0, 2, 2, 2))
    assert not is_surviving(c)
    assert c.homology == (0, 0)
    assert forget_punctures(c, ()) == INESSENTIAL
    assert c not in enumerate_classes(S2, 12, SURVIVING)


def test_forget_to_slope():
    h = axis_curve(S2, (1, 0))
    assert forget_punctures(h, ()).slope == (1, 0)
    assert forget_punctures(h, ("p1",)).weights == (0, 1, 1)


def test_forget_once_punctured_disk():
    s3 = make_surface(1, 3)
    names = s3.marked.points
    # the link of a vertex bounds a once-punctured disk; with that point forgotten it is inessential
    from curvelab.curves import vertex_link
    for v in range(3):
        c = normal_class(s3, vertex_link(s3.triangulation, v))
        kept = tuple(n for i, n in enumerate(names) if i != v)
        assert forget_punctures(c, kept) == INESSENTIAL


def test_forget_is_one_lipschitz():
    classes = enumerate_classes(S2, 10, SURVIVING)
    for i, a in enumerate(classes):
        for b in classes[i + 1:]:
            if _adjacent(a, b):
                fa, fb = forget_punctures(a, ("p1",)), forget_punctures(b, ("p1",))
                assert intersection_number(fa, fb) <= 1
