from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from curvelab.curves import slope_class
from curvelab.dynamics import (Inconclusive, NotHyperbolic, ProjectionNotConstant, estimate_from_samples,
                               independence_test, monotone_projection_check, project_axis, quasi_axis,
                               separation_growth, translation_estimate)
from curvelab.experiments import shipped_curve, shipped_loop
from curvelab.graphs import CURVE, SURVIVING
from curvelab.mcg import act, anosov, axis_curve, identity, is_filling, point_push, twist
from curvelab.surfaces import make_surface


@pytest.fixture(scope="module")
def push():
    surface, gamma = shipped_loop()
    return point_push(surface, gamma)


@pytest.fixture(scope="module")
def push_axis(push):
    return quasi_axis(push, shipped_curve("horizontal", 2), 8)


def test_estimate_from_samples():
    upper, lower, slack = estimate_from_samples([(n, n + 1) for n in range(1, 11)])
    assert upper == Fraction(11, 10)
    assert slack == Fraction(1, 2)
    assert lower == 1
    assert estimate_from_samples([(1, None)]) == (None, None, None)


@given(st.integers(1, 5), st.integers(0, 3))
def test_linear_growth_lower_bound(t, c):
    upper, lower, slack = estimate_from_samples([(n, t * n + c) for n in range(1, 9)])
    assert 0 < lower <= t <= upper


def test_identity_is_inconclusive():
    s = make_surface(1, 2)
    x = shipped_curve("horizontal", 2)
    est = translation_estimate(identity(s), SURVIVING, x, n_max=4, weight_bound=10)
    assert est.upper == 0 and est.lower == 0
    assert est.verdict == "Inconclusive"
    with pytest.raises(NotHyperbolic):
        quasi_axis(identity(s), x, 4, weight_bound=10)


def test_anosov_on_closed_torus():
    s = make_surface(1, 0)
    est = translation_estimate(anosov(s), CURVE, slope_class(s, 1, 0), n_max=12)
    assert est.verdict == "Hyperbolic"
    assert [d for _, d in est.samples] == list(range(1, 13))
    assert est.bound_kind == "exact"


def test_twist_fixes_its_curve():
    s = make_surface(1, 2)
    a = axis_curve(s, (1, 0))
    est = translation_estimate(twist(a), SURVIVING, shipped_curve("vertical", 2), n_max=4, weight_bound=10)
    assert est.verdict == "Inconclusive"


def test_push_is_hyperbolic(push):
    surface, gamma = shipped_loop()
    assert is_filling(surface, gamma)
    assert push.shadow == ((1, 0), (0, 1))
    est = translation_estimate(push, SURVIVING, shipped_curve("horizontal", 2), n_max=10)
    assert est.verdict == "Hyperbolic"
    assert est.lower >= 1
    assert [d for _, d in est.samples] == [n + 1 for n in range(1, 11)]


def test_monotone_projection():
    big, gamma = shipped_loop(3)
    rep = monotone_projection_check(point_push(big, gamma), ("p1", "p2"), shipped_curve("horizontal", 3), 6)
    assert rep.passed and rep.equivariance_failures == 0
    assert all(dp <= du for _, dp, du in rep.rows)


def test_translated_axis_matches_conjugate(push_axis):
    phi = anosov(push_axis.base.surface)
    moved = push_axis.translate(phi)
    conj = push_axis.element.conjugate(phi)
    for i, p in push_axis.points.items():
        if i > 0:
            assert act(conj, moved.points[i - 1]) == moved.points[i]


def test_projection_and_independence(push_axis):
    assert project_axis(push_axis) == (1, 0)
    phi = anosov(push_axis.base.surface)
    assert independence_test(push_axis, push_axis, 0).verdict == "Not independent"
    rep = independence_test(push_axis, push_axis.translate(phi ** 3), 2)
    assert rep.verdict == "Independent" and rep.distance == 3


def test_nontrivial_shadow_has_no_constant_projection():
    s = make_surface(1, 2)
    phi = anosov(s)
    x = shipped_curve("horizontal", 2)
    est = translation_estimate(phi, SURVIVING, x, n_max=4, weight_bound=10)
    if est.verdict != "Hyperbolic":
        pytest.skip("band too small to certify the Anosov element here")
    with pytest.raises(ProjectionNotConstant):
        project_axis(quasi_axis(phi, x, 4, weight_bound=10, estimate=est))


def test_separation_growth():
    s = make_surface(1, 2)
    growth = separation_growth(anosov(s), shipped_curve("horizontal", 2), 6)
    assert growth == [(k, k) for k in range(7)]
