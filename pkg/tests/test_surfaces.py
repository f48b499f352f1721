from fractions import Fraction

import pytest

from curvelab.surfaces import (Triangulation, UnsupportedBackend, check_triangulation, flip, locate, make_surface,
                               model_triangulation, one_vertex_torus, split_edge, trace_segment)


@pytest.mark.parametrize("n,counts", [(0, (1, 3, 2)), (1, (1, 3, 2)), (2, (2, 6, 4)), (3, (3, 9, 6)), (4, (4, 12, 8))])
def test_model_counts(n, counts):
    s = make_surface(1, n)
    t = s.triangulation
    assert (t.n_vertices, t.n_edges, t.n_triangles) == counts
    assert s.n_marked == n
    assert s.is_closed == (n == 0)
    rep = check_triangulation(t)
    assert rep.ok, rep.failures
    assert rep.euler == 0


@pytest.mark.parametrize("genus,n", [(2, 0), (0, 3), (1, 5)])
def test_unsupported(genus, n):
    with pytest.raises(UnsupportedBackend):
        make_surface(genus, n)


def test_missing_gluing_reported():
    t = one_vertex_torus()
    # the second copy of edge 2 becomes a fresh edge 3, so neither has a partner
    second = ((3, 1),) + t.triangles[1][1:]
    broken = Triangulation(t.n_vertices, t.edges + ((0, 0),), (t.triangles[0], second), t.coords)
    rep = check_triangulation(broken)
    assert not rep.ok
    assert sum("unpaired side" in f for f in rep.failures) == 2


def test_json_round_trip():
    for n in range(5):
        t = model_triangulation(max(n, 1))
        assert Triangulation.from_json(t.to_json()) == t


def test_split_and_flip_stay_valid():
    t = one_vertex_torus()
    for e in range(3):
        t2, _ = split_edge(t, e)
        assert check_triangulation(t2).ok
        for f in range(t2.n_edges):
            try:
                t3 = flip(t2, f)
            except ValueError:
                continue
            assert check_triangulation(t3).ok


def test_locate_and_trace():
    t = model_triangulation(2)
    tt, shift = locate(t, (Fraction(1, 7), Fraction(3, 8)))
    assert 0 <= tt < t.n_triangles
    # a closed horizontal line crosses sides and comes back to its start triangle
    sides = trace_segment(t, (Fraction(1, 7), Fraction(3, 8)), (1, 0))
    assert sides
    assert sides[0][0] == tt
