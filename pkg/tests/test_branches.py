from fractions import Fraction as F

from kregular.branches import Edge, bezout_pair, edges, lower_hull, planar_branches
from kregular.polysys import parse, substitute_curve


def G(text):
    return parse("vars: x y\neq: " + text + "\n")


def test_lower_hull_drops_collinear_and_upper_points():
    assert lower_hull([(0, 2), (2, 1), (4, 0), (1, 3)]) == [(0, 2), (4, 0)]
    assert lower_hull([(0, 4), (2, 1), (3, 0), (1, 5)]) == [(0, 4), (2, 1), (3, 0)]


def test_edge_data():
    e = Edge.of((0, 4), (2, 0))
    assert (e.p, e.q, e.r, e.n, e.m, e.N) == (4, 2, 2, 2, 1, 4)
    assert e.A_S == 4 and e.A == 2


def test_bezout_pair():
    for m, n in [(1, 1), (2, 3), (3, 2), (5, 3), (1, 4)]:
        a, b = bezout_pair(m, n)
        assert a * m - b * n == 1


def _is_solution(g, curve, order):
    ser = substitute_curve(g, curve, order)
    return all(v == (0,) for v in ser)


def test_branches_are_solutions():
    for text in ["x^2 - y^3", "x^2*y - y^4", "(y - x^2)^2 - y^5", "x^3 - x*y^3", "x^2 - y^2 + x^3",
                 "(x - y^2)*(y - x^2)", "y - x^2 - y^3"]:
        g = G(text)
        curves, notes = planar_branches(g, 10)
        assert curves, text
        for c in curves:
            assert _is_solution(g, c, 10), (text, c)


def test_branch_counts():
    assert len(planar_branches(G("x^2*y - y^4"), 6)[0]) == 2
    assert len(planar_branches(G("x^3 - x*y^3"), 6)[0]) == 2
    assert len(planar_branches(G("x*y*(x - y)"), 6)[0]) == 3


def test_non_rational_roots_are_reported():
    curves, notes = planar_branches(G("x^2 + y^2"), 6)
    assert curves == []
    assert any("non-rational" in n for n in notes)


def test_cusp_expansion():
    curves, _ = planar_branches(G("x^2 - y^3"), 4)
    assert curves == [[(0, 0), (0, 2), (6, 0), (0, 0)]]
