from fractions import Fraction as F

import pytest

from kregular import newton as nw
from kregular.errors import CapExceeded, NotConvenient, NotSimple, ShapeMismatch, ZeroMap
from kregular.iteration import analyze
from kregular.polysys import parse


def G(text):
    return parse("vars: x y\neq: " + text + "\n")


def seg_of(text, full=True):
    P = nw.build_polygon(G(text))
    return P, (P.full_segments if full else P.segments)


def test_build_polygon():
    P, segs = seg_of("x^2 - y^4")
    assert P.convenient and [(s.left, s.right) for s in segs] == [((0, 4), (2, 0))]
    P = nw.build_polygon(G("x^2*y - y^4"))
    assert P.split == (0, 1) and not P.convenient
    assert [(s.left, s.right) for s in P.segments] == [((0, 3), (2, 0))]
    P, segs = seg_of("x^3 + y^3")
    assert [(s.left, s.right) for s in segs] == [((0, 3), (3, 0))]
    with pytest.raises(ZeroMap):
        nw.build_polygon(G("0"))
    with pytest.raises(ShapeMismatch):
        nw.build_polygon(parse("vars: x y z\neq: x\n"))


def test_segment_data():
    _, (s,) = seg_of("x^2 - y^4")
    assert nw.segment_data(s) == (4, 2, 2, 2, 1, 4, 2, 4)
    _, (s,) = seg_of("x^2*y - y^4")
    p, q, r, n, m, N, A, A_S = nw.segment_data(s)
    assert (p, q, r, n, m, N) == (3, 2, 1, 3, 2, 8)
    assert nw.branch_k(s) == 5
    _, (s,) = seg_of("x^3 + y^3")
    assert nw.segment_data(s)[:6] == (3, 3, 3, 1, 1, 3)


def test_phi():
    P, (s,) = seg_of("x^2 - y^4")
    assert nw.phi(s, P.support) == (-1, 0, 1)          # V^2 - W^2
    P, (s,) = seg_of("x^2*y - y^4")
    assert nw.phi(s, P.support) == (-1, 1)             # V - W
    P, (s,) = seg_of("(y - x^2)^2 - y^3")
    assert nw.phi(s, P.support) == (1, -2, 1)          # (V - W)^2


def test_factor_analysis():
    f = nw.factor_analysis((-1, 0, 1))
    assert sorted(x.root for x in f) == [-1, 1] and all(x.simple for x in f)
    f = nw.factor_analysis((1, -2, 1))
    assert len(f) == 1 and f[0].multiplicity == 2 and f[0].root == 1
    f = nw.factor_analysis((1, 0, 1))
    assert len(f) == 1 and f[0].degree == 2 and f[0].irreducible and f[0].simple


def test_branch_k_table():
    assert nw.branch_k(seg_of("x^2 - y^4")[1][0]) == 2
    s = seg_of("x^2 - y^5")[1][0]
    assert (s.N, nw.branch_k(s)) == (10, 5)


def test_segment_sum_identity():
    assert nw.segment_sum_identity(seg_of("x^2 - y^4")[1][0]) == (4, 4)
    for N in range(2, 6):
        s = seg_of(f"x^{N} - y^{N}")[1][0]
        assert nw.segment_sum_identity(s) == (N * (N - 1), N * N - N)
    s = seg_of("x^2 - y^3")[1][0]
    assert nw.segment_sum_identity(s)[0] == nw.branch_k(s)


def test_milnor_examples():
    P = nw.build_polygon(G("x^3 + y^3"))
    assert nw.milnor_via_k(P) == 4 == nw.milnor_kouchnirenko(P)
    P = nw.build_polygon(G("x^2 - y^4"))
    assert nw.milnor_via_k(P) == 3 == nw.milnor_kouchnirenko(P)
    assert nw.milnor_kouchnirenko(nw.build_polygon(G("x^2 - y^3"))) == 2
    assert nw.milnor_via_k(nw.build_polygon(G("(y - x^2)^2 - y^3"))) is None


def test_local_algebra():
    assert nw.milnor_local_algebra(G("x^2 + y^2")) == 1
    assert nw.milnor_local_algebra(G("x^2*y - y^4")) == 5
    with pytest.raises(CapExceeded):
        nw.milnor_local_algebra(G("x^2*y"), degree_cap=12)


def test_non_isolated():
    P = nw.build_polygon(G("x^2*y"))
    assert not P.isolated
    assert nw.milnor_via_k(P) == nw.INFINITE
    with pytest.raises(NotConvenient):
        nw.milnor_kouchnirenko(P)
    assert nw.milnor_report(G("x^2*y^2 + y^5")).mu_via_k == nw.INFINITE
    # a simple axis factor stays isolated
    rep = nw.milnor_report(G("x^2*y + y^5"))
    assert rep.mu_via_k == rep.mu_local_algebra == 6 and rep.agree


def test_branch_curve_certified():
    cases = [("x^2 - y^4", 2), ("x^2*y - y^4", 5), ("x^3 + y^3", 2)]
    for text, k in cases:
        g = G(text)
        P = nw.build_polygon(g)
        s = P.full_segments[0]
        for f in nw.factor_analysis(nw.phi(s, P.support)):
            if f.root is None:
                continue
            curve = nw.branch_curve(s, P.support, f.root, 10)
            rep = nw.certify(g, curve)
            assert rep is not None and rep.k == k == nw.branch_k(s)


def test_branch_curve_rejects_multiple_root():
    P = nw.build_polygon(G("(y - x^2)^2 - y^3"))
    with pytest.raises(NotSimple):
        nw.branch_curve(P.segments[0], P.support, 1, 8)


def test_strict_transform():
    g = G("(y - x^2)^2 - y^3")
    P = nw.build_polygon(g)
    st = nw.strict_transform(P.segments[0], P.support, 1)
    assert (st.d1, st.e1, st.r_T, st.m_T, st.n_T, st.k) == (2, 2, 2, 1, 1, 3)
    ks = [nw.certify(g, c).k for c in nw.strict_branches(st, P.support, 10)]
    assert ks == [3, 3]
    assert nw.milnor_via_k(P, hypothesis=True) == 5 == nw.milnor_local_algebra(g)
    with pytest.raises(NotSimple):
        nw.strict_transform(nw.build_polygon(G("x^2 - y^4")).segments[0], P.support, 1)


def test_strict_transform_axis_convention():
    # (y - x^2)^2 - y^5: branches y = x^2 +- x^5 have k = 5 and mu = 9
    g = G("(y - x^2)^2 - y^5")
    P = nw.build_polygon(g)
    st = nw.strict_transform(P.segments[0], P.support, 1)
    assert (st.d1, st.e1, st.r_T) == (2, 6, 2)
    assert st.k == 5
    assert sorted(r.k for r in analyze(g)) == [5, 5]
    assert nw.milnor_via_k(P, hypothesis=True) == 9 == nw.milnor_local_algebra(g)


def test_valley_pattern():
    assert nw.valley_pattern([5, 3, 3, 4, 7])
    assert nw.valley_pattern([7, 7])
    assert not nw.valley_pattern([3, 5, 4])
    P = nw.build_polygon(G("(x^2 - y^3)*(x^3 - y^2)"))
    assert nw.valley_pattern([nw.branch_k(s) for s in P.full_segments])


def test_multi_segment_report():
    rep = nw.milnor_report(G("(x^2 - y^3)*(x^3 - y^2)"))
    assert rep.branches == [(1, 7), (1, 7)]
    assert rep.mu_via_k == rep.mu_kouchnirenko == rep.mu_local_algebra == 11
    assert rep.agree
