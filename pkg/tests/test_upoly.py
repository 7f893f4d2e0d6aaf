from fractions import Fraction as F

from kregular import upoly


def test_squarefree_decomposition():
    # (t - 1)^2 (t + 2)
    p = upoly.mul(upoly.mul([-1, 1], [-1, 1]), [2, 1])
    assert upoly.squarefree_decomposition(p) == [([F(2), F(1)], 1), ([F(-1), F(1)], 2)]


def test_rational_roots():
    p = upoly.mul([F(-1, 2), 1], [3, 0, 1])
    assert upoly.rational_roots(p) == [F(1, 2)]
    assert upoly.rational_roots([0, 0, 1]) == [0]


def test_root_multiplicity_and_sturm():
    p = upoly.mul(upoly.mul([-1, 1], [-1, 1]), [1, 0, 1])
    assert upoly.root_multiplicity(p, 1) == 2
    assert upoly.sturm_real_roots(p) == 1
    assert upoly.sturm_real_roots([-2, 0, 1]) == 2
