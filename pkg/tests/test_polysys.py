from fractions import Fraction as F

import pytest

from kregular.errors import NonzeroConstant, ParseError, ShapeMismatch, ZeroMap
from kregular.polysys import (PolyMap, deriv_form, order, parse, perturb, substitute_curve, t_coeff, to_text)

EX1 = "vars: x1 x2 x3\neq: x1*x3\neq: x2^2 - x2*x1^2\n"
D5 = "vars: x y\neq: x^2*y - y^4\n"


def test_parse_example_map():
    G = parse(EX1)
    assert (G.nv, G.m) == (3, 2)
    assert G.comps[0] == {(1, 0, 1): 1}


def test_parse_zero_map():
    G = parse("vars: x\neq: 0\n")
    assert G.is_zero()


@pytest.mark.parametrize("text, line, col", [
    ("vars: x\neq: x^\n", 2, None),
    ("vars: x\neq: 2x\n", 2, None),
    ("", 1, 1),
    ("vars: x\neq: 1/0*x\n", 2, None),
    ("vars: x\nbad: x\n", 2, 1),
])
def test_parse_errors(text, line, col):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.line == line
    if col is not None:
        assert info.value.col == col


def test_parse_rationals_comments_parentheses():
    G = parse("# header comment\nvars: a b\n\neq: 3/4*(a + b)^2 - a*b  # trailing\n")
    assert G.comps[0] == {(2, 0): F(3, 4), (0, 2): F(3, 4), (1, 1): F(1, 2)}


def test_nonzero_constant_rejected_for_analysis():
    with pytest.raises(NonzeroConstant):
        parse("vars: x\neq: x + 1\n", analysis=True)


def test_round_trip():
    for text in (EX1, D5, "vars: u v w\neq: -2/3*u^3*v + w\neq: 0\n"):
        G = parse(text)
        assert parse(to_text(G)) == G


def test_deriv_form_examples():
    G = parse(EX1)
    assert deriv_form(G, 1).is_zero()
    u, v, w = F(2), F(-3), F(5)
    assert deriv_form(G, 2)((u, v, w), (u, v, w)) == (2 * u * w, 2 * v * v)
    assert deriv_form(parse(D5), 3)((1, 0), (1, 0), (0, 1)) == (2,)


def test_t_coeff_examples():
    G = parse(EX1)
    z1 = (F(1), F(2), F(3))
    assert t_coeff(G, [z1, (0, 0, 0)], 2) == (6, 8)
    D = parse(D5)
    curve = [(1, 0)] + [(0, 0)] * 5
    assert all(t_coeff(D, curve, i) == (0,) for i in range(1, 7))


def test_order_examples():
    assert order(parse(D5)) == 3
    assert order(parse("vars: x y\neq: x + y^2\n")) == 1
    assert order(parse("vars: x y\neq: x^4 + y^4\n")) == 4
    with pytest.raises(ZeroMap):
        order(parse("vars: x\neq: 0\n"))


def test_substitute_curve():
    G = parse(EX1)
    assert all(x == (0, 0) for x in substitute_curve(G, [(0, 0, 0)] * 3, 6))
    par = [(1, 0, 0), (0, 2, 0)] + [(0, 0, 0)] * 4
    assert all(x == (0, 0) for x in substitute_curve(G, par, 6))
    # D5 cusp prefix cut after z_3: first nonzero order is finite
    cusp = [(0, 0), (0, 2), (6, 0)]
    ser = substitute_curve(parse(D5), cusp, 12)
    assert all(x == (0,) for x in ser[:12])


def test_perturb():
    G = parse(EX1)
    H = parse("vars: x1 x2 x3\neq: 0\neq: x1^4\n")
    assert perturb(G, H, 0) == G
    assert perturb(G, parse("vars: x1 x2 x3\neq: 0\neq: 0\n"), 5) == G
    Gc = perturb(G, H, F(1, 5))
    assert Gc.comps[1][(4, 0, 0)] == F(1, 5)
    with pytest.raises(ShapeMismatch):
        perturb(G, parse("vars: x y\neq: x\n"), 1)
