from fractions import Fraction as F

import pytest

from kregular.errors import FieldClash
from kregular.surds import QuadExt, field_of, fmt, sqrt_rational


def test_sqrt_rational():
    assert sqrt_rational(F(9, 4)) == F(3, 2)
    r = sqrt_rational(F(1, 5))
    assert isinstance(r, QuadExt) and r * r == F(1, 5)
    assert sqrt_rational(0) == 0


def test_arithmetic_collapses_to_rational():
    s = QuadExt(0, 1, 5)
    assert s * s == 5
    assert isinstance(s * s, F)
    x = QuadExt(1, F(1, 5), 5)
    assert x * x.inverse() == 1
    assert (x - x) == 0
    assert x ** 2 - 2 * x == F(-4, 5)


def test_order_and_format():
    assert QuadExt(0, 1, 2) > 1
    assert QuadExt(1, -1, 2) < 0
    assert fmt(F(3, 4)) == "3/4"
    assert fmt(QuadExt(1, F(1, 5), 5)) == "1+1/5*sqrt(5)"


def test_field_clash():
    with pytest.raises(FieldClash):
        QuadExt(0, 1, 2) + QuadExt(0, 1, 3)
    with pytest.raises(FieldClash):
        field_of([QuadExt(0, 1, 2), QuadExt(0, 1, 3)])
    assert field_of([F(1), QuadExt(1, 1, 7)]) == 7
