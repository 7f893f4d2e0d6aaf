"""Elements a + b*sqrt(d) of a real quadratic field over Q.

Only needed when a candidate coefficient is an irrational root of a
quadratic solvability condition. Results with b == 0 collapse back to
Fraction so rational computations never see this type.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .errors import FieldClash


def _squarefree(n: int) -> tuple[int, int]:
    """Return (s, f) with n = f^2 * s and s squarefree."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    f, p = 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            f *= p
        p += 1
    return sign * n, f


def sqrt_rational(x: Fraction):
    """Exact square root of a nonnegative rational, as Fraction or QuadExt."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative radicand")
    # sqrt(p/q) = sqrt(p*q)/q
    s, f = _squarefree(x.numerator * x.denominator)
    coef = Fraction(f, x.denominator)
    if s in (0, 1):
        return coef * s
    return QuadExt(0, coef, s)


class QuadExt:
    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = int(d)

    @staticmethod
    def make(a, b, d):
        b = Fraction(b)
        if b == 0:
            return Fraction(a)
        return QuadExt(a, b, d)

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise FieldClash(f"sqrt({self.d}) mixed with sqrt({other.d})")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadExt.make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadExt.make(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return QuadExt.make(self.a * a + self.d * self.b * b, self.a * b + self.b * a, self.d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self):
        n = self.norm()
        return QuadExt.make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, QuadExt):
            return self * other.inverse()
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadExt.make(self.a / c[0], self.b / c[0], self.d)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out, base = Fraction(1), self
        while e:
            if e & 1:
                out = base * out
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def sign(self) -> int:
        # sign of a + b*sqrt(d) without floating point
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        big = self.a * self.a - self.d * self.b * self.b
        return sa if big > 0 else sb

    def __lt__(self, other):
        return (self - other).sign() < 0 if isinstance(other, (int, Fraction, QuadExt)) else NotImplemented

    def __gt__(self, other):
        return (self - other).sign() > 0 if isinstance(other, (int, Fraction, QuadExt)) else NotImplemented

    def __str__(self):
        return f"{self.a}{'+' if self.b >= 0 else '-'}{abs(self.b)}*sqrt({self.d})"

    __repr__ = __str__


def field_of(values) -> int | None:
    """The common radicand of an iterable of scalars, or None if all rational."""
    d = None
    for v in values:
        if isinstance(v, QuadExt):
            if d is not None and d != v.d:
                raise FieldClash(f"sqrt({d}) mixed with sqrt({v.d})")
            d = v.d
    return d


def fmt(x) -> str:
    """Exact string form: 'p/q' for rationals, 'a+b*sqrt(d)' otherwise."""
    if isinstance(x, QuadExt):
        return str(x)
    return str(Fraction(x))
