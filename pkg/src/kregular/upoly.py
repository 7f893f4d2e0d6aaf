"""Dense univariate polynomials over Q, coefficients listed from degree 0 up."""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


def trim(p: list) -> list:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def deg(p: list) -> int:
    return len(trim(p)) - 1


def sub(p: list, q: list) -> list:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)])


def mul(p: list, q: list) -> list:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def divmod_(p: list, q: list) -> tuple[list, list]:
    p, q = trim(p), trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    out = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    r = list(p)
    while len(r) >= len(q) and r:
        c = r[-1] / q[-1]
        s = len(r) - len(q)
        out[s] = c
        for i, b in enumerate(q):
            r[s + i] -= c * b
        r = trim(r)
    return trim(out), r


def monic(p: list) -> list:
    p = trim(p)
    return [c / p[-1] for c in p] if p else p


def pgcd(p: list, q: list) -> list:
    p, q = trim(p), trim(q)
    while q:
        p, q = q, divmod_(p, q)[1]
    return monic(p)


def deriv(p: list) -> list:
    return trim([i * c for i, c in enumerate(p)][1:])


def squarefree_decomposition(p: list) -> list:
    """Yun's algorithm: [(factor, multiplicity)] with monic square-free factors."""
    p = trim(p)
    if deg(p) < 1:
        return []
    out = []
    a = pgcd(p, deriv(p))
    b = divmod_(p, a)[0]
    c = divmod_(deriv(p), a)[0]
    d = sub(c, deriv(b))
    i = 1
    while deg(b) > 0:
        a = pgcd(b, d)
        b = divmod_(b, a)[0]
        c = divmod_(d, a)[0]
        if deg(a) > 0:
            out.append((monic(a), i))
        d = sub(c, deriv(b))
        i += 1
    return out


def _divisors(n: int) -> list:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(p: list) -> list:
    """Distinct rational roots, by the rational root test on an integer multiple."""
    p = trim(p)
    if deg(p) < 1:
        return []
    roots = []
    while p and p[0] == 0:
        if Fraction(0) not in roots:
            roots.append(Fraction(0))
        p = p[1:]
    if deg(p) < 1:
        return roots
    den = lcm(*(c.denominator for c in p))
    ints = [int(c * den) for c in p]
    g = gcd(*ints)
    ints = [c // g for c in ints]
    for a in _divisors(ints[0]):
        for b in _divisors(ints[-1]):
            for s in (1, -1):
                x = Fraction(s * a, b)
                if x in roots:
                    continue
                if evaluate(p, x) == 0:
                    roots.append(x)
    return sorted(roots)


def evaluate(p: list, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def root_multiplicity(p: list, x) -> int:
    p = trim(p)
    k = 0
    while p and evaluate(p, x) == 0:
        p = divmod_(p, [-Fraction(x), Fraction(1)])[0]
        k += 1
    return k


def sturm_real_roots(p: list) -> int:
    """Number of distinct real roots of p."""
    p = trim(p)
    if deg(p) < 1:
        return 0
    seq = [p, deriv(p)]
    while deg(seq[-1]) > 0:
        r = divmod_(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])

    def changes(signs):
        s = [x for x in signs if x != 0]
        return sum(1 for a, b in zip(s, s[1:]) if (a > 0) != (b > 0))

    # signs at -inf and +inf from leading coefficients
    at_pos = [q[-1] for q in seq]
    at_neg = [q[-1] * (-1) ** deg(q) for q in seq]
    return changes(at_neg) - changes(at_pos)
