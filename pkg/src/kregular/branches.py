"""Rational Newton-Puiseux expansion of plane curve branches through 0.

Bivariate polynomials are dicts {(a, b): c} for c * X^a * P^b, where X is
the variable that is solved for as a series and P the one that stays a
monomial in the local parameter. At the top level X = x and P = y, so a
branch is y = w0 s^m, x = s^n (v0 + ...). Only branches whose blow-up roots
are rational are produced; the others are counted in the notes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import upoly


def lower_hull(points) -> list:
    """Vertices of the lower-left Newton boundary, by increasing first coordinate."""
    pts = sorted(set(points))
    hull: list = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    # the leftmost point may be preceded by nothing; cut where height stops falling
    out = [hull[0]]
    for p in hull[1:]:
        if p[1] < out[-1][1]:
            out.append(p)
        else:
            break
    return out


@dataclass(frozen=True)
class Edge:
    left: tuple    # (a1, b1), larger b
    right: tuple   # (as, bs)
    p: int         # b-extent
    q: int         # a-extent
    r: int
    n: int
    m: int
    N: int

    @staticmethod
    def of(left, right) -> "Edge":
        p = left[1] - right[1]
        q = right[0] - left[0]
        r = math.gcd(p, q)
        n, m = p // r, q // r
        return Edge(left, right, p, q, r, n, m, n * right[0] + m * right[1])

    @property
    def A_S(self) -> Fraction:
        # triangle spanned by the origin and the two endpoints
        (a1, b1), (a2, b2) = self.left, self.right
        return Fraction(abs(a1 * b2 - a2 * b1), 2)

    @property
    def A(self) -> Fraction:
        return self.A_S / self.r


def edges(g: dict) -> list:
    v = lower_hull(list(g))
    return [Edge.of(a, b) for a, b in zip(v, v[1:])]


def edge_poly(g: dict, e: Edge) -> list:
    """Coefficients c_j of t^j, t = V/W, read off the support along the edge."""
    return [Fraction(g.get((e.left[0] + j * e.m, e.left[1] - j * e.n), 0)) for j in range(e.r + 1)]


def bezout_pair(m: int, n: int) -> tuple[int, int]:
    """(a, b) with a*m - b*n = 1."""
    for a in range(max(n, 1)):
        if (a * m - 1) % n == 0:
            return a, (a * m - 1) // n
    raise ValueError("m and n are not coprime")


def root_point(t0: Fraction, e: Edge) -> tuple[Fraction, Fraction]:
    a, b = bezout_pair(e.m, e.n)
    return Fraction(t0) ** a, Fraction(t0) ** b


def blow_up(g: dict, e: Edge, v0, w0) -> dict:
    """g(s^n (v0 + X'), w0 s^m) / s^N as {(X'-exponent, s-exponent): c}."""
    out: dict = {}
    for (a, b), c in g.items():
        se = e.n * a + e.m * b - e.N
        base = c * Fraction(w0) ** b
        for i in range(a + 1):
            key = (i, se)
            out[key] = out.get(key, 0) + base * math.comb(a, i) * Fraction(v0) ** (a - i)
    return {k: v for k, v in out.items() if v != 0}


# -- series helpers --------------------------------------------------------------

def _mul(a, b, M):
    out = [Fraction(0)] * (M + 1)
    for i, x in enumerate(a[:M + 1]):
        if x:
            for j, y in enumerate(b[:M + 1 - i]):
                if y:
                    out[i + j] += x * y
    return out


def _inv(a, M):
    out = [Fraction(0)] * (M + 1)
    out[0] = 1 / a[0]
    for k in range(1, M + 1):
        s = sum((a[i] * out[k - i] for i in range(1, min(k, len(a) - 1) + 1)), Fraction(0))
        out[k] = -s * out[0]
    return out


def _eval(g: dict, Y: list, M: int, dY: bool = False) -> list:
    """g(s, Y(s)) (or its Y-derivative) as a series to order M."""
    pw = [[Fraction(1)] + [Fraction(0)] * M]
    top = max((a for a, _ in g), default=0)
    for _ in range(top):
        pw.append(_mul(pw[-1], Y, M))
    out = [Fraction(0)] * (M + 1)
    for (a, b), c in g.items():
        if dY:
            if a == 0:
                continue
            c, a = c * a, a - 1
        if b > M:
            continue
        for i, x in enumerate(pw[a][:M + 1 - b]):
            if x:
                out[i + b] += c * x
    return out


def hensel(g: dict, M: int) -> list:
    """Series Y(s) with Y(0) = 0 and g(s, Y) = 0, for a simple root at the origin."""
    Y = [Fraction(0)] * (M + 1)
    if g.get((1, 0), 0) == 0:
        raise ValueError("root is not simple")
    # quadratic convergence: precision doubles each step
    for _ in range(M.bit_length() + 2):
        val = _eval(g, Y, M)
        if all(x == 0 for x in val):
            break
        der = _eval(g, Y, M, dY=True)
        corr = _mul(val, _inv(der, M), M)
        Y = [y - c for y, c in zip(Y, corr)]
    return Y


@dataclass
class Branch:
    P: tuple          # (coefficient, exponent): P = coefficient * s^exponent
    X: list           # series of the solved variable
    depth: int


def _branches(g: dict, M: int, depth: int, top: bool, notes: list, max_depth: int) -> list:
    out: list = []
    a0 = min(a for a, _ in g)
    b0 = min(b for _, b in g)
    if a0 >= 1:
        out.append(Branch((Fraction(1), 1), [Fraction(0)] * (M + 1), depth))
        if a0 >= 2:
            notes.append("repeated factor: non-reduced curve")
    if b0 >= 1 and top:
        # P == 0 branch: X is the free parameter; marked by exponent 0
        out.append(Branch((Fraction(0), 0), [Fraction(0), Fraction(1)] + [Fraction(0)] * (M - 1), depth))
        if b0 >= 2:
            notes.append("repeated factor: non-reduced curve")
    h = {(a - a0, b - b0): c for (a, b), c in g.items()}
    for e in edges(h):
        f = edge_poly(h, e)
        sqf = upoly.squarefree_decomposition(f)
        for fac, mult in sqf:
            roots = upoly.rational_roots(fac)
            missing = upoly.deg(fac) - len(roots)
            if missing:
                notes.append(f"{missing} non-rational root(s) of an edge polynomial skipped")
            for t0 in roots:
                v0, w0 = root_point(t0, e)
                gb = blow_up(h, e, v0, w0)
                if mult == 1:
                    Xp = hensel(gb, M)
                    out.append(_compose(e, v0, w0, Branch((Fraction(1), 1), Xp, depth), M))
                elif depth >= max_depth:
                    notes.append("expansion depth cap reached")
                else:
                    for sub in _branches(gb, M, depth + 1, False, notes, max_depth):
                        out.append(_compose(e, v0, w0, sub, M))
    return out


def _compose(e: Edge, v0, w0, sub: Branch, M: int) -> Branch:
    # s = u t^k from the sub-branch; X = s^n (v0 + X'(t)), P = w0 s^m
    u, kexp = sub.P
    P = (Fraction(w0) * u ** e.m, kexp * e.m)
    X = [Fraction(0)] * (M + 1)
    shift = kexp * e.n
    scale = u ** e.n
    inner = [Fraction(v0) + (sub.X[0] if sub.X else 0)] + list(sub.X[1:])
    for i, c in enumerate(inner):
        if i + shift <= M and c:
            X[i + shift] += scale * c
    return Branch(P, X, sub.depth)


def to_curve(br: Branch, M: int) -> list:
    """(x, y) = (X, P) as coefficients z_1..z_M in the 1/i! convention."""
    coef, ex = br.P
    ys = [Fraction(0)] * (M + 1)
    if ex <= M and coef != 0:
        ys[ex] = coef
    return [(br.X[i] * math.factorial(i), ys[i] * math.factorial(i)) for i in range(1, M + 1)]


def root_branches(g: dict, e: Edge, t0, M: int, max_depth: int = 8) -> tuple[list, list]:
    """Curves through the blow-up point of edge e at the rational root t0."""
    notes: list = []
    v0, w0 = root_point(Fraction(t0), e)
    gb = blow_up(g, e, v0, w0)
    if gb.get((1, 0), 0) != 0:
        subs = [Branch((Fraction(1), 1), hensel(gb, M), 0)]
    else:
        subs = _branches(gb, M, 1, False, notes, max_depth)
    return [to_curve(_compose(e, v0, w0, b, M), M) for b in subs], notes


def planar_branches(G, M: int, max_depth: int = 8) -> tuple[list, list]:
    """Branch curves of a scalar equation in two unknowns, as coefficient lists z_1..z_M."""
    g = {e: c for e, c in G.comps[0].items()}
    notes: list = []
    if not g:
        return [], ["zero equation: every point is a solution"]
    raw = _branches(g, M, 0, True, notes, max_depth)
    curves, seen = [], set()
    for br in raw:
        z = to_curve(br, M)
        idx = [i for i, v in enumerate(z, start=1) if any(c != 0 for c in v)]
        if idx and math.gcd(*idx) != 1:
            notes.append("non-primitive expansion dropped")
            continue
        key = tuple(z)
        if key not in seen:
            seen.add(key)
            curves.append(z)
    return curves, list(dict.fromkeys(notes))
