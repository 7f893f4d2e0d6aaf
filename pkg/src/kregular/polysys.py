"""Sparse polynomial maps Q^nv -> Q^m.

A polynomial is a dict from exponent tuples to nonzero coefficients. Curves
use the convention z(eps) = sum_i eps^i z_i / i!, so ``curve[i-1]`` is z_i.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import NonzeroConstant, ParseError, ShapeMismatch, ZeroMap
from .linalg import Matrix, unit_vec, zero_vec
from .surds import fmt

Poly = dict


# -- polynomial arithmetic ---------------------------------------------------

def p_clean(p: Poly) -> Poly:
    return {e: c for e, c in p.items() if c != 0}


def p_add(p: Poly, q: Poly, c=1) -> Poly:
    out = dict(p)
    for e, v in q.items():
        out[e] = out.get(e, 0) + c * v
    return p_clean(out)


def p_mul(p: Poly, q: Poly) -> Poly:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return p_clean(out)


def p_pow(p: Poly, k: int, nv: int) -> Poly:
    out = {(0,) * nv: Fraction(1)}
    for _ in range(k):
        out = p_mul(out, p)
    return out


def p_const(c, nv: int) -> Poly:
    return p_clean({(0,) * nv: Fraction(c)})


def p_var(i: int, nv: int) -> Poly:
    return {tuple(1 if j == i else 0 for j in range(nv)): Fraction(1)}


def p_diff(p: Poly, i: int) -> Poly:
    out = {}
    for e, c in p.items():
        if e[i]:
            f = list(e)
            f[i] -= 1
            out[tuple(f)] = c * e[i]
    return out


def p_degree(p: Poly) -> int:
    return max((sum(e) for e in p), default=-1)


def p_eval(p: Poly, point: Sequence):
    s = Fraction(0)
    for e, c in p.items():
        t = c
        for x, k in zip(point, e):
            if k:
                t = t * x ** k
        s = s + t
    return s


# -- the map type ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PolyMap:
    names: tuple
    comps: tuple  # tuple of Poly dicts

    @property
    def nv(self) -> int:
        return len(self.names)

    @property
    def m(self) -> int:
        return len(self.comps)

    def __eq__(self, other):
        return isinstance(other, PolyMap) and self.names == other.names and \
            tuple(p_clean(c) for c in self.comps) == tuple(p_clean(c) for c in other.comps)

    def __hash__(self):
        return hash((self.names, tuple(frozenset(c.items()) for c in self.comps)))

    def is_zero(self) -> bool:
        return all(not c for c in self.comps)

    def constant(self) -> tuple:
        z = (0,) * self.nv
        return tuple(Fraction(c.get(z, 0)) for c in self.comps)

    def degree(self) -> int:
        return max(p_degree(c) for c in self.comps) if self.comps else -1

    def __call__(self, point: Sequence) -> tuple:
        return tuple(p_eval(c, point) for c in self.comps)

    def jacobian(self) -> list:
        """Rows of partial derivative polynomials."""
        return [[p_diff(c, j) for j in range(self.nv)] for c in self.comps]

    def __str__(self):
        return to_text(self)


def require_origin(G: PolyMap) -> None:
    if any(c != 0 for c in G.constant()):
        raise NonzeroConstant("G(0) != 0; analysis needs a zero at the origin")


def perturb(G: PolyMap, H: PolyMap, c) -> PolyMap:
    if G.nv != H.nv or G.m != H.m:
        raise ShapeMismatch(f"shapes ({G.nv},{G.m}) and ({H.nv},{H.m}) differ")
    c = Fraction(c)
    return PolyMap(G.names, tuple(p_add(g, h, c) for g, h in zip(G.comps, H.comps)))


def order(G: PolyMap) -> int:
    degs = [sum(e) for c in G.comps for e in c]
    if not degs:
        raise ZeroMap("the zero map has no order")
    return min(degs)


ord_ = order


def compose(G: PolyMap, phi: Sequence[Poly]) -> PolyMap:
    """G o phi where phi is a list of nv polynomials in the same variables."""
    nv = G.nv
    out = []
    for comp in G.comps:
        acc: Poly = {}
        for e, c in comp.items():
            t = p_const(c, nv)
            for i, k in enumerate(e):
                if k:
                    t = p_mul(t, p_pow(phi[i], k, nv))
            acc = p_add(acc, t)
        out.append(acc)
    return PolyMap(G.names, tuple(out))


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


class _Parser:
    def __init__(self, text: str, line: int, col0: int, names: tuple):
        self.toks = []
        pos = 0
        while pos < len(text):
            mt = _TOKEN.match(text, pos)
            if mt.end() == pos or not text[pos:].strip():
                break
            col = col0 + mt.start(mt.lastindex)
            if mt.group(1):
                self.toks.append(("num", int(mt.group(1)), col))
            elif mt.group(2):
                self.toks.append(("id", mt.group(2), col))
            else:
                ch = mt.group(3)
                if ch not in "+-*/^()":
                    raise ParseError(f"unexpected character {ch!r}", line, col)
                self.toks.append((ch, ch, col))
            pos = mt.end()
        self.i = 0
        self.line = line
        self.end_col = col0 + len(text)
        self.names = names
        self.nv = len(names)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", None, self.end_col)

    def take(self, kind=None):
        t = self.peek()
        if kind is not None and t[0] != kind:
            what = "end of line" if t[0] == "eof" else repr(t[1])
            raise ParseError(f"expected {kind}, found {what}", self.line, t[2])
        self.i += 1
        return t

    def parse(self) -> Poly:
        if self.peek()[0] == "eof":
            raise ParseError("empty equation", self.line, self.end_col)
        p = self.expr()
        t = self.peek()
        if t[0] != "eof":
            raise ParseError(f"unexpected {t[1]!r} (is a '*' missing?)", self.line, t[2])
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.peek()[0] in "+-" and self.peek()[0] != "eof":
            op = self.take()[0]
            q = self.term()
            p = p_add(p, q, 1 if op == "+" else -1)
        return p

    def term(self) -> Poly:
        p = self.unary()
        while self.peek()[0] == "*":
            self.take()
            p = p_mul(p, self.unary())
        return p

    def unary(self) -> Poly:
        kind = self.peek()[0]
        if kind in ("-", "+"):
            self.take()
            p = self.unary()
            return p if kind == "+" else {e: -c for e, c in p.items()}
        return self.power()

    def power(self) -> Poly:
        p = self.atom()
        if self.peek()[0] == "^":
            self.take()
            t = self.peek()
            if t[0] != "num" or t[1] < 1:
                raise ParseError("'^' needs a positive integer exponent", self.line, t[2])
            self.take()
            p = p_pow(p, t[1], self.nv)
        return p

    def atom(self) -> Poly:
        t = self.peek()
        if t[0] == "num":
            self.take()
            val = Fraction(t[1])
            if self.peek()[0] == "/":
                self.take()
                d = self.take("num")
                if d[1] == 0:
                    raise ParseError("zero denominator", self.line, d[2])
                val = Fraction(t[1], d[1])
            return p_const(val, self.nv)
        if t[0] == "id":
            self.take()
            if t[1] not in self.names:
                raise ParseError(f"undeclared variable {t[1]!r}", self.line, t[2])
            return p_var(self.names.index(t[1]), self.nv)
        if t[0] == "(":
            self.take()
            p = self.expr()
            self.take(")")
            return p
        what = "end of line" if t[0] == "eof" else repr(t[1])
        raise ParseError(f"unexpected {what}", self.line, t[2])


_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*$")


def parse(text: str, *, analysis: bool = False) -> PolyMap:
    """Read a map from the 'vars:' / 'eq:' text format."""
    names = None
    comps = []
    last = 1
    for ln, raw in enumerate(text.splitlines(), start=1):
        last = ln
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        indent = len(body) - len(body.lstrip())
        stripped = body.strip()
        if names is None:
            if not stripped.startswith("vars:"):
                raise ParseError("expected 'vars:' header", ln, indent + 1)
            idents = stripped[5:].split()
            if not idents:
                raise ParseError("no variables declared", ln, indent + 6)
            for name in idents:
                if not _IDENT.match(name):
                    raise ParseError(f"bad identifier {name!r}", ln, body.index(name) + 1)
            if len(set(idents)) != len(idents):
                raise ParseError("duplicate variable", ln, indent + 1)
            names = tuple(idents)
            continue
        if not stripped.startswith("eq:"):
            raise ParseError("expected 'eq:' line", ln, indent + 1)
        start = body.index("eq:") + 3
        comps.append(_Parser(body[start:], ln, start + 1, names).parse())
    if names is None:
        raise ParseError("missing 'vars:' header", last, 1)
    if not comps:
        raise ParseError("no equations", last, 1)
    G = PolyMap(names, tuple(comps))
    if analysis:
        require_origin(G)
    return G


def _mono_key(e):
    # graded lexicographic, highest first
    return (-sum(e), tuple(-k for k in e))


def poly_text(p: Poly, names: Sequence[str]) -> str:
    if not p:
        return "0"
    parts = []
    for e in sorted(p, key=_mono_key):
        c = Fraction(p[e])
        mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if mono:
            body = mono if a == 1 else f"{a}*{mono}"
        else:
            body = str(a)
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for s, b in parts[1:]:
        out += f" {s} {b}"
    return out


def to_text(G: PolyMap) -> str:
    lines = ["vars: " + " ".join(G.names)]
    lines += ["eq: " + poly_text(c, G.names) for c in G.comps]
    return "\n".join(lines) + "\n"


# -- derivatives at the origin -------------------------------------------------

class MultilinearForm:
    """The symmetric beta-linear form G_0^beta = d^beta G(0)."""

    def __init__(self, G: PolyMap, beta: int):
        if beta < 1:
            raise ValueError("order must be at least 1")
        self.G = G
        self.order = beta
        # only degree-beta monomials survive at the origin
        self._terms = [[(e, c * math.prod(math.factorial(k) for k in e))
                        for e, c in comp.items() if sum(e) == beta] for comp in G.comps]
        self._cache: dict = {}

    def is_zero(self) -> bool:
        return not any(self._terms)

    def __call__(self, *vs: Sequence) -> tuple:
        if len(vs) != self.order:
            raise ValueError(f"expected {self.order} arguments")
        key = tuple(sorted((tuple(v) for v in vs), key=repr))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        nv = self.G.nv
        # coefficients of prod_s (sum_r v_s[r] t_r), pruned to exponents that occur
        need = {e for comp in self._terms for e, _ in comp}
        cap = tuple(max((e[i] for e in need), default=0) for i in range(nv))
        prod = {(0,) * nv: Fraction(1)}
        for v in vs:
            nxt: dict = {}
            for e, c in prod.items():
                for r in range(nv):
                    if v[r] != 0 and e[r] < cap[r]:
                        f = e[:r] + (e[r] + 1,) + e[r + 1:]
                        nxt[f] = nxt.get(f, 0) + c * v[r]
            prod = nxt
        out = []
        for comp in self._terms:
            s = Fraction(0)
            for e, c in comp:
                x = prod.get(e)
                if x is not None and x != 0:
                    s = s + c * x
            out.append(s)
        res = tuple(out)
        self._cache[key] = res
        return res

    evaluate = __call__

    def operator(self, *vs: Sequence) -> Matrix:
        """The matrix of v -> G_0^beta(v, vs...) (one slot left open)."""
        nv = self.G.nv
        cols = [self(unit_vec(nv, j), *vs) for j in range(nv)]
        return Matrix.from_columns(cols, self.G.m)


def deriv_form(G: PolyMap, beta: int) -> MultilinearForm:
    return MultilinearForm(G, beta)


# -- series substitution -------------------------------------------------------

def s_mul(a: Sequence, b: Sequence, trunc: int) -> list:
    out = [Fraction(0)] * (trunc + 1)
    for i, x in enumerate(a):
        if x == 0 or i > trunc:
            continue
        for j in range(min(len(b), trunc + 1 - i)):
            y = b[j]
            if y != 0:
                out[i + j] = out[i + j] + x * y
    return out


def s_order(s: Sequence):
    """Index of the first nonzero coefficient (vector or scalar), or None."""
    for i, x in enumerate(s):
        if isinstance(x, tuple):
            if any(c != 0 for c in x):
                return i
        elif x != 0:
            return i
    return None


class _Powers:
    def __init__(self, series: list, trunc: int):
        self.trunc = trunc
        self.p = [[Fraction(1)] + [Fraction(0)] * trunc, series]

    def get(self, k: int) -> list:
        while len(self.p) <= k:
            self.p.append(s_mul(self.p[-1], self.p[1], self.trunc))
        return self.p[k]


def curve_series(curve: Sequence[Sequence], nv: int, trunc: int) -> list:
    """Per-variable coefficient lists of z(eps) = sum eps^i z_i / i!."""
    out = []
    for v in range(nv):
        s = [Fraction(0)] * (trunc + 1)
        for i, z in enumerate(curve, start=1):
            if i > trunc:
                break
            if z[v] != 0:
                s[i] = z[v] * Fraction(1, math.factorial(i))
        out.append(s)
    return out


def poly_series(p: Poly, powers: list, trunc: int, low: int = 1) -> list:
    """Series of p along variable series whose orders are at least `low`."""
    out = [Fraction(0)] * (trunc + 1)
    for e, c in p.items():
        if sum(e) * low > trunc:
            continue
        t = None
        for v, k in enumerate(e):
            if k:
                pk = powers[v].get(k)
                t = pk if t is None else s_mul(t, pk, trunc)
        if t is None:
            out[0] = out[0] + c
        else:
            for i, x in enumerate(t):
                if x != 0:
                    out[i] = out[i] + c * x
    return out


def substitute_curve(G: PolyMap, curve: Sequence[Sequence], trunc: int) -> list:
    """Coefficient vectors [eps^0..eps^trunc] of G(z(eps))."""
    vs = curve_series(curve, G.nv, trunc)
    powers = [_Powers(s, trunc) for s in vs]
    low = 1
    cols = [poly_series(c, powers, trunc, low) for c in G.comps]
    return [tuple(col[i] for col in cols) for i in range(trunc + 1)]


def jacobian_series(G: PolyMap, curve: Sequence[Sequence], trunc: int) -> list:
    """Matrices A_0..A_trunc with G'(z(eps)) = sum eps^j A_j."""
    vs = curve_series(curve, G.nv, trunc)
    powers = [_Powers(s, trunc) for s in vs]
    J = G.jacobian()
    entries = [[poly_series(J[i][j], powers, trunc) for j in range(G.nv)] for i in range(G.m)]
    return [Matrix(G.m, G.nv, tuple(tuple(entries[i][j][t] for j in range(G.nv)) for i in range(G.m)))
            for t in range(trunc + 1)]


def t_coeff(G: PolyMap, prefix: Sequence[Sequence], i: int) -> tuple:
    """T^i = i! [eps^i] G(z(eps)) for the given prefix."""
    if len(prefix) < i:
        raise ValueError("prefix shorter than requested index")
    s = substitute_curve(G, prefix[:i], i)
    f = math.factorial(i)
    return tuple(f * x for x in s[i])


def format_map(G: PolyMap) -> list:
    return [poly_text(c, G.names) for c in G.comps]


def coeff_strings(v: Sequence) -> list:
    return [fmt(x) for x in v]


def zero_curve(nv: int, M: int) -> list:
    return [zero_vec(nv) for _ in range(M)]
