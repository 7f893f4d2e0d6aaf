"""Exact linear algebra over Q (or a single real quadratic extension).

Vectors are tuples of scalars, matrices are `Matrix` values holding a tuple
of row tuples. Every routine is exact; the only zero test is ``x == 0``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import IncompleteSum, NotBijective, NotContained, NotInRange

Vector = tuple


def vec(values: Iterable) -> Vector:
    return tuple(v if not isinstance(v, int) else Fraction(v) for v in values)


def zero_vec(n: int) -> Vector:
    return (Fraction(0),) * n


def unit_vec(n: int, i: int) -> Vector:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def vadd(u: Sequence, v: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v: Sequence) -> Vector:
    return tuple(c * a for a in v)


def is_zero(v: Sequence) -> bool:
    return all(a == 0 for a in v)


def dot(u: Sequence, v: Sequence):
    s = Fraction(0)
    for a, b in zip(u, v):
        if a != 0 and b != 0:
            s = s + a * b
    return s


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    data: tuple

    @staticmethod
    def of(rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        data = tuple(vec(r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        if any(len(r) != cols for r in data):
            raise ValueError("ragged matrix")
        return Matrix(len(data), cols, data)

    @staticmethod
    def zeros(rows: int, cols: int) -> "Matrix":
        return Matrix(rows, cols, tuple(zero_vec(cols) for _ in range(rows)))

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix(n, n, tuple(unit_vec(n, i) for i in range(n)))

    @staticmethod
    def from_columns(columns: Sequence[Sequence], rows: int) -> "Matrix":
        cols = len(columns)
        return Matrix(rows, cols, tuple(tuple(columns[j][i] for j in range(cols)) for i in range(rows)))

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.data)

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "Matrix":
        return Matrix.from_columns(list(self.data), self.cols)

    def apply(self, v: Sequence) -> Vector:
        return tuple(dot(r, v) for r in self.data)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols = other.columns()
        return Matrix.from_columns([self.apply(c) for c in cols], self.rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(vadd(a, b) for a, b in zip(self.data, other.data)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(vsub(a, b) for a, b in zip(self.data, other.data)))

    def scale(self, c) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(vscale(c, r) for r in self.data))

    def is_zero(self) -> bool:
        return all(is_zero(r) for r in self.data)

    def tolist(self) -> list:
        return [list(r) for r in self.data]


def rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    a = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c] if not isinstance(a[r][c], int) else Fraction(1, a[r][c])
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rank(vectors: Sequence[Sequence], n: int | None = None) -> int:
    if not vectors:
        return 0
    return len(rref(vectors, n if n is not None else len(vectors[0]))[1])


class Subspace:
    """A subspace of Q^n stored by its canonical RREF basis."""

    __slots__ = ("ambient_dim", "basis", "_pivots")

    def __init__(self, ambient_dim: int, vectors: Iterable[Sequence] = ()):
        vectors = [vec(v) for v in vectors]
        if any(len(v) != ambient_dim for v in vectors):
            raise ValueError("vector length differs from ambient dimension")
        rows, piv = rref(vectors, ambient_dim) if vectors else ([], [])
        self.ambient_dim = ambient_dim
        self.basis = tuple(tuple(r) for r in rows)
        self._pivots = tuple(piv)

    @staticmethod
    def full(n: int) -> "Subspace":
        return Subspace(n, [unit_vec(n, i) for i in range(n)])

    @staticmethod
    def zero(n: int) -> "Subspace":
        return Subspace(n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, v: Sequence):
        """Coordinates of v in the RREF basis, or None if v is not in the span."""
        c = [v[p] for p in self._pivots]
        w = list(v)
        for ci, b in zip(c, self.basis):
            if ci != 0:
                w = [x - ci * y for x, y in zip(w, b)]
        return tuple(c) if is_zero(w) else None

    def contains(self, v: Sequence) -> bool:
        return self.coordinates(v) is not None

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(b) for b in other.basis)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Subspace({self.ambient_dim}, dim={self.dim})"

    def matrix(self) -> Matrix:
        """Basis vectors as columns."""
        return Matrix.from_columns(list(self.basis), self.ambient_dim)


def kernel(M: Matrix) -> Subspace:
    rows, piv = rref(M.data, M.cols) if M.rows else ([], [])
    free = [j for j in range(M.cols) if j not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for r, p in zip(rows, piv):
            v[p] = -r[f]
        basis.append(v)
    return Subspace(M.cols, basis)


def image(M: Matrix) -> Subspace:
    # pivot columns of M in column order, then canonicalized
    _, piv = rref(M.data, M.cols) if M.rows else ([], [])
    return Subspace(M.rows, [M.column(j) for j in piv])


def left_kernel(M: Matrix) -> Subspace:
    return kernel(M.transpose())


def sum_space(*spaces: Subspace) -> Subspace:
    n = spaces[0].ambient_dim
    return Subspace(n, [b for s in spaces for b in s.basis])


def intersect(U: Subspace, V: Subspace) -> Subspace:
    n = U.ambient_dim
    if U.dim == 0 or V.dim == 0:
        return Subspace.zero(n)
    # solve U a = V b
    cols = list(U.basis) + [vscale(-1, b) for b in V.basis]
    K = kernel(Matrix.from_columns(cols, n))
    out = []
    for k in K.basis:
        v = zero_vec(n)
        for c, b in zip(k[: U.dim], U.basis):
            if c != 0:
                v = vadd(v, vscale(c, b))
        out.append(v)
    return Subspace(n, out)


def complement(inner: Subspace, outer: Subspace, rng: random.Random | None = None) -> Subspace:
    """C with inner + C = outer, direct.

    Deterministic mode extends inner's basis greedily by outer's basis vectors
    in order. With an rng the candidates are random integer combinations of
    outer's basis instead (used to check that verdicts do not depend on the
    choice).
    """
    if inner.ambient_dim != outer.ambient_dim:
        raise ValueError("ambient dimensions differ")
    if not outer.contains_space(inner):
        raise NotContained("inner subspace is not contained in outer subspace")
    n = inner.ambient_dim
    need = outer.dim - inner.dim
    current = list(inner.basis)
    chosen: list = []

    def try_add(v):
        if len(chosen) < need and rank(current + [v], n) > len(current):
            current.append(v)
            chosen.append(v)

    if rng is not None and outer.dim:
        for _ in range(20 * (need + 1)):
            if len(chosen) == need:
                break
            coeffs = [rng.randint(-3, 3) for _ in outer.basis]
            v = zero_vec(n)
            for c, b in zip(coeffs, outer.basis):
                v = vadd(v, vscale(c, b))
            if not is_zero(v):
                try_add(v)
    for b in outer.basis:
        try_add(b)
    return Subspace(n, chosen)


class DirectSum:
    """Ordered independent parts of Q^n; projections need completeness."""

    def __init__(self, ambient_dim: int, parts: Sequence[Subspace]):
        self.ambient_dim = ambient_dim
        self.parts = tuple(parts)
        vectors = [b for p in self.parts for b in p.basis]
        if rank(vectors, ambient_dim) != len(vectors):
            raise ValueError("parts are not independent")
        self.complete = len(vectors) == ambient_dim
        self._inv = None
        if self.complete and ambient_dim:
            P = Matrix.from_columns(vectors, ambient_dim)
            self._inv = inverse(P)

    @property
    def dims(self) -> tuple:
        return tuple(p.dim for p in self.parts)

    def components(self, v: Sequence) -> list:
        if not self.complete:
            raise IncompleteSum("direct sum does not span the ambient space")
        if self.ambient_dim == 0:
            return [() for _ in self.parts]
        c = self._inv.apply(v)
        out, i = [], 0
        for p in self.parts:
            w = zero_vec(self.ambient_dim)
            for b in p.basis:
                if c[i] != 0:
                    w = vadd(w, vscale(c[i], b))
                i += 1
            out.append(w)
        return out

    def project(self, part_index: int, v: Sequence) -> Vector:
        return self.components(v)[part_index]


def project(ds: DirectSum, part_index: int, v: Sequence) -> Vector:
    return ds.project(part_index, v)


def inverse(M: Matrix) -> Matrix:
    n = M.rows
    if M.cols != n:
        raise ValueError("not square")
    aug = [list(r) + list(unit_vec(n, i)) for i, r in enumerate(M.data)]
    rows, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(rows) < n:
        raise NotBijective("matrix is singular")
    return Matrix.of([r[n:] for r in rows[:n]], n)


def solve(M: Matrix, b: Sequence):
    """One solution x of Mx = b, or None. Free variables are set to zero."""
    aug = [list(r) + [bi] for r, bi in zip(M.data, b)]
    rows, piv = rref(aug, M.cols + 1)
    if M.cols in piv:
        return None
    x = [Fraction(0)] * M.cols
    for r, p in zip(rows, piv):
        x[p] = r[M.cols]
    return tuple(x)


def restricted_solve(S: Matrix, dom: Subspace, ran: Subspace, w: Sequence) -> Vector:
    """The unique v in dom with S v = w, where S: dom -> ran is bijective."""
    if not ran.contains(w):
        raise NotInRange("right-hand side is not in the prescribed range")
    if dom.dim != ran.dim:
        raise NotBijective("domain and range dimensions differ")
    if dom.dim == 0:
        return zero_vec(S.cols)
    SD = S @ dom.matrix()
    if rank(SD.columns(), S.rows) != dom.dim or image(SD) != ran:
        raise NotBijective("restriction is not a bijection onto the range")
    c = solve(SD, w)
    v = zero_vec(S.cols)
    for ci, b in zip(c, dom.basis):
        if ci != 0:
            v = vadd(v, vscale(ci, b))
    return v
