"""Stagewise construction of the sum operator along a candidate branch.

At stage k the leading coefficients zbar_1..zbar_k of a formal curve
z(eps) = sum eps^i z_i / i! are fixed. Writing A(eps) = G'(p(eps)) for the
truncated curve p, every n in N_j gets a polynomial "chain" c_j(n) with
constant term n and A(eps) c_j(n) = O(eps^j). The next operator is

    S_{j+1} n = const_j * P_{R_j^c} [eps^j] A(eps) c_j(n),

and c_{j+1}(n) for n in ker S_{j+1} is obtained by cancelling the R_1..R_j
parts of [eps^j] A c_j(n) with shifted chains of lower levels (through the
restricted inverses of S_1..S_j). With const_j = (2j)!/j! this reproduces
the closed forms known for j = 1, 2 and the scalar case.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import AlreadyRegular, IdenticallyZeroThroughOrder, Infeasible, NotRegular, ShapeMismatch
from .linalg import (DirectSum, Matrix, Subspace, complement, inverse, is_zero, kernel, left_kernel,
                     restricted_solve, solve, unit_vec, vadd, vscale, zero_vec)
from .polysys import (PolyMap, deriv_form, jacobian_series, order, p_add, p_const, p_degree, p_eval,
                      p_mul, p_pow, p_var, perturb, poly_series, require_origin, s_mul, s_order,
                      substitute_curve)
from .surds import QuadExt, field_of, sqrt_rational


def s_constant(j: int) -> int:
    """Normalization of the level-(j+1) operator."""
    return math.factorial(2 * j) // math.factorial(j)


@dataclass(frozen=True)
class Level:
    S: Matrix        # normalized operator, ambient m x nv (zero on earlier complements)
    S_raw: Matrix    # unnormalized elimination derivative
    N: Subspace      # kernel inside the previous N
    Nc: Subspace
    R: Subspace
    Rc: Subspace


@dataclass(frozen=True)
class AffineSet:
    """particular + direction, over blocks of nv coordinates each."""
    point: tuple
    direction: Subspace
    nv: int

    @property
    def blocks(self) -> int:
        return len(self.point) // self.nv if self.nv else 0

    def block(self, i: int) -> tuple:
        return self.point[i * self.nv:(i + 1) * self.nv]

    def contains(self, flat: Sequence) -> bool:
        return self.direction.contains(tuple(a - b for a, b in zip(flat, self.point)))


@dataclass(frozen=True, eq=False)
class Stage:
    G: PolyMap
    k: int
    fixed: tuple
    levels: tuple
    chains: tuple                 # chains[j]: per basis vector of N_j, list of j vectors
    affine: AffineSet | None
    x_param: bool = False
    seed: int | None = None

    @property
    def surjective(self) -> bool:
        return self.levels[-1].Rc.dim == 0

    @property
    def operators(self) -> list:
        return [lv.S for lv in self.levels]

    def N(self, i: int) -> Subspace:
        return Subspace.full(self.G.nv) if i == 0 else self.levels[i - 1].N

    def Nc(self, i: int) -> Subspace:
        return self.levels[i - 1].Nc

    def R(self, i: int) -> Subspace:
        return self.levels[i - 1].R

    def Rc(self, i: int) -> Subspace:
        return Subspace.full(self.G.m) if i == 0 else self.levels[i - 1].Rc

    def dims(self) -> dict:
        return {
            "Nc": [lv.Nc.dim for lv in self.levels],
            "R": [lv.R.dim for lv in self.levels],
            "N_last": self.levels[-1].N.dim,
            "Rc_last": self.levels[-1].Rc.dim,
        }

    def domain_sum(self) -> DirectSum:
        return DirectSum(self.G.nv, [lv.Nc for lv in self.levels] + [self.levels[-1].N])

    def range_sum(self) -> DirectSum:
        return DirectSum(self.G.m, [lv.R for lv in self.levels] + [self.levels[-1].Rc])

    def leading_index(self):
        for i, z in enumerate(self.fixed, start=1):
            if not is_zero(z):
                return i
        return None


# -- level construction ----------------------------------------------------------

def _apply_series(A: list, chain: list, t: int) -> tuple:
    """[eps^t] of A(eps) * chain(eps)."""
    m = A[0].rows
    w = zero_vec(m)
    for s, c in enumerate(chain):
        if s > t:
            break
        if not is_zero(c):
            w = vadd(w, A[t - s].apply(c))
    return w


def _series_comb(coords: Sequence, chains: list, length: int, nv: int) -> list:
    out = [zero_vec(nv) for _ in range(length)]
    for c, ch in zip(coords, chains):
        if c == 0:
            continue
        for s, v in enumerate(ch):
            out[s] = vadd(out[s], vscale(c, v))
    return out


def _rng(seed, j):
    return None if seed is None else random.Random(seed * 7919 + j)


def _xfree(space: Subspace) -> Subspace:
    """space intersected with {first coordinate = 0}."""
    n = space.ambient_dim
    return Subspace(n, [b for b in kernel_in(space, [unit_vec(n, 0)])])


def kernel_in(space: Subspace, rows: list) -> list:
    """Vectors of `space` annihilated by the given row functionals."""
    if not space.dim:
        return []
    B = space.matrix()
    M = Matrix.of([[sum((r[i] * B.data[i][j] for i in range(len(r))), Fraction(0))
                    for j in range(B.cols)] for r in rows], B.cols)
    out = []
    for c in kernel(M).basis:
        out.append(B.apply(c))
    return out


def _build_level(G: PolyMap, j: int, A: list, prev: list, chains_j: list, x_param: bool, seed) -> Level:
    nv, m = G.nv, G.m
    Nj = Subspace.full(nv) if j == 0 else prev[-1].N
    Rcj = Subspace.full(m) if j == 0 else prev[-1].Rc
    rsum = DirectSum(m, [lv.R for lv in prev] + [Rcj]) if j else None
    cols = []
    for ch in chains_j:
        w = _apply_series(A, ch, j)
        if rsum is not None:
            w = rsum.project(len(prev), w)
        cols.append(w)
    # ambient matrix: zero on N_1^c..N_j^c, given values on the N_j basis
    basis = [b for lv in prev for b in lv.Nc.basis] + list(Nj.basis)
    images = [zero_vec(m) for lv in prev for _ in lv.Nc.basis] + cols
    if nv:
        V = Matrix.from_columns(basis, nv)
        W = Matrix.from_columns(images, m) if images else Matrix.zeros(m, nv)
        S_raw = W @ inverse(V)
    else:
        S_raw = Matrix.zeros(m, 0)
    Wc = Matrix.from_columns(cols, m) if cols else Matrix.zeros(m, 0)
    Nnext = Subspace(nv, [Matrix.from_columns(list(Nj.basis), nv).apply(c) for c in kernel(Wc).basis]) \
        if Nj.dim else Subspace.zero(nv)
    R = Subspace(m, cols)
    rng = _rng(seed, j)
    if x_param and Nj.dim:
        # complements inside {x = 0} so that (1, y1) stays in the kernel part
        cand = Subspace(nv, list(_xfree(Nj).basis))
        Nc = _complement_pref(Nnext, Nj, cand, rng)
    else:
        Nc = complement(Nnext, Nj, rng)
    Rc = complement(R, Rcj, _rng(seed, 1000 + j))
    return Level(S_raw.scale(s_constant(j)), S_raw, Nnext, Nc, R, Rc)


def _complement_pref(inner: Subspace, outer: Subspace, pref: Subspace, rng) -> Subspace:
    # try to find the complement inside pref first
    try:
        part = complement(Subspace(outer.ambient_dim, []), pref, rng)
        chosen, cur = [], list(inner.basis)
        from .linalg import rank
        for b in part.basis:
            if rank(cur + [b], outer.ambient_dim) > len(cur):
                cur.append(b)
                chosen.append(b)
        if len(cur) == outer.dim:
            return Subspace(outer.ambient_dim, chosen)
    except Exception:
        pass
    return complement(inner, outer, rng)


def _extend_chains(G: PolyMap, j: int, A: list, levels: list, chains: list) -> list:
    """Chains of level j+1 for the basis of N_{j+1} = levels[j].N."""
    nv, m = G.nv, G.m
    chains_j = chains[j]
    Nj = Subspace.full(nv) if j == 0 else levels[j - 1].N
    Nn = levels[j].N
    rsum = DirectSum(m, [lv.R for lv in levels[:j]] + [Subspace.full(m) if j == 0 else levels[j - 1].Rc])
    out = []
    for b in Nn.basis:
        coords = Nj.coordinates(b)
        ch = _series_comb(coords, chains_j, j + 1, nv)
        w = _apply_series(A, ch, j)
        for i in range(j, 0, -1):
            comps = rsum.components(w)
            r = comps[i - 1]
            if is_zero(r):
                continue
            lv = levels[i - 1]
            mvec = restricted_solve(lv.S_raw, lv.Nc, lv.R, vscale(-1, r))
            # chain of level i-1 for mvec, shifted by eps^(j+1-i)
            Ni1 = Subspace.full(nv) if i == 1 else levels[i - 2].N
            low = _series_comb(Ni1.coordinates(mvec), chains[i - 1], i, nv)
            shift = j + 1 - i
            for s, v in enumerate(low):
                if s + shift <= j:
                    ch[s + shift] = vadd(ch[s + shift], v)
            w = _apply_series(A, ch, j)
        if not is_zero(w):
            raise AssertionError("chain elimination left a residual")
        out.append(ch)
    return out


def _new_stage(G, fixed, levels, chains, affine, x_param, seed) -> Stage:
    st = Stage(G, len(fixed), tuple(fixed), tuple(levels), tuple(chains), affine, x_param, seed)
    return st


def init_stage(G: PolyMap, *, x_param: bool = False, seed: int | None = None) -> Stage:
    require_origin(G)
    A = jacobian_series(G, [], 0)
    chains0 = [[b] for b in Subspace.full(G.nv).basis]
    lv = _build_level(G, 0, A, [], chains0, x_param, seed)
    return _new_stage(G, (), [lv], [chains0], None, x_param, seed)


def build_S_next(stage: Stage) -> Matrix:
    """S_{k+1} of the stage (already built on construction)."""
    return stage.levels[-1].S


def sum_operator(stage: Stage) -> Matrix:
    """[S_1 | S_2|N_1 | ... | S_{k+1}|N_k] on N_0 x ... x N_k."""
    cols = []
    for i, lv in enumerate(stage.levels):
        for b in stage.N(i).basis:
            cols.append(lv.S.apply(b))
    return Matrix.from_columns(cols, stage.G.m) if cols else Matrix.zeros(stage.G.m, 0)


def advance(stage: Stage, z, affine: AffineSet | None = None) -> Stage:
    if stage.surjective:
        raise AlreadyRegular("sum operator already surjective")
    z = tuple(z)
    if affine is None:
        affine = solvability_affine(stage, z)
        if affine is None:
            raise Infeasible("no solution of the next solvability conditions")
    G = stage.G
    j = stage.k          # chains of level j+1 use A_0..A_j, then level j+2 needs A_{j+1}
    fixed = stage.fixed + (z,)
    A = jacobian_series(G, fixed, j + 1)
    levels = list(stage.levels)
    chains = list(stage.chains)
    new_chain = _extend_chains(G, j, A, levels, chains)
    chains.append(new_chain)
    levels.append(_build_level(G, j + 1, A, levels, new_chain, stage.x_param, stage.seed))
    return _new_stage(G, fixed, levels, chains, affine, stage.x_param, stage.seed)


def stage_from_prefix(G: PolyMap, prefix: Sequence, *, x_param=False, seed=None) -> Stage:
    st = init_stage(G, x_param=x_param, seed=seed)
    for z in prefix:
        st = advance(st, z)
    return st


# -- scalar closed form -------------------------------------------------------------

def _partitions(k: int, largest: int):
    """Multiplicity vectors n_1..n_largest with sum tau*n_tau = k."""
    def rec(rest, tau):
        if tau == 0:
            if rest == 0:
                yield ()
            return
        for n in range(rest // tau + 1):
            for tail in rec(rest - n * tau, tau - 1):
                yield tail + (n,)
    # rec appends the entry for tau after those for 1..tau-1, so index 0 is tau = 1
    yield from rec(k, largest)


def scalar_S_terms(k: int, printed: bool = False) -> list:
    """(multiplicities, coefficient of G^beta applied to raw zbar's) pairs."""
    top = k - 1 if printed else k
    out = []
    if top < 1:
        return out
    for n in _partitions(k, top):
        denom = 1
        for tau, nt in enumerate(n, start=1):
            denom *= math.factorial(nt) * math.factorial(tau) ** nt
        out.append((n, Fraction(s_constant(k), denom)))
    return out


def scalar_S(G: PolyMap, fixed: Sequence, k: int, printed: bool = False) -> Matrix:
    """S_{k+1} of a scalar equation in two unknowns from the multinomial formula.

    printed=True restricts the multiplicities to tau <= k-1 exactly as the
    index condition is usually typeset; that variant loses the zbar_k term.
    """
    if G.nv != 2 or G.m != 1:
        raise ShapeMismatch("scalar formula needs nv = 2 and m = 1")
    if len(fixed) < k:
        raise ValueError("not enough fixed coefficients")
    if k == 0:
        return deriv_form(G, 1).operator()
    row = [Fraction(0), Fraction(0)]
    for n, coef in scalar_S_terms(k, printed):
        args = []
        for tau, nt in enumerate(n, start=1):
            args += [fixed[tau - 1]] * nt
        form = deriv_form(G, 1 + len(args))
        for j in range(2):
            val = form(unit_vec(2, j), *args)[0]
            if val != 0:
                row[j] = row[j] + coef * val
    return Matrix.of([row])


# -- solvability ------------------------------------------------------------------------

def _affine_system(G: PolyMap, prefix: Sequence, first_free: int, last_eq: int, x_param: bool):
    """Linear system for z_first_free..z_last_eq from T^1..T^last_eq = 0.

    Returns (matrix, rhs, column list) with columns (block a, coordinate r).
    """
    nv, m = G.nv, G.m
    A = jacobian_series(G, prefix, max(last_eq - first_free, 0))
    s = substitute_curve(G, prefix, last_eq)
    cols = [(a, r) for a in range(first_free, last_eq + 1) for r in range(nv) if not (x_param and r == 0)]
    rows, rhs = [], []
    for jdx in range(1, last_eq + 1):
        fj = math.factorial(jdx)
        for i in range(m):
            row = []
            for a, r in cols:
                if a > jdx:
                    row.append(Fraction(0))
                else:
                    row.append(Fraction(fj, math.factorial(a)) * A[jdx - a].data[i][r])
            rows.append(row)
            rhs.append(-fj * s[jdx][i])
    return Matrix.of(rows, len(cols)), rhs, cols


def solvability_affine(stage: Stage, z) -> AffineSet | None:
    """X-bar_{2k} for zbar_k = z: the affine set of z_{k+1}..z_{2k}, or None."""
    G = stage.G
    k = stage.k + 1
    prefix = list(stage.fixed) + [tuple(z)]
    M, b, cols = _affine_system(G, prefix, k + 1, 2 * k, stage.x_param)
    x = solve(M, b) if cols else (() if all(v == 0 for v in b) else None)
    if x is None:
        return None
    nv = G.nv
    # re-embed into full blocks (x coordinate fixed to zero in x_param mode)
    full_dim = k * nv
    idx = {(a, r): (a - k - 1) * nv + r for a in range(k + 1, 2 * k + 1) for r in range(nv)}
    point = [Fraction(0)] * full_dim
    for val, c in zip(x, cols):
        point[idx[c]] = val
    dirs = []
    for kb in (kernel(M).basis if cols else []):
        v = [Fraction(0)] * full_dim
        for val, c in zip(kb, cols):
            v[idx[c]] = val
        dirs.append(v)
    return AffineSet(tuple(point), Subspace(full_dim, dirs), nv)


# -- candidate search ---------------------------------------------------------------------

@dataclass
class SearchOptions:
    grid_bound: int = 6
    leading_max: int = 1
    grid_cap: int = 20000
    notes: list = field(default_factory=list)


def _conditions(stage: Stage) -> list:
    """Polynomials in z_k (nv variables) that must vanish for X-bar_{2k} to be nonempty."""
    G = stage.G
    nv, m = G.nv, G.m
    k = stage.k + 1
    prefix = list(stage.fixed)
    A = jacobian_series(G, prefix, k)
    s = substitute_curve(G, prefix, 2 * k)
    free = [(a, r) for a in range(k + 1, 2 * k + 1) for r in range(nv) if not (stage.x_param and r == 0)]
    rows = []
    for jdx in range(1, 2 * k + 1):
        fj = math.factorial(jdx)
        for i in range(m):
            rows.append([Fraction(fj, math.factorial(a)) * A[jdx - a].data[i][r] if a <= jdx else Fraction(0)
                         for a, r in free])
    if free:
        Y = left_kernel(Matrix.of(rows, len(free))).basis
    else:
        Y = [unit_vec(len(rows), t) for t in range(len(rows))]
    quad = [{e: c for e, c in comp.items() if sum(e) == 2} for comp in G.comps]
    c2 = Fraction(math.factorial(2 * k), math.factorial(k) ** 2)
    out = []
    for y in Y:
        poly: dict = {}
        for t, yv in enumerate(y):
            if yv == 0:
                continue
            jdx, i = divmod(t, m)
            jdx += 1
            fj = math.factorial(jdx)
            poly = p_add(poly, p_const(yv * fj * s[jdx][i], nv))
            if jdx >= k:
                lin = Fraction(fj, math.factorial(k))
                for r in range(nv):
                    c = A[jdx - k].data[i][r]
                    if c != 0:
                        poly = p_add(poly, p_var(r, nv), yv * lin * c)
            if jdx == 2 * k and quad[i]:
                poly = p_add(poly, quad[i], yv * c2)
        if poly:
            out.append(poly)
    return out


def _tangent_cone(G: PolyMap) -> list:
    out = []
    for comp in G.comps:
        if comp:
            d = min(sum(e) for e in comp)
            out.append({e: c for e, c in comp.items() if sum(e) == d})
    return out


def _subst_affine(poly: dict, z0: Sequence, D: list, q: int) -> dict:
    """poly(z0 + D t) as a polynomial in t (D given as list of nv rows of length q)."""
    nv = len(z0)
    lin = []
    for r in range(nv):
        p = p_const(z0[r], q) if z0[r] != 0 else {}
        for jj in range(q):
            if D[r][jj] != 0:
                p = p_add(p, p_var(jj, q), D[r][jj])
        lin.append(p)
    out: dict = {}
    for e, c in poly.items():
        t = p_const(1, q)
        for r, k in enumerate(e):
            if k:
                t = p_mul(t, p_pow(lin[r], k, q))
        out = p_add(out, t, c)
    return out


def _to_sympy(x):
    import sympy
    if isinstance(x, QuadExt):
        return sympy.Rational(x.a.numerator, x.a.denominator) + \
            sympy.Rational(x.b.numerator, x.b.denominator) * sympy.sqrt(x.d)
    x = Fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def _from_sympy(v):
    """sympy number -> Fraction / QuadExt, or None if not real or not quadratic."""
    import sympy
    v = sympy.nsimplify(sympy.radsimp(sympy.expand(v))) if not v.is_Rational else v
    if v.is_Rational:
        return Fraction(int(v.p), int(v.q))
    if v.is_real is not True:
        return None
    roots = {a for a in v.atoms(sympy.Pow) if a.exp == sympy.Rational(1, 2)}
    if len(roots) != 1:
        return None
    r = roots.pop()
    if not r.base.is_Integer:
        return None
    parts = sympy.collect(sympy.expand(v), r, evaluate=False)
    a = parts.get(sympy.S.One, sympy.S.Zero)
    b = parts.get(r, sympy.S.Zero)
    if set(parts) - {sympy.S.One, r} or not (a.is_Rational and b.is_Rational):
        return None
    return QuadExt.make(Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q)), int(r.base))


def _grid_values(bound: int) -> list:
    vals = {Fraction(a, b) for a in range(-bound, bound + 1) for b in range(1, bound + 1)}
    return sorted(vals, key=lambda x: (abs(x), x))


def _solve_polys(polys: list, q: int, opts: SearchOptions) -> list:
    """Real points (over Q or one quadratic field) of a polynomial system in q unknowns."""
    polys = [p for p in polys if p]
    if any(set(p) == {(0,) * q} for p in polys):
        return []  # nonzero constant
    if q == 0:
        return [()]
    if not polys:
        opts.notes.append("positive-dimensional family; representative with free parameters 0")
        return [(Fraction(0),) * q]
    if q <= 2:
        pts = _solve_sympy(polys, q, opts)
        if pts is not None:
            return pts
    return _solve_grid(polys, q, opts)


def _check(polys, pt) -> bool:
    try:
        return all(p_eval(p, pt) == 0 for p in polys)
    except Exception:
        return False


def _solve_sympy(polys: list, q: int, opts: SearchOptions):
    import sympy
    syms = sympy.symbols(f"t0:{q}")
    exprs = []
    for p in polys:
        ex = sympy.S.Zero
        for e, c in p.items():
            term = _to_sympy(c)
            for s, k in zip(syms, e):
                if k:
                    term *= s ** k
            ex += term
        exprs.append(sympy.expand(ex))
    try:
        sols = sympy.solve(exprs, list(syms), dict=True)
    except (NotImplementedError, Exception):
        return None
    out = []
    for sol in sols:
        vals = [sympy.sympify(sol.get(s, s)) for s in syms]
        free = set().union(*(v.free_symbols for v in vals)) & set(syms)
        if free:
            opts.notes.append("positive-dimensional family; representative with free parameters 0")
            vals = [v.subs({f: 0 for f in free}) for v in vals]
        conv = [_from_sympy(v) for v in vals]
        if any(c is None for c in conv):
            if any(not v.is_real for v in vals if v.is_real is not None):
                continue
            opts.notes.append("root outside Q and real quadratic fields skipped")
            continue
        try:
            field_of(conv)
        except Exception:
            opts.notes.append("root needs two different square roots; skipped")
            continue
        pt = tuple(conv)
        if _check(polys, pt) and pt not in out:
            out.append(pt)
    return out


def _solve_grid(polys: list, q: int, opts: SearchOptions) -> list:
    vals = _grid_values(opts.grid_bound)
    if len(vals) ** q > opts.grid_cap:
        vals = [Fraction(a) for a in sorted(range(-opts.grid_bound, opts.grid_bound + 1), key=abs)]
        opts.notes.append(f"grid reduced to integers in [-{opts.grid_bound}, {opts.grid_bound}]")
        if len(vals) ** q > opts.grid_cap:
            opts.notes.append(f"SearchExhausted: {q} free parameters exceed the grid cap")
            return []
    out = [pt for pt in itertools.product(vals, repeat=q) if _check(polys, pt)]
    if not out:
        opts.notes.append("SearchExhausted: no grid point satisfies the conditions")
    return out


def _linear_part(polys: list, nv: int):
    lin = [p for p in polys if p_degree(p) <= 1]
    rest = [p for p in polys if p_degree(p) > 1]
    rows, rhs = [], []
    for p in lin:
        rows.append([p.get(tuple(1 if j == r else 0 for j in range(nv)), Fraction(0)) for r in range(nv)])
        rhs.append(-p.get((0,) * nv, Fraction(0)))
    return rows, rhs, rest


def candidates_next(stage: Stage, opts: SearchOptions | None = None) -> list:
    """Candidate values of zbar_{k+1} for which X-bar_{2(k+1)} is nonempty."""
    opts = opts or SearchOptions()
    G = stage.G
    nv = G.nv
    k = stage.k + 1
    polys = _conditions(stage)
    l = stage.leading_index()
    leading = l is None and not stage.x_param
    if stage.x_param:
        polys.append(p_add(p_var(0, nv), p_const(-1, nv)) if k == 1 else p_var(0, nv))
    elif leading:
        polys += _tangent_cone(G)
    else:
        piv = next(i for i, x in enumerate(stage.fixed[l - 1]) if x != 0)
        if k > l:
            polys.append(p_var(piv, nv))   # reparametrization quotient
    rows, rhs, rest = _linear_part(polys, nv)
    if rows:
        M = Matrix.of(rows, nv)
        z0 = solve(M, rhs)
        if z0 is None:
            return []
        Ker = kernel(M)
    else:
        z0 = zero_vec(nv)
        Ker = Subspace.full(nv)
    q = Ker.dim
    D = [[b[r] for b in Ker.basis] for r in range(nv)]
    sub = [_subst_affine(p, z0, D, q) for p in rest]

    def point(t):
        return tuple(z0[r] + sum((D[r][j] * t[j] for j in range(q)), Fraction(0)) for r in range(nv))

    cands: list = []
    if leading:
        if k < opts.leading_max:
            cands.append(zero_vec(nv))
        for i in range(q):
            # chart: t_0..t_{i-1} = 0, t_i = 1
            chart = []
            for p in sub:
                cp: dict = {}
                for e, c in p.items():
                    if any(e[:i]):
                        continue
                    f = e[i + 1:]
                    cp[f] = cp.get(f, 0) + c
                chart.append({e: c for e, c in cp.items() if c != 0})
            for ts in _solve_polys(chart, q - i - 1, opts):
                t = (Fraction(0),) * i + (Fraction(1),) + tuple(ts)
                z = point(t)
                scale = math.factorial(k)
                for sgn in ((1, -1) if k % 2 == 0 else (1,)):
                    cands.append(tuple(sgn * scale * x for x in z))
    else:
        for ts in _solve_polys(sub, q, opts):
            cands.append(point(ts))
    try:
        base = field_of(x for z in stage.fixed for x in z)
    except Exception:
        base = None
    out = []
    for z in cands:
        try:
            d = field_of(z)
        except Exception:
            continue
        if base is not None and d is not None and d != base:
            opts.notes.append("candidate in a second quadratic field skipped")
            continue
        if z not in out:
            out.append(z)
    return out


# -- reports ------------------------------------------------------------------------------------

@dataclass
class RegularityReport:
    regular: bool
    k: int
    k_max: int
    fixed: tuple
    stage: Stage
    dims: dict
    chi: int | None
    notes: list = field(default_factory=list)
    source: str = "search"

    @property
    def verdict(self) -> str:
        return f"Regular({self.k})" if self.regular else f"NotRegularUpTo({self.k_max})"

    @property
    def stability_orders(self) -> dict:
        k = self.k
        return {"coefficients_unchanged": 2 * k + 1, "persists_small_c": 2 * k, "may_destroy": 2 * k - 1}

    def greenberg(self, i_max: int | None = None) -> dict:
        k = self.k
        i_max = i_max if i_max is not None else 2 * k + 4
        return {i: k + i for i in range(max(k, 1), i_max + 1)}

    @property
    def wedge_orders(self) -> list:
        # complement N_i^c shrinks like eps^(2k+2-i); the kernel part like eps^(k+1)
        k = self.k
        out = [(f"Nc{i}", self.stage.Nc(i).dim, 2 * k + 2 - i) for i in range(1, k + 2)]
        out.append((f"N{k + 1}", self.stage.N(k + 1).dim, k + 1))
        return out

    @property
    def dim_Y(self):
        if not self.stage.x_param:
            return None
        return self.stage.N(self.k + 1).dim - 1


def chi(stage: Stage) -> int:
    if not stage.surjective:
        raise NotRegular("chi needs a surjective sum operator")
    return sum(i * stage.Nc(i + 1).dim for i in range(1, stage.k + 1))


def _report(stage: Stage, k_max: int, notes, source) -> RegularityReport:
    reg = stage.surjective
    return RegularityReport(reg, stage.k, k_max, stage.fixed, stage, stage.dims(),
                            chi(stage) if reg else None, list(dict.fromkeys(notes)), source)


def _primitive(fixed) -> bool:
    idx = [i for i, z in enumerate(fixed, start=1) if not is_zero(z)]
    return not idx or math.gcd(*idx) == 1


def _sort_key(rep: RegularityReport):
    key = []
    for z in rep.fixed:
        for x in z:
            key.append(float(x) if isinstance(x, QuadExt) else x)
    return tuple(key)


def analyze(G: PolyMap, k_max: int = 16, hints: list | None = None, x_param: bool = False,
            grid_bound: int = 6, leading_max: int | None = None, seed: int | None = None,
            max_branches: int = 64, planar_auto: bool = True) -> list:
    """Run the stage loop along every candidate branch; one report per branch found."""
    require_origin(G)
    if leading_max is None:
        leading_max = 1
    root = init_stage(G, x_param=x_param, seed=seed)
    if root.surjective:
        return [_report(root, k_max, ["surjective at k = 0: the solution set is a manifold"], "linear")]
    notes_global: list = []
    source = "search"
    if hints is None and planar_auto and not x_param and G.nv == 2 and G.m == 1:
        from .branches import planar_branches
        curves, bnotes = planar_branches(G, k_max + 2)
        hints = curves
        notes_global += bnotes
        source = "expansion"
    elif hints is not None:
        source = "hint"
    reports: list = []

    def explore(st: Stage, hint, notes):
        if len(reports) >= max_branches:
            notes_global.append("branch budget exhausted")
            return
        if st.surjective:
            reports.append(_report(st, k_max, notes, source))
            return
        if st.k >= k_max:
            reports.append(_report(st, k_max, notes, source))
            return
        opts = SearchOptions(grid_bound=grid_bound, leading_max=leading_max)
        if hint is not None and len(hint) > st.k:
            cands = [tuple(hint[st.k])]
        else:
            cands = candidates_next(st, opts)
        for z in cands:
            aff = solvability_affine(st, z)
            if aff is None:
                if hint is not None and len(hint) > st.k:
                    notes_global.append(f"hint coefficient {st.k + 1} infeasible")
                continue
            explore(advance(st, z, aff), hint, notes + opts.notes)

    if hints:
        for h in hints:
            explore(root, [tuple(Fraction(x) if isinstance(x, int) else x for x in z) for z in h], [])
    else:
        explore(root, None, [])
    out, seen = [], set()
    for rep in reports:
        key = rep.fixed
        if key in seen:
            continue
        seen.add(key)
        if not _primitive(rep.fixed):
            continue
        rep.notes = list(dict.fromkeys(rep.notes + notes_global))
        out.append(rep)
    out.sort(key=_sort_key)
    return out


# -- lifting, determinant, perturbations -----------------------------------------------------------

@dataclass
class Lifted:
    coeffs: list          # z_1..z_{2k+L}
    determined: int       # coefficients fixed by the construction (k + L)
    residual_order: int | None   # first nonzero order of G(z(eps)), None if zero through `checked`
    checked: int


def lift(stage: Stage, L: int, q_choices: Sequence | None = None) -> Lifted:
    if not stage.surjective:
        raise NotRegular("lifting needs a regular stage")
    G = stage.G
    k = stage.k
    nv = G.nv
    coeffs = [tuple(z) for z in stage.fixed]
    Nk1 = stage.N(k + 1)
    dsum = stage.domain_sum()
    last_part = len(dsum.parts) - 1
    tail: list = []
    for l in range(1, L + 1):
        M, b, cols = _affine_system(G, coeffs, k + l, 2 * k + l, stage.x_param)
        # pin the kernel component of z_{k+l}
        q = tuple(q_choices[l - 1]) if q_choices and len(q_choices) >= l else zero_vec(nv)
        extra_rows, extra_rhs = [], []
        if Nk1.dim:
            # functionals giving the N_{k+1} coordinates under the domain sum
            basis = [bb for p in dsum.parts for bb in p.basis]
            inv = inverse(Matrix.from_columns(basis, nv))
            off = nv - Nk1.dim
            qc = inv.apply(q)
            for t in range(Nk1.dim):
                row = inv.data[off + t]
                extra_rows.append([row[r] if a == k + l else Fraction(0) for a, r in cols])
                extra_rhs.append(qc[off + t])
        Mx = Matrix.of(list(M.data) + extra_rows, len(cols))
        x = solve(Mx, list(b) + extra_rhs)
        if x is None:
            raise Infeasible(f"lifting failed at level {l}")
        vals = {c: v for c, v in zip(cols, x)}
        blocks = []
        for a in range(k + l, 2 * k + l + 1):
            blocks.append(tuple(vals.get((a, r), Fraction(0)) for r in range(nv)))
        coeffs.append(blocks[0])
        tail = blocks[1:]
    if L == 0:
        M, b, cols = _affine_system(G, coeffs, k + 1, 2 * k, stage.x_param)
        x = solve(M, b) if cols else ()
        vals = {c: v for c, v in zip(cols, x)}
        tail = [tuple(vals.get((a, r), Fraction(0)) for r in range(nv)) for a in range(k + 1, 2 * k + 1)]
    full = coeffs + tail
    checked = 2 * k + L + 2
    ser = substitute_curve(G, full, checked)
    ordr = s_order(ser)
    return Lifted(full, k + L, ordr, checked)


def det_leading_exponent(G: PolyMap, curve: Sequence, basis: Sequence, trunc: int | None = None):
    """(exponent, coefficient) of det(G'(z(eps)) restricted to the given directions)."""
    m = G.m
    if len(basis) != m:
        raise ValueError("need exactly m directions")
    trunc = trunc if trunc is not None else len(curve)
    A = jacobian_series(G, curve, trunc)
    # entries J[i][j] as series
    J = [[[A[t].apply(basis[j])[i] for t in range(trunc + 1)] for j in range(m)] for i in range(m)]
    total = [Fraction(0)] * (trunc + 1)
    for perm in itertools.permutations(range(m)):
        sign = 1
        for a in range(m):
            for b2 in range(a + 1, m):
                if perm[a] > perm[b2]:
                    sign = -sign
        prod = [Fraction(1)] + [Fraction(0)] * trunc
        for i in range(m):
            prod = s_mul(prod, J[i][perm[i]], trunc)
        total = [x + sign * y for x, y in zip(total, prod)]
    o = s_order(total)
    if o is None:
        raise IdenticallyZeroThroughOrder(trunc)
    return o, total[o]


def complement_basis(stage: Stage) -> list:
    """Concatenated bases of N_1^c, ..., N_{k+1}^c."""
    return [b for lv in stage.levels for b in lv.Nc.basis]


def greenberg_lower_bound(k_list: Sequence[int], i_max: int) -> dict:
    if any(k < 1 for k in k_list):
        raise ValueError("k values must be positive")
    out = {}
    for i in range(1, i_max + 1):
        best = None
        for k in k_list:
            j = i // k
            if j >= 1:
                v = j * k + i
                best = v if best is None else max(best, v)
        if best is not None:
            out[i] = best
    return out


@dataclass
class ProbeResult:
    status: list          # per baseline branch: "unchanged" | "moved" | "destroyed"
    expected: str
    perturbed: list


def stability_probe(G: PolyMap, H: PolyMap, c, baseline: Sequence[RegularityReport], **kw) -> ProbeResult:
    Gc = perturb(G, H, c)
    new = [r for r in analyze(Gc, **kw) if r.regular]
    used = set()
    status = []
    reg_base = [r for r in baseline if r.regular]
    for r in reg_base:
        hit = next((i for i, n in enumerate(new) if i not in used and n.fixed == r.fixed), None)
        if hit is not None:
            used.add(hit)
            status.append("unchanged")
            continue
        status.append(None)
    for idx, r in enumerate(reg_base):
        if status[idx] is not None:
            continue
        hit = next((i for i, n in enumerate(new) if i not in used and n.fixed[:1] == r.fixed[:1]
                    and n.k == r.k), None)
        if hit is not None:
            used.add(hit)
            status[idx] = "moved"
        else:
            status[idx] = "destroyed"
    if Fraction(c) == 0 or H.is_zero():
        expected = "unchanged"
    else:
        oh = order(H)
        kk = min((r.k for r in reg_base), default=0)
        expected = "unchanged" if oh >= 2 * kk + 1 else ("persists for small c" if oh == 2 * kk
                                                          else "may be destroyed")
    return ProbeResult(status, expected, new)


def _curve_to_series(curve: Sequence, nv: int, trunc: int) -> list:
    from .polysys import curve_series
    return curve_series(curve, nv, trunc)


def _series_to_curve(series: list, trunc: int) -> list:
    nv = len(series)
    return [tuple(series[v][i] * math.factorial(i) for v in range(nv)) for i in range(1, trunc + 1)]


def _eval_map_on_series(polys: Sequence, series: list, trunc: int) -> list:
    from .polysys import _Powers
    powers = [_Powers(s, trunc) for s in series]
    return [poly_series(p, powers, trunc) for p in polys]


def transform_curve(curve: Sequence, phi: Sequence, psi: Sequence, trunc: int) -> list:
    """Coefficients of phi^{-1}(z(psi(eps))) with psi(eps) = eps + sum psi[j] eps^(j+2)."""
    nv = len(curve[0])
    zs = _curve_to_series(curve, nv, trunc)
    ps = [Fraction(0), Fraction(1)] + [Fraction(a) for a in psi] + [Fraction(0)] * trunc
    ps = ps[:trunc + 1]
    # z(psi(eps)) by Horner-free power accumulation
    comp = []
    for v in range(nv):
        acc = [Fraction(0)] * (trunc + 1)
        pw = [Fraction(1)] + [Fraction(0)] * trunc
        for i in range(1, trunc + 1):
            pw = s_mul(pw, ps, trunc)
            if zs[v][i] != 0:
                acc = [a + zs[v][i] * b for a, b in zip(acc, pw)]
        comp.append(acc)
    # w with phi(w) = comp, fixed point w <- w + comp - phi(w)
    w = [list(c) for c in comp]
    for _ in range(trunc + 1):
        pw = _eval_map_on_series(phi, w, trunc)
        w = [[a + b - c for a, b, c in zip(w[v], comp[v], pw[v])] for v in range(nv)]
    return _series_to_curve(w, trunc)


def jet_transform_check(G: PolyMap, phi: Sequence, psi: Sequence, baseline: RegularityReport) -> bool:
    """Transform the baseline branch and re-certify it for G o phi."""
    from .polysys import compose
    k = baseline.k
    nv = G.nv
    for v, poly in enumerate(phi):
        for e, c in poly.items():
            d = sum(e)
            if d == 1 and c != (1 if e[v] == 1 else 0):
                raise ValueError("coordinate change must have identity linear part")
            if 2 <= d <= k and c != 0:
                raise ValueError("coordinate change must be the identity through order k")
        if poly.get(tuple(1 if i == v else 0 for i in range(nv)), 0) != 1:
            raise ValueError("coordinate change must have identity linear part")
    if any(Fraction(a) != 0 for a in list(psi)[:max(k - 1, 0)]):
        raise ValueError("reparametrization must be the identity through order k")
    lifted = lift(baseline.stage, k + 2)
    trunc = len(lifted.coeffs)
    new_curve = transform_curve(lifted.coeffs, phi, psi, trunc)
    Gt = compose(G, phi)
    reps = analyze(Gt, k_max=max(baseline.k_max, k + 1), hints=[new_curve[:k]],
                   x_param=baseline.stage.x_param)
    return any(r.regular and r.k == k and r.fixed == baseline.fixed for r in reps)
