"""Newton polygons of plane curve germs: segment data, branch k-degrees and Milnor numbers.

Support points are (a, b) for the monomial x^a y^b. A segment is stored as a
`branches.Edge` whose ``p`` is the y-extent and ``q`` the x-extent.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import upoly
from .branches import Edge, blow_up, edge_poly, edges, lower_hull, root_branches, root_point
from .errors import (CapExceeded, DegenerateStrictTransform, NotConvenient, NotSimple,
                     ShapeMismatch, Unsupported, ZeroMap)
from .linalg import rank
from .polysys import PolyMap, order, p_diff

Segment = Edge


@dataclass(frozen=True)
class NewtonPolygon:
    support: dict          # (a, b) -> coefficient, of the input
    split: tuple           # (a, b): x^a y^b split off
    reduced: dict          # support after the split
    segments: tuple        # hull segments of the reduced support
    full_segments: tuple   # hull segments of the input support
    ord: int

    @property
    def convenient(self) -> bool:
        return self.split == (0, 0)

    @property
    def isolated(self) -> bool:
        # a simple axis factor keeps the singularity isolated; a repeated one does not
        return self.split[0] <= 1 and self.split[1] <= 1

    @property
    def intercepts(self) -> tuple:
        v = lower_hull(list(self.reduced))
        return v[-1][0], v[0][1]


def _scalar(G: PolyMap) -> dict:
    if G.nv != 2 or G.m != 1:
        raise ShapeMismatch("Newton polygons need one equation in two unknowns")
    if G.is_zero():
        raise ZeroMap("zero equation")
    return dict(G.comps[0])


def build_polygon(G: PolyMap) -> NewtonPolygon:
    g = _scalar(G)
    a = min(e[0] for e in g)
    b = min(e[1] for e in g)
    red = {(e[0] - a, e[1] - b): c for e, c in g.items()}
    return NewtonPolygon(g, (a, b), red, tuple(edges(red)), tuple(edges(g)), order(G))


def segment_data(seg: Segment) -> tuple:
    return seg.p, seg.q, seg.r, seg.n, seg.m, seg.N, seg.A, seg.A_S


def phi(seg: Segment, support: dict) -> tuple:
    """Coefficients c_j of V^j W^(r-j)."""
    return tuple(edge_poly(support, seg))


@dataclass(frozen=True)
class FactorInfo:
    degree: int
    multiplicity: int
    root: Fraction | None        # t0 for the linear factor V - t0 W
    irreducible: bool | None     # for blocks without rational roots; None when undecided

    @property
    def simple(self) -> bool:
        return self.multiplicity == 1


def factor_analysis(coeffs) -> list:
    out = []
    for fac, mult in upoly.squarefree_decomposition(list(coeffs)):
        roots = upoly.rational_roots(fac)
        for t0 in roots:
            out.append(FactorInfo(1, mult, t0, True))
        rest = upoly.deg(fac) - len(roots)
        if rest:
            # no rational roots left, so degree 2 or 3 is irreducible
            out.append(FactorInfo(rest, mult, None, True if rest <= 3 else None))
    return out


def square_free(coeffs) -> bool:
    return all(f.simple for f in factor_analysis(coeffs))


def branch_k(seg: Segment) -> int:
    k = seg.N - max(seg.m, seg.n)
    assert k == 2 * seg.A - max(seg.m, seg.n)
    return k


def segment_sum_identity(seg: Segment) -> tuple:
    a, b = seg.r * branch_k(seg), 2 * seg.A_S - max(seg.p, seg.q)
    assert a == b
    return a, b


def valley_pattern(ks) -> bool:
    """Strictly falling, at most one tie at the bottom, then strictly rising."""
    ks = list(ks)
    i = 0
    while i + 1 < len(ks) and ks[i] > ks[i + 1]:
        i += 1
    if i + 1 < len(ks) and ks[i] == ks[i + 1]:
        i += 1
    while i + 1 < len(ks) and ks[i] < ks[i + 1]:
        i += 1
    return i == len(ks) - 1


# -- Milnor numbers ---------------------------------------------------------------------

INFINITE = "inf"


def _axis_terms(poly: NewtonPolygon) -> list:
    """(r, k) for the split-off axis branches x = 0 and y = 0."""
    a, b = poly.split
    alpha_last, beta_first = poly.intercepts
    out = []
    if a == 1:
        out.append((1, beta_first))
    if b == 1:
        out.append((1, alpha_last))
    return out


def branch_table(poly: NewtonPolygon) -> list:
    """(r_i, k_i) per segment of the input polygon, plus the axis branches."""
    table = [(seg.r, branch_k(seg)) for seg in poly.full_segments]
    return table + _axis_terms(poly)


def milnor_via_k(poly: NewtonPolygon, *, hypothesis: bool = False):
    """Sum r_i k_i - ord + 1; None when a segment polynomial has a repeated factor."""
    if not poly.isolated:
        return INFINITE
    total = 0
    for seg in poly.full_segments:
        facs = factor_analysis(phi(seg, poly.support))
        if all(f.simple for f in facs):
            total += seg.r * branch_k(seg)
            continue
        if not hypothesis:
            return None
        for f in facs:
            if f.simple:
                total += f.degree * branch_k(seg)
            elif f.root is None:
                return None
            else:
                st = strict_transform(seg, poly.support, f.root)
                total += st.r_T * st.k
    total += sum(r * k for r, k in _axis_terms(poly))
    return total - poly.ord + 1


def _area2(vertices) -> int:
    """Twice the area under the polygon through the given hull vertices, down to the axes."""
    # vertices run from the y-axis to the x-axis; close the loop through the origin
    pts = [(0, 0)] + list(reversed(vertices))
    s = 0
    for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
        s += x1 * y2 - x2 * y1
    return abs(s)


def milnor_kouchnirenko(poly: NewtonPolygon) -> int:
    """Newton number 2V - a - b + 1 of the polygon, made convenient by x^M, y^M if needed."""
    if not poly.isolated:
        raise NotConvenient("repeated axis factor: the singularity is not isolated")
    pts = list(poly.support)
    if not poly.convenient:
        M = max(max(a for a, _ in pts), max(b for _, b in pts)) + poly.intercepts[0] + poly.intercepts[1] + 1
        pts += [(M, 0), (0, M)]
    v = lower_hull(pts)
    if v[0][0] != 0 or v[-1][1] != 0:
        raise NotConvenient("polygon does not reach both axes")
    a, b = v[-1][0], v[0][1]
    return _area2(v) - a - b + 1


def _monomials(d: int) -> list:
    return [(i, t - i) for t in range(d) for i in range(t, -1, -1)]


def milnor_local_algebra(G: PolyMap, degree_cap: int = 40) -> int:
    """dim Q[[x,y]]/(G_x, G_y), from truncations modulo increasing powers of the maximal ideal.

    Equal dimensions at consecutive truncation orders d, d+1 mean m^d lies in the
    ideal (Nakayama), so the value is exact once two consecutive orders agree.
    """
    g = _scalar(G)
    gens = [p_diff(g, 0), p_diff(g, 1)]
    if not any(gens):
        raise CapExceeded("gradient vanishes identically")
    prev = None
    for d in range(1, degree_cap + 1):
        mons = _monomials(d)
        idx = {e: i for i, e in enumerate(mons)}
        rows = []
        for p in gens:
            for (i, j) in mons:
                row = [Fraction(0)] * len(mons)
                for (a, b), c in p.items():
                    e = (a + i, b + j)
                    if e in idx:
                        row[idx[e]] += c
                if any(row):
                    rows.append(row)
        dim = len(mons) - (rank(rows, len(mons)) if rows else 0)
        if prev is not None and dim == prev:
            return dim
        prev = dim
    raise CapExceeded(f"local algebra dimension did not stabilise by degree {degree_cap}")


# -- branches and the strict transform -----------------------------------------------------

def branch_curve(seg: Segment, support: dict, t0, M: int) -> list:
    """Branch through the blow-up point of a simple rational root, as coefficients z_1..z_M."""
    f = edge_poly(support, seg)
    if upoly.root_multiplicity(f, Fraction(t0)) != 1:
        raise NotSimple("root of the segment polynomial is not simple")
    curves, _ = root_branches(support, seg, t0, M)
    return curves[0]


def certify(G: PolyMap, curve, k_max: int = 16):
    """Run the iteration along a given curve; the regular report or None."""
    from .iteration import analyze
    reps = analyze(G, k_max=k_max, hints=[curve])
    reps = [r for r in reps if r.regular]
    return reps[0] if reps else None


@dataclass
class StrictTransformData:
    d1: int
    e1: int
    m_T: int
    n_T: int
    r_T: int
    k: int
    segment: Segment
    root: Fraction
    hypothesis: bool = True


def strict_transform(seg: Segment, support: dict, t0) -> StrictTransformData:
    t0 = Fraction(t0)
    d = upoly.root_multiplicity(edge_poly(support, seg), t0)
    if d < 2:
        raise NotSimple("root is simple; use branch_k")
    v0, w0 = root_point(t0, seg)
    H = blow_up(support, seg, v0, w0)
    d1 = min((a for a, b in H if b == 0), default=None)
    e1 = min((b for a, b in H if a == 0), default=None)
    if e1 is None:
        raise DegenerateStrictTransform("transformed equation vanishes identically at the blow-up point")
    assert d1 == d
    es = edges(H)
    if len(es) != 1:
        raise Unsupported("strict transform has more than one segment")
    T = es[0]
    if not square_free(edge_poly(H, T)):
        raise Unsupported("strict transform segment has a repeated factor")
    k = T.m * (seg.N - max(seg.m, seg.n)) + T.n * (d1 - 1)
    return StrictTransformData(d1, e1, T.m, T.n, T.r, k, seg, t0)


def strict_branches(st: StrictTransformData, support: dict, M: int) -> list:
    curves, _ = root_branches(support, st.segment, st.root, M)
    return curves


# -- report ---------------------------------------------------------------------------------

@dataclass
class MilnorReport:
    mu_via_k: object            # int, INFINITE, or None when inconclusive
    mu_kouchnirenko: object
    mu_local_algebra: object
    branches: list              # (r_i, k_i)
    agree: bool
    notes: list = field(default_factory=list)
    hypothesis: dict | None = None


def milnor_report(G: PolyMap, *, hypothesis: bool = False, local_cap: int = 40) -> MilnorReport:
    poly = build_polygon(G)
    notes = []
    if poly.split != (0, 0):
        notes.append(f"split factor x^{poly.split[0]} y^{poly.split[1]}")
    if not poly.isolated:
        notes.append("non-isolated singularity: Milnor number is infinite")
        return MilnorReport(INFINITE, INFINITE, INFINITE, [], True, notes)
    via = milnor_via_k(poly)
    if via is None:
        notes.append("segment polynomial with a repeated factor: k-degree sum inconclusive")
    ko = milnor_kouchnirenko(poly)
    nondeg = all(square_free(phi(s, poly.support)) for s in poly.full_segments)
    try:
        la = milnor_local_algebra(G, local_cap)
    except CapExceeded:
        la = None
        notes.append("local algebra cap exceeded")
    vals = [v for v in (via, ko if nondeg else None, la) if v is not None]
    agree = len(set(vals)) <= 1
    hyp = None
    if hypothesis:
        hv = milnor_via_k(poly, hypothesis=True)
        hyp = {"mu": hv, "agrees_local_algebra": la is None or hv == la}
        agree = agree and hyp["agrees_local_algebra"]
    return MilnorReport(via, ko, la, branch_table(poly), agree, notes, hyp)
