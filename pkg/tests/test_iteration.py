from fractions import Fraction as F

import pytest

from conftest import load
from kregular.errors import AlreadyRegular, IdenticallyZeroThroughOrder, NotRegular
from kregular.iteration import (advance, analyze, candidates_next, chi, complement_basis, det_leading_exponent,
                                greenberg_lower_bound, init_stage, jet_transform_check, lift, scalar_S,
                                scalar_S_terms, solvability_affine, stability_probe, stage_from_prefix,
                                sum_operator)
from kregular.linalg import Matrix, Subspace, unit_vec
from kregular.polysys import p_add, p_pow, p_var, parse, substitute_curve


@pytest.fixture(scope="module")
def ex1():
    return load("example1.txt")


@pytest.fixture(scope="module")
def d5():
    return load("d5.txt")


@pytest.fixture(scope="module")
def ex3():
    return load("example3.txt")


def test_init_stage_example1(ex1):
    st = init_stage(ex1)
    assert st.levels[0].S.is_zero()
    assert st.N(1) == Subspace.full(3)
    assert st.R(1).dim == 0 and st.Rc(1) == Subspace.full(2)


def test_init_stage_linear_is_regular():
    st = init_stage(parse("vars: x y\neq: x + y^2\neq: y\n"))
    assert st.surjective and chi(st) == 0


def test_init_stage_example3(ex3):
    st = init_stage(ex3)
    assert st.R(1) == Subspace(3, [(0, 1, 0)])
    assert st.R(1).dim == 1


def test_second_and_third_operator(ex1):
    st = advance(init_stage(ex1), (1, 0, 0))
    assert st.levels[-1].S == Matrix.of([[0, 0, 2], [0, 0, 0]])
    st = advance(st, (1, 0, 0))
    assert st.levels[-1].S == Matrix.of([[0, 0, 0], [0, -12, 0]])
    assert st.surjective
    assert sum_operator(st).rows == 2


def test_d5_operators(d5):
    st = stage_from_prefix(d5, [(1, 0), (0, 0)])
    assert st.levels[-1].S == Matrix.of([[0, 12]])
    cusp = stage_from_prefix(d5, [(0, 0), (0, 2), (6, 0), (0, 0), (0, 0)])
    assert cusp.levels[-1].S == Matrix.of([[60480, 0]])
    assert cusp.surjective


def test_solvability_affine_example1(ex1):
    st = advance(init_stage(ex1), (1, 0, 0))
    aff = solvability_affine(st, (1, 0, 0))
    # z_3 = (u3, v3, 0), z_4 free
    assert aff.direction.dim == 5
    assert all(aff.contains((a, b, 0, c, d, e)) for a, b, c, d, e in [(1, 2, 3, 4, 5), (0, 0, 0, 0, 0)])
    assert not aff.contains((0, 0, 1, 0, 0, 0))


def test_solvability_of_zero_map():
    G = parse("vars: x y\neq: 0\n")
    aff = solvability_affine(init_stage(G), (1, 0))
    assert aff.direction.dim == 2


def test_candidates(ex1, d5):
    st = init_stage(ex1)
    assert candidates_next(st) == [(1, 0, 0), (0, 0, 1)]
    assert candidates_next(advance(st, (1, 0, 0))) == [(0, 0, 0), (0, 2, 0)]
    assert set(candidates_next(init_stage(d5))) == {(1, 0), (0, 1)}


def test_advance_on_regular_stage_fails():
    st = init_stage(parse("vars: x\neq: x\n"))
    with pytest.raises(AlreadyRegular):
        advance(st, (1,))


def test_analyze_example1(ex1):
    reps = analyze(ex1, k_max=8)
    verdicts = [r.verdict for r in reps]
    assert verdicts == ["NotRegularUpTo(8)", "Regular(2)", "Regular(2)"]
    assert reps[1].fixed == ((1, 0, 0), (0, 0, 0))
    assert reps[2].fixed == ((1, 0, 0), (0, 2, 0))
    x3 = reps[0]
    assert all(lv.S.is_zero() for lv in x3.stage.levels[2:])


def test_analyze_d5(d5):
    reps = analyze(d5)
    assert sorted(r.k for r in reps) == [2, 5]
    assert sorted(2 * r.k + 1 for r in reps) == [5, 11]


def test_analyze_example3(ex3):
    reps = [r for r in analyze(ex3) if r.regular]
    assert len(reps) == 1
    r = reps[0]
    assert r.k == 2 and r.dims["Nc"] == [1, 1, 1] and r.chi == 3


def test_chi_needs_regular(ex1):
    with pytest.raises(NotRegular):
        chi(init_stage(ex1))


def test_report_fields(d5):
    rep = [r for r in analyze(d5) if r.k == 2][0]
    assert rep.stability_orders == {"coefficients_unchanged": 5, "persists_small_c": 4, "may_destroy": 3}
    assert rep.greenberg(6) == {2: 4, 3: 5, 4: 6, 5: 7, 6: 8}
    assert rep.wedge_orders[-1] == ("N3", rep.stage.N(3).dim, 3)


def test_det_leading_exponent(ex1, ex3):
    z0 = [(1, 0, 0), (0, 0, 0), (0, 0, 0), (0, 0, 0)]
    assert det_leading_exponent(ex1, z0, [unit_vec(3, 2), unit_vec(3, 1)]) == (3, -1)
    rep = [r for r in analyze(ex3) if r.regular][0]
    curve = lift(rep.stage, 4).coeffs
    assert det_leading_exponent(ex3, curve, complement_basis(rep.stage)) == (3, 1)
    lin = parse("vars: x y\neq: x\neq: y\n")
    assert det_leading_exponent(lin, [(1, 0)], [(1, 0), (0, 1)]) == (0, 1)
    with pytest.raises(IdenticallyZeroThroughOrder):
        det_leading_exponent(parse("vars: x y\neq: x*y\n"), [(1, 0)], [(1, 0)], trunc=4)


def test_lift_parabola(ex1):
    rep = analyze(ex1, k_max=4)[2]
    res = lift(rep.stage, 8)
    assert res.coeffs[1] == (0, 2, 0)
    assert all(z == (0, 0, 0) for z in res.coeffs[2:])
    assert res.residual_order is None


def test_lift_d5(d5):
    reps = analyze(d5)
    triv = [r for r in reps if r.k == 2][0]
    res = lift(triv.stage, 4)
    assert all(z == (0, 0) for z in res.coeffs[1:])
    cusp = [r for r in reps if r.k == 5][0]
    res = lift(cusp.stage, 4)
    assert res.residual_order is None or res.residual_order >= 15
    assert res.checked >= 15


def test_lift_residual_general():
    # a branch that is not a polynomial curve: residual order must exceed the solved range
    G = parse("vars: x y\neq: y - x^2 - y^3\n")
    rep = analyze(G)[0]
    res = lift(rep.stage, 5)
    assert res.residual_order is None or res.residual_order >= 2 * rep.k + 5 + 1
    ser = substitute_curve(G, res.coeffs, 2 * rep.k + 5)
    assert all(v == (0,) for v in ser)


def test_greenberg():
    assert greenberg_lower_bound([1], 6) == {i: 2 * i for i in range(1, 7)}
    assert greenberg_lower_bound([2], 6) == {2: 4, 3: 5, 4: 8, 5: 9, 6: 12}
    assert greenberg_lower_bound([2, 3], 6)[3] == 6
    with pytest.raises(ValueError):
        greenberg_lower_bound([0], 3)


def test_scalar_formula_matches_elimination(d5):
    st = stage_from_prefix(d5, [(1, 0), (0, 0)])
    assert scalar_S(d5, st.fixed, 2) == st.levels[-1].S
    cusp = stage_from_prefix(d5, [(0, 0), (0, 2), (6, 0), (0, 0), (0, 0)])
    assert scalar_S(d5, cusp.fixed, 5) == cusp.levels[-1].S


def test_scalar_terms_k5():
    coefs = sorted(c for _, c in scalar_S_terms(5))
    assert coefs == sorted(map(F, [252, 2520, 1260, 3780, 2520, 2520, 252]))


def test_printed_index_condition_drops_top_term(d5):
    # restricting tau <= k-1 loses the G^2 zbar_k term: at k = 1 nothing is left
    assert scalar_S_terms(1, printed=True) == []
    G = parse("vars: x y\neq: x*y + y^3\n")
    st = stage_from_prefix(G, [(1, 0)])
    assert st.levels[-1].S == Matrix.of([[0, 2]])
    assert scalar_S(G, st.fixed, 1, printed=True) == Matrix.of([[0, 0]])


def test_stability_probe(ex1):
    base = analyze(ex1, k_max=6)
    H4 = parse("vars: x1 x2 x3\neq: 0\neq: x1^4\n")
    res = stability_probe(ex1, H4, F(1, 5), base, k_max=6)
    assert res.status == ["moved", "moved"]
    assert res.expected == "persists for small c"
    res = stability_probe(ex1, H4, F(1, 3), base, k_max=6)
    assert res.status == ["destroyed", "destroyed"]
    assert stability_probe(ex1, H4, 0, base, k_max=6).status == ["unchanged", "unchanged"]
    H5 = parse("vars: x1 x2 x3\neq: 0\neq: x1^5\n")
    res = stability_probe(ex1, H5, 1, base, k_max=6)
    assert res.expected == "unchanged"
    assert all(s in ("unchanged", "moved") for s in res.status)
    for r in res.perturbed:
        assert r.fixed[0] == (1, 0, 0)


def test_jet_transform_check(ex1, d5):
    ident3 = [p_var(i, 3) for i in range(3)]
    shear = [p_var(0, 3), p_add(p_var(1, 3), p_pow(p_var(0, 3), 3, 3)), p_var(2, 3)]
    for rep in analyze(ex1, k_max=6):
        if rep.regular:
            assert jet_transform_check(ex1, ident3, [], rep)
            assert jet_transform_check(ex1, shear, [], rep)
    triv = [r for r in analyze(d5) if r.k == 2][0]
    assert jet_transform_check(d5, [p_var(0, 2), p_var(1, 2)], [0, 0, 1], triv)
    cusp = [r for r in analyze(d5) if r.k == 5][0]
    with pytest.raises(ValueError):
        jet_transform_check(d5, [p_var(0, 2), p_var(1, 2)], [0, 0, 1], cusp)


def test_x_param_mode(ex1):
    reps = analyze(ex1, k_max=6, x_param=True)
    assert [r.verdict for r in reps] == ["Regular(2)", "Regular(2)"]
    assert all(r.dim_Y == 0 for r in reps)


def test_scaling_invariance(ex1):
    for lam in (F(2), F(-1, 3)):
        st = stage_from_prefix(ex1, [(lam, 0, 0), (0, 0, 0)])
        assert st.surjective
