import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from symcheck import constraints as cn
from symcheck import exact as ex
from symcheck import linalg
from symcheck.acceptance import GOLDEN_CP2_ORTH_DIM, GOLDEN_LEMMA3
from symcheck.errors import NotIrreducible
from symcheck.spaces import build_model


def _solve(spec, orth=False, phi_zero=False, field="qq", **kw):
    system = cn.assemble_prop3(build_model(spec), orth14=orth, phi_zero=phi_zero)
    return system, cn.solve_constraints(system, field, **kw)


@pytest.mark.parametrize(
    "spec,orth,phi_zero",
    [
        ("gr(3,2)", False, False),
        ("gr(3,2)", True, False),
        ("cp(2)", False, False),
        ("cp(2)", True, False),
        ("cp(2)", True, True),
        ("gr(4,1)", False, False),
        ("dual(cp(2))", True, False),
    ],
)
def test_solver_matches_operator_form_oracle(spec, orth, phi_zero):
    _, sol = _solve(spec, orth, phi_zero)
    assert sol.dim == oracles.prop3_dimension(build_model(spec), orth, phi_zero)


def test_cp2_golden_is_oracle_value():
    assert oracles.prop3_dimension(build_model("cp(2)"), orth=True) == GOLDEN_CP2_ORTH_DIM


@pytest.mark.parametrize("spec", ["gr(3,2)", "cp(2)", "cp(3)", "hp(2)"])
def test_lemma3_matches_oracle(spec):
    m = build_model(spec)
    r = cn.lemma3_solve(m)
    assert r["dim"] == oracles.lemma3_dimension(m)
    assert r["contains_ad_m"] and r["ad_m_dim"] == m.n
    if spec in GOLDEN_LEMMA3:
        assert r["dim"] == GOLDEN_LEMMA3[spec]


@pytest.mark.parametrize("spec", ["sl3so3", "g2so4"])
def test_lemma3_is_ad_m_for_irrational_models(spec):
    r = cn.lemma3_solve(build_model(spec))
    assert r["dim"] == r["n"] == r["ad_m_dim"] and r["contains_ad_m"]


def test_sl3_solutions_with_orth():
    _, sol = _solve("sl3so3", orth=True)
    assert sol.dim == 14
    assert sol.k_adh_complement_rank == 14
    assert cn.in_span(cn.sl3_trace_family(), sol.basis)
    assert cn.in_span([cn.sl3_highest_weight()], sol.basis)


@pytest.mark.parametrize("spec", ["gr(3,2)", "cp(2)", "sl3so3", "g2so4"])
def test_adh_valued_family_solves_system_without_orth(spec):
    m = build_model(spec)
    free = cn.assemble_prop3(m)
    orth = cn.assemble_prop3(m, orth14=True)
    fam = cn.adh_valued_family(m)
    assert all(cn.satisfies(free, v) for v in fam)
    # with the orthogonality rows only the zero combination survives
    assert not any(cn.satisfies(orth, v) for v in fam)


def test_trace_of_phi_vanishes_on_solutions():
    system, sol = _solve("sl3so3", orth=True)
    lay = system.layout
    n = lay.n
    for v in sol.basis:
        _, Phi = lay.unstack(v)
        for x in range(n):
            assert ex.simplify(sum((Phi[x, i, i] for i in range(n)), 0)) == 0


def test_row_labels_reconstruct_rows():
    m = build_model("cp(2)")
    system = cn.assemble_prop3(m, orth14=True, phi_zero=True)
    labels = system.matrix.row_labels
    assert len(labels) == system.rows
    for r in range(0, system.rows, 7):
        assert cn.assemble_row(m, labels[r]) == system.matrix.row_dict(r)
    with pytest.raises(ValueError):
        cn.assemble_row(m, "nonsense[0]")


def test_row_labels_for_bianchi_form():
    m = build_model("gr(3,2)")
    system = cn.assemble_prop1(m)
    labels = system.matrix.row_labels
    for r in range(0, system.rows, 11):
        assert cn.assemble_row(m, labels[r]) == system.matrix.row_dict(r)


def test_stack_unstack_round_trip():
    lay = cn.Layout(4)
    v = list(range(lay.size))
    K, Phi = lay.unstack(v)
    assert lay.stack(K, Phi) == v


def test_zero_vector_has_zero_residual():
    m = build_model("sl3so3")
    assert cn.residual(m, [0] * cn.Layout(5).size, orth=True)["zero"]


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_vector_is_not_a_solution(seed):
    m = build_model("gr(3,2)")
    rng = np.random.default_rng(seed)
    v = [int(x) for x in rng.integers(-5, 6, size=cn.Layout(m.n).size)]
    if any(v):
        assert not cn.residual(m, v, orth=True)["zero"]


@pytest.mark.parametrize("spec,dual", [("gr(3,2)", "dual(gr(3,2))"), ("cp(2)", "dual(cp(2))")])
def test_duality_preserves_dimension(spec, dual):
    sa, a = _solve(spec)
    sb, b = _solve(dual)
    assert a.dim == b.dim
    assert all(cn.satisfies(sb, cn.dual_map(v, sa.layout)) for v in a.basis)


def test_modular_and_rational_agree():
    _, q = _solve("cp(2)", orth=True)
    _, g = _solve("cp(2)", orth=True, field="gfp")
    assert q.dim == g.dim and g.trusted
    assert q.phi_block_rank == g.phi_block_rank
    _, c = _solve("cp(2)", orth=True, field="gfp", certify=True)
    assert c.certified and c.dim == q.dim
    assert all(cn.satisfies(cn.assemble_prop3(build_model("cp(2)"), orth14=True), v) for v in c.basis)


def test_extension_field_model_over_gfp():
    _, q = _solve("g2so4", orth=True)
    _, g = _solve("g2so4", orth=True, field="gfp")
    assert q.dim == g.dim == 0
    assert g.certified


def test_reducible_rejected_by_prop3():
    with pytest.raises(NotIrreducible):
        cn.assemble_prop3(build_model("prod(gr(3,2),cp(2))"))


def test_bianchi_form_agrees_with_prop3_on_einstein_model():
    m = build_model("cp(2)")
    a = cn.solve_constraints(cn.assemble_prop3(m, orth14=True))
    b = cn.solve_constraints(cn.assemble_prop1(m, orth14=True))
    assert a.dim == b.dim
    assert cn.in_span(a.basis, b.basis) and cn.in_span(b.basis, a.basis)


@pytest.mark.parametrize("spec", ["gr(3,2)", "cp(2)", "sl3so3", "g2so4"])
def test_boundary_kernel_complements_adh(spec):
    m = build_model(spec)
    b = cn.boundary(m)
    assert b["closed_form_agrees"] and b["orthogonal_sum"]
    assert b["dim_M"] == b["P"] - b["adh_dim"]


def test_decomposable_span_small():
    m = build_model("gr(3,2)")
    d = cn.decomposable_span(m, budget=16)
    assert d["equals_M"]


def test_coboundary_of_identity_and_inner_derivations():
    m = build_model("cp(2)")
    assert ex.is_zero(ex.simplify_array(cn.coboundary_delta1(m, ex.eye(m.n)) - 2 * m.triple))
    for u in cn.adh_basis(m):
        assert ex.is_zero(cn.coboundary_delta1(m, ex.skew_from_coords(u, m.n)))


@pytest.mark.parametrize("spec,dim", [("sl3so3", 3), ("gr(3,2)", 4), ("cp(2)", 4), ("g2so4", 6)])
def test_derivations_are_inner(spec, dim):
    d = cn.derivations(build_model(spec))
    assert d["dim"] == dim and d["equals_adh_action"]


@pytest.mark.parametrize("spec", ["gr(3,2)", "sl3so3", "prod(gr(3,2),cp(2))"])
def test_nabla_w_vanishes_for_adh_valued_k(spec):
    m = build_model(spec)
    rng = np.random.default_rng(5)
    K = cn.random_adh_valued(m, rng)
    assert all(ex.is_zero(v) for v in cn.nabla_w(m, K).values())


def test_nabla_w_of_zero():
    m = build_model("cp(2)")
    K = [ex.zeros((m.n, m.n)) for _ in range(m.n)]
    assert all(ex.is_zero(v) for v in cn.nabla_w(m, K).values())


def test_rational_reconstruct_failure_returns_none():
    p = 101
    bad = [a for a in range(1, p) if cn.rational_reconstruct(a, p) is None]
    assert bad  # most residues have no small fraction
