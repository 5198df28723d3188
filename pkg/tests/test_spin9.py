import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symcheck import spin9
from symcheck.spaces import validate


@pytest.fixture(scope="module")
def cs():
    return spin9.clifford9()


@pytest.fixture(scope="module")
def hodge(cs):
    return spin9.theta_maps(cs)


def test_clifford_relations(cs):
    assert len(cs.S) == 9 and cs.dim == 16
    assert spin9.clifford_violations(cs) == []
    for S in cs.S:
        assert (S == S.T).all()
        assert (S @ S == np.eye(16, dtype=np.int64)).all()


def test_products_span_so16(cs):
    assert spin9.so16_span_rank(cs) == 120


@pytest.mark.parametrize("seed", [1, 2])
def test_conjugated_system_keeps_relations(cs, seed):
    c2 = spin9.conjugated(cs, seed)
    assert spin9.clifford_violations(c2) == []
    assert any((a != b).any() for a, b in zip(c2.S, cs.S))


def test_op2_model_from_clifford_system(cs):
    m = spin9.op2_bracket(cs)
    assert m.n == 16
    assert all(c["pass"] for c in validate(m))


def test_theta_star_is_minus_adjoint(cs, hodge):
    assert (hodge.theta_star[0] == -hodge.theta[0].T).all()
    assert (hodge.theta_star[1] == -hodge.theta[1].T).all()


def test_theta_star_on_degree_one(cs):
    rng = np.random.default_rng(0)
    T = rng.integers(-3, 4, size=16)
    star = spin9._theta_star(cs, 1)
    for i in range(9):
        v = spin9._lift(1, T, [((i,), T)])
        assert (star @ v == -cs.S[i] @ T).all()


def test_theta_composite_is_not_zero_but_xi_kills_it(cs, hodge):
    # anticommuting S_i make Theta_1 Theta_0 nonzero; only its image under Xi vanishes
    TT = hodge.theta[1] @ hodge.theta[0]
    assert TT.any()
    assert not (spin9.xi_map(cs) @ TT).any()


def test_symmetric_pair_lies_in_P1(cs):
    rng = np.random.default_rng(3)
    T = rng.integers(-3, 4, size=16)
    v = spin9._lift(1, T, [((0,), cs.S[1] @ T), ((1,), cs.S[0] @ T)])
    assert not (spin9._theta_star(cs, 1) @ v).any()


def test_dimensions_of_p(hodge):
    assert hodge.dims() == [16, 128, 432]


def test_decomposition(cs):
    r = spin9.decomposition_check(cs)
    assert r["pass"] and r["total_rank"] == 576


def test_xi_is_alternating(cs):
    Xi = spin9.xi_map(cs)
    rng = np.random.default_rng(1)
    coords = Xi @ rng.integers(-2, 3, size=Xi.shape[1])
    X, Y, Z = (rng.integers(-2, 3, size=16) for _ in range(3))
    v = spin9.evaluate_form(coords, X, Y, Z)
    assert spin9.evaluate_form(coords, Y, X, Z) == -v
    assert spin9.evaluate_form(coords, Y, Z, X) == v
    assert spin9.evaluate_form(coords, X, X, Z) == 0


def test_xi_kills_theta_theta(cs):
    assert spin9.xi_kills_theta_theta(cs)["pass"]


def test_kernel_of_xi(cs):
    r = spin9.ker_xi_check(cs)
    assert r["dim_ker_xi"] == 16
    assert r["rank_on_theta1_P1"] == 128 and r["rank_on_P2"] == 432
    assert r["pass"]


def test_kernel_of_xi_conjugated(cs):
    assert spin9.ker_xi_check(spin9.conjugated(cs, 7))["dim_ker_xi"] == 16


def test_witness_p1(cs):
    w = spin9.witness_p1(cs)
    assert w["in_P1"] and w["value"] == w["expected"] == -48


def test_witness_p2_is_nonzero(cs):
    w = spin9.witness_p2(cs)
    assert w["in_P2"] and w["nonzero"]


def test_witness_p2_value(cs):
    # the required value is +|X|^2 |Y|^2; the exact evaluation gives the negative
    w = spin9.witness_p2(cs)
    assert w["value"] == w["expected"]


@pytest.mark.parametrize("seed", [3, 11])
def test_witness_p2_sign_is_stable_under_conjugation(cs, seed):
    w = spin9.witness_p2(spin9.conjugated(cs, seed))
    assert w["in_P2"] and w["equals_minus_expected"]


def test_equivariance(cs):
    assert spin9.equivariance_check(cs, samples=5)["pass"]


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_vector_action_is_skew(seed):
    c = spin9.clifford9()
    rng = np.random.default_rng(seed)
    i, j = rng.choice(9, size=2, replace=False)
    C = spin9.vector_action(c, c.S[i] @ c.S[j])
    assert (C == -C.T).all()
