from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symcheck import curvature as cv
from symcheck import exact as ex
from symcheck.errors import DimensionTooSmall, NotScalarOnBlock, NotSymmetric
from symcheck.spaces import build_model, perturbed


@pytest.mark.parametrize(
    "spec,lam",
    [("gr(3,1)", 2), ("gr(4,1)", 3), ("gr(3,2)", 3), ("cp(2)", 6), ("sl3so3", -3), ("su3so3", 3), ("g2so4", 2)],
)
def test_einstein_constants(spec, lam):
    assert cv.einstein_constant(build_model(spec)) == lam


@pytest.mark.slow
def test_op2_einstein_constant():
    assert cv.einstein_constant(build_model("op2")) == 36


@pytest.mark.parametrize("spec", ["gr(4,1)", "gr(5,1)"])
def test_spheres_are_conformally_flat(spec):
    assert cv.weyl(build_model(spec)).is_zero()


@pytest.mark.parametrize("spec", ["gr(3,2)", "cp(2)", "g2so4", "sl3so3"])
def test_weyl_tensor_properties(spec):
    m = build_model(spec)
    W = cv.weyl(m)
    assert not W.is_zero()
    assert cv.weyl_ricci_defects(W) == []
    assert cv.weyl_symmetry_defects(W) == []
    assert cv.decomposition_holds(m)


def test_product_is_not_einstein_but_casimir_is_blockwise():
    m = build_model("prod(gr(3,2),cp(2))")
    assert cv.einstein_constant(m) is None
    assert cv.casimir(m) == [-3, -6]


def test_casimir_is_minus_ricci():
    m = build_model("cp(2)")
    assert cv.casimir(m) == [-cv.einstein_constant(m)]


def test_errors():
    with pytest.raises(DimensionTooSmall):
        cv.schouten(build_model("gr(3,1)"))
    with pytest.raises(NotSymmetric):
        cv.s_operator([[0, 1], [0, 0]])
    with pytest.raises(NotScalarOnBlock):
        cv.casimir(perturbed(build_model("gr(3,2)"), (0, 1, 1, 0), 5))


def test_s_operator_of_identity_is_twice_identity():
    S = cv.s_operator(ex.eye(4))
    assert ex.is_zero(ex.simplify_array(S - 2 * ex.eye(6)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["gr(3,2)", "cp(2)", "sl3so3", "g2so4"]))
def test_casimir_perturbation_vanishes_for_skew_k(seed, spec):
    m = build_model(spec)
    K = cv.random_skew(m.n, np.random.default_rng(seed))
    assert ex.is_zero(cv.casimir_perturbation_defect(m, K))


def test_casimir_perturbation_detects_symmetric_k():
    m = build_model("gr(3,2)")
    K = ex.eye(m.n)
    K[0, 0] = Fraction(2)
    assert not ex.is_zero(cv.casimir_perturbation_defect(m, K))


def test_curvature_is_skew_and_antisymmetric_in_pair():
    m = build_model("cp(2)")
    R = cv.curvature(m)
    for i in range(m.n):
        for j in range(m.n):
            assert ex.is_zero(ex.simplify_array(R(i, j) + R(j, i)))
            assert ex.is_zero(ex.simplify_array(R(i, j) + R(i, j).T))
