import pytest

from symcheck import roots as rt
from symcheck.acceptance import EXPECTED_TYPES
from symcheck.errors import NotIrreducible
from symcheck.spaces import build_model


@pytest.mark.parametrize("spec,want", sorted(EXPECTED_TYPES.items()))
def test_root_system_types(spec, want):
    rep = rt.report(build_model(spec))
    assert rep["type"] == want
    assert all(c["pass"] for c in rep["checks"]), rep["checks"]


@pytest.mark.parametrize("spec,rank", [("gr(3,2)", 2), ("gr(5,3)", 3), ("cp(3)", 1), ("sl3so3", 2), ("g2so4", 2)])
def test_cartan_is_maximal_abelian(spec, rank):
    m = build_model(spec)
    for seed in (None, 0, 1):
        A = rt.cartan_subspace(m, seed=seed)
        assert len(A) == rank
        assert len(rt.centralizer(m, A)) == rank


def test_g2so4_short_root_spaces():
    m = build_model("g2so4")
    d = rt.root_decomposition(m, rt.cartan_subspace(m, seed=None))
    ip = rt._inner(d)
    lengths = [ip(R.coords, R.coords) for R in d.roots]
    short = min(lengths, key=float)
    support = sorted(
        next(i for i, x in enumerate(R.space[0]) if x != 0) for R, L in zip(d.roots, lengths) if L == short
    )
    assert support == [0, 2, 4]
    assert max(lengths, key=float) / short == 3


def test_multiplicities_sum_to_dimension():
    for spec in ("cp(3)", "hp(2)", "gr(4,2)"):
        m = build_model(spec)
        d = rt.root_decomposition(m)
        assert d.rank + sum(R.multiplicity for R in d.roots) == m.n


def test_hp2_multiplicities():
    d = rt.root_decomposition(build_model("hp(2)"))
    assert sorted(R.multiplicity for R in d.roots) == [3, 4]


@pytest.mark.slow
def test_op2_multiplicities():
    d = rt.root_decomposition(build_model("op2"))
    assert d.type == "BC1"
    assert sorted(R.multiplicity for R in d.roots) == [7, 8]


def test_products_rejected():
    with pytest.raises(NotIrreducible):
        rt.cartan_subspace(build_model("prod(gr(3,2),cp(2))"))


def test_nonorthogonal_root_pairs_bracket_nontrivially():
    m = build_model("gr(3,2)")
    d = rt.root_decomposition(m)
    l7 = rt.lemma7_check(m, d)
    assert l7["pass"] and l7["checked"] > 0
