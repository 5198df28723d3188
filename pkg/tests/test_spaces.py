import pytest

from symcheck.errors import InvalidSpec, SignMismatch
from symcheck.spaces import CATALOG, build_model, dual, parse_spec, perturbed, product, validate

FAST = [s for s in CATALOG if s != "op2"]


@pytest.mark.parametrize("spec", CATALOG)
def test_catalog_models_are_lie_triple_systems(spec):
    m = build_model(spec)
    failed = [c for c in validate(m) if not c["pass"]]
    assert not failed


@pytest.mark.parametrize(
    "spec,n",
    [("gr(3,1)", 3), ("gr(3,2)", 6), ("gr(4,3)", 12), ("cp(2)", 4), ("hp(2)", 8), ("op2", 16), ("sl3so3", 5), ("g2so4", 8)],
)
def test_dimensions(spec, n):
    assert build_model(spec).n == n


@pytest.mark.parametrize("bad", ["nosuchspace", "gr(3)", "cp(1)", "prod(gr(3,2)", "gr(a,b)", ""])
def test_bad_specs(bad):
    with pytest.raises(InvalidSpec):
        parse_spec(bad) if bad else build_model(bad)


def test_spec_round_trip():
    for text in ["gr(3,2)", "prod(gr(3,2),cp(2))", "dual(cp(3))", "sl3so3"]:
        assert str(parse_spec(text)) == text


def test_dual_and_product():
    a = build_model("gr(3,2)")
    d = dual(a)
    assert d.sign == -a.sign
    assert all(c["pass"] for c in validate(d))
    p = build_model("prod(gr(3,2),cp(2))")
    assert p.factor_blocks == (tuple(range(6)), tuple(range(6, 10)))
    assert not p.irreducible
    with pytest.raises(SignMismatch):
        product(a, dual(build_model("cp(2)")))


def test_su3so3_is_dual_of_sl3so3():
    a, b = build_model("sl3so3"), build_model("su3so3")
    assert (a.triple == -b.triple).all()


def test_perturbed_model_fails_validation():
    m = perturbed(build_model("gr(3,2)"), (0, 1, 0, 1), 1)
    assert any(not c["pass"] for c in validate(m))


def test_structured_models_have_extra_checks():
    names = {c["name"] for c in validate(build_model("cp(2)"))}
    assert "complex_structure" in names
    names = {c["name"] for c in validate(build_model("hp(2)"))}
    assert "quaternionic_structure" in names


def test_model_json_lists_constants():
    m = build_model("cp(2)")
    data = m.to_json()
    assert data["n"] == 4 and data["constants"]
    assert all(len(row) == 5 for row in data["constants"])
