import json

import pytest

from symcheck import cli, linalg
from symcheck.cli import SCHEMA, run


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_list(capsys):
    assert run(["list"]) == 0
    rep = _json(capsys)
    assert rep["schema"] == SCHEMA and "cp(2)" in rep["result"]["catalog"]


def test_info_and_validate(capsys):
    assert run(["info", "gr(3,2)"]) == 0
    assert _json(capsys)["result"]["n"] == 6
    assert run(["validate", "prod(gr(3,2),cp(2))"]) == 0
    rep = _json(capsys)
    assert rep["pass"] and rep["checks"]


@pytest.mark.parametrize(
    "argv",
    [[], ["info", "nosuchspace"], ["solve"], ["solve", "cp(2)", "--field", "rr"], ["cochain", "cp(2)"], ["bogus"]],
)
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().err


def test_prop3_on_product_is_usage_error(capsys):
    assert run(["solve", "prod(gr(3,2),cp(2))"]) == 2


def test_solve_reports_fields(capsys):
    assert run(["solve", "sl3so3", "--orth"]) == 0
    res = _json(capsys)["result"]
    assert res["dim"] == 14 and res["unknowns"] == 100
    for key in ("space", "rows", "phi_block_rank", "k_adh_complement_rank", "field", "certified"):
        assert key in res


def test_solve_gfp_certify(capsys):
    assert run(["solve", "cp(2)", "--orth", "--field", "gfp", "--certify"]) == 0
    res = _json(capsys)["result"]
    assert res["dim"] == 8 and res["certified"]


def test_out_and_replay(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run(["curvature", "cp(2)", "--out", str(out)]) == 0
    first = _json(capsys)
    assert json.loads(out.read_text()) == first
    assert run(["--replay", str(out)]) == 0
    rep = _json(capsys)
    assert rep["result"]["identical_payload"]


def test_replay_detects_edits(tmp_path, capsys):
    out = tmp_path / "r.json"
    run(["curvature", "cp(2)", "--out", str(out)])
    capsys.readouterr()
    data = json.loads(out.read_text())
    data["result"]["lambda"] = "7"
    out.write_text(json.dumps(data))
    assert run(["--replay", str(out)]) == 1


def test_replay_missing_file(tmp_path, capsys):
    assert run(["--replay", str(tmp_path / "missing.json")]) == 2


def test_dump_matrix_round_trip(tmp_path, capsys):
    path = tmp_path / "m.txt"
    assert run(["solve", "gr(3,2)", "--orth", "--dump-matrix", str(path)]) == 0
    res = _json(capsys)["result"]
    M, _ = linalg.read_golden(path)
    assert M.ncols == res["unknowns"] and M.nrows == res["rows"]
    assert M.ncols - linalg.rank(M) == res["dim"] == 0


def test_roots_on_product_reports_each_factor(capsys):
    assert run(["roots", "prod(gr(3,2),cp(2))"]) == 0
    res = _json(capsys)["result"]
    assert [f["type"] for f in res["factors"]] == ["B2", "BC1"]


def test_lemma3_and_cochain(capsys):
    assert run(["lemma3", "cp(2)"]) == 0
    assert _json(capsys)["result"]["dim"] == 12
    for check in ("partial", "delta", "derivations", "nabla-w"):
        assert run(["cochain", "gr(3,2)", "--check", check]) == 0
        capsys.readouterr()


def test_derivations_on_product_is_usage_error(capsys):
    assert run(["cochain", "prod(gr(3,2),cp(2))", "--check", "derivations"]) == 2


def test_spin9_relations(capsys):
    assert run(["spin9", "--check", "relations"]) == 0
    assert _json(capsys)["pass"]


def test_verify_all_subset(capsys):
    assert run(["verify-all", "--only", "1,5", "--progress"]) == 0
    captured = capsys.readouterr()
    rep = json.loads(captured.out)
    assert [r["id"] for r in rep["result"]["criteria"]] == [1, 5]
    assert "[PASS] criterion  1" in captured.err


def test_seed_determinism(capsys):
    run(["roots", "g2so4", "--seed", "4"])
    a = _json(capsys)["result"]
    run(["roots", "g2so4", "--seed", "4"])
    assert _json(capsys)["result"] == a


def test_version(capsys):
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["--version"])
