"""Command-line interface: every command prints one JSON report.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage
errors (bad arguments, unknown spaces).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import acceptance
from . import constraints as cn
from . import curvature as cv
from . import exact as ex
from . import linalg
from . import roots as rt
from . import spin9
from .errors import InvalidSpec, NotIrreducible, SymcheckError
from .spaces import CATALOG, GRAMMAR, SpaceSpec, build_model, parse_spec, validate

SCHEMA = "symcheck.report/1"


class UsageError(Exception):
    pass


def _model(text: str):
    try:
        return build_model(text)
    except InvalidSpec as e:
        msg = str(e)
        raise UsageError(msg if GRAMMAR in msg else f"{msg}\n{GRAMMAR}") from None


def _leaves(spec: SpaceSpec, flip: bool = False) -> list[str]:
    """Irreducible factors of a spec, with duals pushed inside products."""
    if spec.kind == "prod":
        return _leaves(spec.args[0], flip) + _leaves(spec.args[1], flip)
    if spec.kind == "dual":
        return _leaves(spec.args[0], not flip)
    return [f"dual({spec})" if flip else str(spec)]


def _check(name: str, ok, **witness) -> dict:
    out = {"name": name, "pass": bool(ok)}
    if witness:
        out["witness"] = witness
    return out


# --------------------------------------------------------------------------
# commands: each returns (payload, checks)


def cmd_list(args):
    return {"catalog": CATALOG, "grammar": GRAMMAR}, []


def cmd_info(args):
    m = _model(args.space)
    data = m.to_json()
    if not args.constants:
        data["nonzero_constants"] = len(data.pop("constants"))
    data["irreducible"] = m.irreducible
    return data, []


def cmd_validate(args):
    m = _model(args.space)
    return {"n": m.n}, validate(m)


def cmd_curvature(args):
    m = _model(args.space)
    rep = cv.report(m)
    checks = []
    if m.irreducible:
        checks.append(_check("einstein", rep["einstein"]))
    checks.append(_check("casimir_scalar_on_blocks", rep["casimir"] is not None))
    if m.n >= 4:
        checks.append(_check("weyl_tracefree", rep["weyl_tracefree"]))
        checks.append(_check("decomposition", rep["decomposition"]))
    return rep, checks


def cmd_roots(args):
    _model(args.space)  # rejects bad specs as usage errors
    factors = _leaves(parse_spec(args.space))
    blocks = []
    checks = []
    for f in factors:
        rep = rt.report(_model(f), seed=args.seed)
        rep["space"] = f
        blocks.append(rep)
        checks += [{**c, "name": f"{f}:{c['name']}"} for c in rep["checks"]]
    payload = blocks[0] if len(blocks) == 1 else {"factors": blocks}
    return payload, checks


def cmd_solve(args):
    m = _model(args.space)
    if args.system == "prop3":
        if not m.irreducible:
            raise UsageError(f"{m.name} is reducible; use --system prop1")
        system = cn.assemble_prop3(m, orth14=args.orth, phi_zero=args.phi_zero)
    else:
        system = cn.assemble_prop1(m, orth14=args.orth, phi_zero=args.phi_zero)
    if args.dump_matrix:
        linalg.write_golden(system.matrix, args.dump_matrix)
    sol = cn.solve_constraints(system, args.field, seed=args.seed, certify=args.certify, prime=args.prime)
    payload = {"space": m.name, "system": args.system, "orth": args.orth, "phi_zero": args.phi_zero}
    payload |= {"unknowns": system.unknowns, "rows": system.rows, **sol.to_json()}
    checks = [_check("prime_agreement", sol.trusted)]
    if args.certify:
        checks.append(_check("certified", sol.certified))
    return payload, checks


def cmd_lemma3(args):
    r = cn.lemma3_solve(_model(args.space))
    return r, [_check("contains_ad_m", r["contains_ad_m"]), _check("ad_m_injective", r["ad_m_dim"] == r["n"])]


def cmd_cochain(args):
    m = _model(args.space)
    check = args.check
    if check == "partial":
        b = cn.boundary(m)
        b.pop("M_basis")
        return b, [_check("closed_form_agrees", b["closed_form_agrees"]), _check("orthogonal_sum", b["orthogonal_sum"])]
    if check == "delta":
        n = m.n
        ident = ex.is_zero(ex.simplify_array(cn.coboundary_delta1(m, ex.eye(n)) - 2 * m.triple))
        inner = all(ex.is_zero(cn.coboundary_delta1(m, ex.skew_from_coords(u, n))) for u in cn.adh_basis(m))
        rng = np.random.default_rng(args.seed)
        generic = not ex.is_zero(cn.coboundary_delta1(m, ex.obj(rng.integers(-3, 4, size=(n, n)))))
        payload = {"delta_id_is_twice_bracket": ident, "inner_derivations_closed": inner, "random_L_nonzero": generic}
        return payload, [_check(k, v) for k, v in payload.items() if k != "random_L_nonzero"]
    if check == "d-equals-m":
        datum = rt.root_decomposition(m, rt.cartan_subspace(m, seed=None), seed=args.seed) if m.irreducible else None
        d = cn.decomposable_span(m, datum, budget=args.budget, seed=args.seed)
        return d, [_check("saturated", d["saturated"])]
    if check == "derivations":
        try:
            d = cn.derivations(m)
        except NotIrreducible as e:
            raise UsageError(str(e)) from None
        return d, [_check("equals_adh_action", d["equals_adh_action"])]
    if check == "nabla-w":
        rng = np.random.default_rng(args.seed)
        zero = []
        for _ in range(args.samples):
            K = cn.random_adh_valued(m, rng)
            zero.append(all(ex.is_zero(v) for v in cn.nabla_w(m, K).values()))
        return {"samples": args.samples, "all_zero": all(zero)}, [_check("nabla_w_zero_for_adh_valued_K", all(zero))]
    raise UsageError(f"unknown check {check}")


def cmd_spin9(args):
    rep = spin9.report(args.check, seed=args.seed)
    checks = []
    for key, sec in rep.items():
        checks.append(_check(key, sec["pass"]))
        if key == "xi":
            checks += [_check(f"xi:{k}", v["pass"]) for k, v in sec.items() if isinstance(v, dict)]
    return rep, checks


def cmd_verify_all(args):
    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = acceptance.run_all(
        seed=args.seed, slow=args.slow, only=only,
        on_result=lambda r: print(acceptance.summary_line(r), file=sys.stderr, flush=True) if args.progress else None,
    )
    checks = [_check(f"criterion_{r['id']}", r["pass"]) for r in results]
    return {"criteria": results}, checks


COMMANDS = {
    "list": cmd_list,
    "info": cmd_info,
    "validate": cmd_validate,
    "curvature": cmd_curvature,
    "roots": cmd_roots,
    "solve": cmd_solve,
    "lemma3": cmd_lemma3,
    "cochain": cmd_cochain,
    "spin9": cmd_spin9,
    "verify-all": cmd_verify_all,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    common.add_argument("--out", type=Path, help="also write the JSON report to this file")

    p = _Parser(prog="symcheck", description="Exact checks on symmetric-space tangent models.")
    p.add_argument("--version", action="version", version=f"symcheck {__version__}")
    p.add_argument("--replay", type=Path, help="re-run the command recorded in a report and compare payloads")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    sub.add_parser("list", parents=[common], help="catalog of spaces")
    s = sub.add_parser("info", parents=[common], help="model summary")
    s.add_argument("space")
    s.add_argument("--constants", action="store_true", help="include all nonzero structure constants")
    for name in ("validate", "curvature", "roots", "lemma3"):
        sub.add_parser(name, parents=[common]).add_argument("space")

    s = sub.add_parser("solve", parents=[common], help="solve a (K, Phi) system")
    s.add_argument("space")
    s.add_argument("--system", choices=["prop3", "prop1"], default="prop3")
    s.add_argument("--orth", action="store_true", help="require K orthogonal to ad(h)")
    s.add_argument("--phi-zero", action="store_true", help="pin Phi = 0")
    s.add_argument("--field", choices=["qq", "gfp"], default="qq")
    s.add_argument("--prime", type=int, help="first prime for --field gfp")
    s.add_argument("--certify", action="store_true", help="verify a modular kernel over QQ")
    s.add_argument("--dump-matrix", type=Path, help="write the assembled matrix in golden format")

    s = sub.add_parser("cochain", parents=[common], help="boundary, coboundary and derivation checks")
    s.add_argument("space")
    s.add_argument("--check", required=True, choices=["partial", "delta", "d-equals-m", "derivations", "nabla-w"])
    s.add_argument("--budget", type=int, default=64, help="Cartan subspaces for d-equals-m")
    s.add_argument("--samples", type=int, default=3, help="random K for nabla-w")

    s = sub.add_parser("spin9", parents=[common], help="Clifford system and the Xi map")
    s.add_argument("--check", choices=["relations", "decomposition", "xi", "all"], default="all")

    s = sub.add_parser("verify-all", parents=[common], help="run the acceptance suite")
    s.add_argument("--slow", action="store_true", help="include the OP2 solve")
    s.add_argument("--only", help="comma-separated criterion ids")
    s.add_argument("--progress", action="store_true", help="print one line per criterion to stderr")
    return p


def _report(argv: list[str], args) -> dict:
    t = time.perf_counter()
    payload, checks = COMMANDS[args.command](args)
    return {
        "schema": SCHEMA,
        "command": argv,
        "space": getattr(args, "space", None),
        "result": payload,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
        "timing": {"seconds": round(time.perf_counter() - t, 3)},
    }


def _emit(report: dict, out: Path | None):
    text = json.dumps(report, indent=2, default=str)
    print(text)
    if out:
        out.write_text(text + "\n")


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.replay:
            recorded = json.loads(args.replay.read_text())
            again = _report(recorded["command"], parser.parse_args(recorded["command"]))
            same = json.loads(json.dumps(again["result"], default=str)) == recorded["result"]
            report = {
                "schema": SCHEMA,
                "command": argv,
                "replayed": recorded["command"],
                "result": {"identical_payload": same},
                "checks": [_check("identical_payload", same)],
                "pass": same,
                "timing": again["timing"],
            }
        elif not args.command:
            raise UsageError(parser.format_usage().strip())
        else:
            report = _report(argv, args)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, KeyError) as e:
        print(f"symcheck: {e}", file=sys.stderr)
        return 2
    except SymcheckError as e:
        print(f"symcheck: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    _emit(report, getattr(args, "out", None))
    return 0 if report["pass"] else 1


def main() -> None:
    sys.exit(run())
