"""The acceptance suite: one function per criterion, each returning a result dict.

A criterion passes when its mathematical checks hold and it finishes inside
its time budget.  Golden numbers were produced by the dense rational oracle
in tests/oracles.py before being frozen here.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import constraints as cn
from . import curvature as cv
from . import roots as rt
from . import spin9
from .errors import DimensionTooSmall, NotScalarOnBlock
from .exact import is_zero
from .spaces import CATALOG, build_model, scaled, validate

# frozen from tests/oracles.py
GOLDEN_CP2_ORTH_DIM = 8
GOLDEN_LEMMA3 = {"cp(2)": 12, "cp(3)": 36, "hp(2)": 48}


@dataclass(frozen=True)
class Criterion:
    id: int
    title: str
    budget: float  # seconds
    run: Callable[[int], dict]
    slow: bool = False


def _solve(spec, system="prop3", orth=False, phi_zero=False, field="qq", seed=0):
    model = build_model(spec) if isinstance(spec, str) else spec
    assemble = cn.assemble_prop3 if system == "prop3" else cn.assemble_prop1
    sysm = assemble(model, orth14=orth, phi_zero=phi_zero)
    return sysm, cn.solve_constraints(sysm, field, seed=seed)


def c1_sl3(seed: int) -> dict:
    _, sol = _solve("sl3so3", orth=True)
    return {"pass": sol.dim == 14, "dim": sol.dim, "field": sol.field}


def c2_duality(seed: int) -> dict:
    sa, a = _solve("sl3so3", orth=True)
    sb, b = _solve("su3so3", orth=True)
    ab = all(cn.satisfies(sb, cn.dual_map(v, sa.layout)) for v in a.basis)
    ba = all(cn.satisfies(sa, cn.dual_map(v, sb.layout)) for v in b.basis)
    return {"pass": a.dim == b.dim == 14 and ab and ba, "dims": [a.dim, b.dim], "sl3_to_su3": ab, "su3_to_sl3": ba}


def c3_explicit(seed: int) -> dict:
    out = {}
    for spec, dual in (("sl3so3", False), ("su3so3", True)):
        model = build_model(spec)
        fam = cn.sl3_trace_family(dual)
        hw = cn.sl3_highest_weight(dual)
        out[spec] = {
            "trace_family": [cn.residual(model, v, "prop3", orth=True)["zero"] for v in fam],
            "highest_weight": cn.residual(model, hw, "prop3", orth=True)["zero"],
        }
    ok = all(all(r["trace_family"]) and len(r["trace_family"]) == 3 and r["highest_weight"] for r in out.values())
    return {"pass": ok, **out}


def c4_zero_sets(seed: int) -> dict:
    dims = {}
    for spec in ("gr(3,2)", "cp(3)", "hp(2)", "g2so4"):
        dims[spec] = _solve(spec, orth=True)[1].dim
    dims["cp(2) phi-zero"] = _solve("cp(2)", orth=True, phi_zero=True)[1].dim
    return {"pass": all(d == 0 for d in dims.values()), "dims": dims}


def c5_cp2(seed: int) -> dict:
    _, sol = _solve("cp(2)", orth=True)
    return {"pass": sol.dim == GOLDEN_CP2_ORTH_DIM, "dim": sol.dim, "golden": GOLDEN_CP2_ORTH_DIM}


def c6_products(seed: int) -> dict:
    spec = "prod(gr(3,2),gr(3,2))"
    _, free = _solve(spec, "prop1", orth=False, field="gfp", seed=seed)
    _, orth = _solve(spec, "prop1", orth=True, field="gfp", seed=seed)
    ok = (
        free.phi_block_rank == 0
        and free.k_cross_block_rank == 0
        and free.trusted
        and orth.dim == 0
        and orth.trusted
    )
    return {
        "pass": ok,
        "without_orth": free.to_json(),
        "with_orth": orth.to_json(),
    }


def c7_lemma3(seed: int) -> dict:
    res = {}
    ok = True
    for spec in ("gr(3,2)", "g2so4", "sl3so3"):
        r = cn.lemma3_solve(build_model(spec))
        res[spec] = {"dim": r["dim"], "n": r["n"], "contains_ad_m": r["contains_ad_m"]}
        ok &= r["dim"] == r["n"] == r["ad_m_dim"] and r["contains_ad_m"]
    for spec, golden in GOLDEN_LEMMA3.items():
        r = cn.lemma3_solve(build_model(spec))
        res[spec] = {"dim": r["dim"], "n": r["n"], "golden": golden, "contains_ad_m": r["contains_ad_m"]}
        ok &= r["dim"] == golden and r["dim"] > r["n"] and r["contains_ad_m"]
    return {"pass": bool(ok), **res}


def c8_decomposable(seed: int) -> dict:
    model = build_model("gr(4,3)")
    b = cn.boundary(model)
    datum = rt.root_decomposition(model, rt.cartan_subspace(model, seed=None), seed=seed)
    d = cn.decomposable_span(model, datum, budget=64, seed=seed)
    ok = b["dim_M"] == 57 and d["dim_D"] == 57 and d["equals_M"] and b["orthogonal_sum"]
    return {"pass": ok, "dim_M": b["dim_M"], "dim_D": d["dim_D"], "equals_M": d["equals_M"]}


def c9_spin9(seed: int) -> dict:
    rep = spin9.report("all", seed=seed)
    xi = rep["xi"]
    parts = {
        "relations": rep["relations"]["pass"],
        "decomposition": rep["decomposition"]["pass"],
        "xi_theta_theta_zero": xi["theta_theta"]["pass"],
        "witness_P1": xi["witness_P1"]["pass"],
        "witness_P2": xi["witness_P2"]["pass"],
        "ker_xi_16": xi["kernel"]["pass"] and xi["kernel_conjugated"]["pass"],
        "equivariance": xi["equivariance"]["pass"],
    }
    return {
        "pass": all(parts.values()),
        "parts": parts,
        "witness_P1": xi["witness_P1"],
        "witness_P2": xi["witness_P2"],
    }


def c10_curvature(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    per = {}
    ok = True
    for spec in CATALOG:
        model = build_model(spec)
        axioms = all(c["pass"] for c in validate(model))
        einstein = cv.einstein_constant(model) is not None
        try:
            W = cv.weyl(model)
            tracefree = not cv.weyl_ricci_defects(W)
            weyl_zero = W.is_zero()
        except DimensionTooSmall:
            # in dimension 3 the Weyl tensor vanishes identically
            tracefree, weyl_zero = True, True
        try:
            cas = cv.casimir(model)
            casimir_ok = len(cas) == 1
        except NotScalarOnBlock:
            casimir_ok = False
        perturb = all(
            is_zero(cv.casimir_perturbation_defect(model, cv.random_skew(model.n, rng))) for _ in range(100)
        )
        entry = {
            "axioms": axioms,
            "einstein": einstein,
            "weyl_tracefree": tracefree,
            "casimir_scalar": casimir_ok,
            "casimir_perturbation": perturb,
        }
        if spec.startswith("gr(") and spec.endswith(",1)"):
            entry["weyl_zero"] = weyl_zero
        ok &= all(entry.values())
        per[spec] = entry
    return {"pass": bool(ok), "models": per}


EXPECTED_TYPES = {
    "gr(3,2)": "B2",
    "gr(4,2)": "B2",
    "g2so4": "G2",
    "sl3so3": "A2",
    "gr(5,3)": "B3",
    "cp(2)": "BC1",
    "cp(3)": "BC1",
    "hp(2)": "BC1",
}


def c11_roots(seed: int) -> dict:
    res = {}
    ok = True
    for spec, want in EXPECTED_TYPES.items():
        r = rt.report(build_model(spec), seed=seed)
        checks = all(c["pass"] for c in r["checks"])
        res[spec] = {"type": r["type"], "expected": want, "checks": checks}
        ok &= r["type"] == want and checks
    return {"pass": bool(ok), **res}


def c12_op2(seed: int) -> dict:
    _, sol = _solve("op2", orth=True, field="gfp", seed=seed)
    return {"pass": sol.dim == 0 and sol.trusted, **sol.to_json()}


def c13_scale(seed: int) -> dict:
    base = build_model("sl3so3")
    big = scaled(base, 2)
    sa, a = _solve(base, orth=True)
    sb, b = _solve(big, orth=True)
    fwd = all(cn.satisfies(sb, cn.scale_map(v, sa.layout, 2)) for v in a.basis)
    images = [cn.scale_map(v, sa.layout, 2) for v in a.basis]
    spans = cn.in_span(b.basis, images)
    return {"pass": a.dim == b.dim == 14 and fwd and spans, "dims": [a.dim, b.dim], "maps_into": fwd, "onto": spans}


CRITERIA = [
    Criterion(1, "sl3so3 prop3 orth: dim 14", 1.0, c1_sl3),
    Criterion(2, "duality sl3so3 / su3so3", 1.0, c2_duality),
    Criterion(3, "explicit sl3so3 solutions have zero residual", 1.0, c3_explicit),
    Criterion(4, "prop3 zero sets", 60.0, c4_zero_sets),
    Criterion(5, "cp(2) orth with Phi free has dim > 0 (golden)", 10.0, c5_cp2),
    Criterion(6, "products: Phi = 0 and block-preserving K", 600.0, c6_products),
    Criterion(7, "lemma3 dimensions", 60.0, c7_lemma3),
    Criterion(8, "gr(4,3): decomposable span equals ker of boundary", 300.0, c8_decomposable),
    Criterion(9, "Spin(9) Xi suite", 300.0, c9_spin9),
    Criterion(10, "curvature invariants over the catalog", 120.0, c10_curvature),
    Criterion(11, "restricted root systems", 120.0, c11_roots),
    Criterion(12, "op2 prop3 orth over GF(p): dim 0", 1800.0, c12_op2, slow=True),
    Criterion(13, "scale invariance on sl3so3", 5.0, c13_scale),
]


def run_criterion(c: Criterion, seed: int = 0) -> dict:
    t = time.perf_counter()
    try:
        details = c.run(seed)
        error = None
    except Exception as e:  # a crash is a failed criterion, reported with its message
        details, error = {"pass": False}, f"{type(e).__name__}: {e}"
    seconds = time.perf_counter() - t
    within = seconds <= c.budget
    out = {
        "id": c.id,
        "title": c.title,
        "pass": bool(details.pop("pass")) and within,
        "seconds": round(seconds, 3),
        "budget_seconds": c.budget,
        "within_budget": within,
        "details": details,
    }
    if error:
        out["error"] = error
    return out


def run_all(seed: int = 0, slow: bool = False, only: list[int] | None = None, on_result=None) -> list[dict]:
    results = []
    for c in CRITERIA:
        if (c.slow and not slow) or (only and c.id not in only):
            continue
        r = run_criterion(c, seed)
        results.append(r)
        if on_result:
            on_result(r)
    return results


def summary_line(r: dict) -> str:
    status = "PASS" if r["pass"] else "FAIL"
    extra = "" if r["within_budget"] else f" (over budget {r['budget_seconds']}s)"
    return f"[{status}] criterion {r['id']:>2}: {r['title']} ({r['seconds']:.2f}s){extra}"
