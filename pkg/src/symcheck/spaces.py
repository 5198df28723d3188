"""Lie triple system models of symmetric spaces with exact structure constants.

A model stores c[i][j][k][l] = <[[e_i, e_j], e_k], e_l> for an orthonormal
basis e_0..e_{n-1}.  Operators act on column vectors, so the matrix of
ad_{[x,y]} has entry [l, k] = <[[x, y], e_k], e_l>.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import product as iproduct

import numpy as np

from . import exact as ex
from .errors import InvalidSpec, SignMismatch
from .fields import FieldSpec, QSqrt, fdiv, field_of, format_scalar, sqrt_of_rational

GRAMMAR = "spec := gr(p,q) | cp(m) | hp(d) | op2 | sl3so3 | su3so3 | g2so4 | prod(spec,spec) | dual(spec)"


@dataclass(frozen=True, eq=False)
class SpaceModel:
    name: str
    n: int
    sign: int
    triple: np.ndarray
    factor_blocks: tuple[tuple[int, ...], ...]
    J: np.ndarray | None = None
    Js: tuple[np.ndarray, ...] | None = None
    closure: bool | None = None
    normalization: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def irreducible(self) -> bool:
        return len(self.factor_blocks) == 1

    @cached_property
    def field(self) -> FieldSpec:
        return field_of(self.triple.flat)

    @cached_property
    def fast_triple(self) -> np.ndarray:
        return ex.fast(self.triple)

    @cached_property
    def sparse(self) -> list:
        """sparse[i][j][k] = tuple of (l, c_ijkl) with c_ijkl != 0."""
        n = self.n
        out = [[[() for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for i, j, k in iproduct(range(n), repeat=3):
            out[i][j][k] = tuple((l, self.triple[i, j, k, l]) for l in range(n) if self.triple[i, j, k, l] != 0)
        return out

    def bracket(self, x, y, z) -> np.ndarray:
        """[[x, y], z] for coordinate vectors."""
        c = self.triple
        t = np.tensordot(np.asarray(x, dtype=object), c, axes=(0, 0))
        t = np.tensordot(np.asarray(y, dtype=object), t, axes=(0, 0))
        return ex.simplify_array(np.tensordot(np.asarray(z, dtype=object), t, axes=(0, 0)))

    def ad(self, x, y) -> np.ndarray:
        """Matrix of ad_{[x,y]} acting on column vectors."""
        t = np.tensordot(np.asarray(x, dtype=object), self.triple, axes=(0, 0))
        t = np.tensordot(np.asarray(y, dtype=object), t, axes=(0, 0))
        return ex.simplify_array(t.T)

    def ad_basis_pair(self, i: int, j: int) -> np.ndarray:
        return ex.simplify_array(self.triple[i, j].T)

    def basis_vector(self, i: int) -> np.ndarray:
        v = ex.zeros(self.n)
        v[i] = 1
        return v

    def block_of(self) -> list[int]:
        out = [0] * self.n
        for b, blk in enumerate(self.factor_blocks):
            for i in blk:
                out[i] = b
        return out

    def __eq__(self, other):
        if not isinstance(other, SpaceModel):
            return NotImplemented
        return self.n == other.n and self.sign == other.sign and bool(np.all(self.triple == other.triple))

    __hash__ = object.__hash__

    def to_json(self) -> dict:
        consts = [
            [int(i), int(j), int(k), int(l), format_scalar(v)]
            for (i, j, k, l), v in np.ndenumerate(self.triple)
            if v != 0
        ]
        return {
            "name": self.name,
            "n": self.n,
            "sign": self.sign,
            "field": str(self.field),
            "factor_blocks": [list(b) for b in self.factor_blocks],
            "normalization": self.normalization,
            "constants": consts,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


# --------------------------------------------------------------------------
# spec grammar


@dataclass(frozen=True)
class SpaceSpec:
    kind: str
    args: tuple = ()

    def __str__(self):
        if self.kind in ("op2", "sl3so3", "su3so3", "g2so4"):
            return self.kind
        return f"{self.kind}({','.join(str(a) for a in self.args)})"


_TOKEN = re.compile(r"\s*([A-Za-z0-9]+|[(),])")


def parse_spec(text: str) -> SpaceSpec:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise InvalidSpec(f"unexpected character at {pos} in {text!r}; {GRAMMAR}")
        tokens.append(m.group(1))
        pos = m.end()
    spec, rest = _parse_term(tokens, 0, text)
    if rest != len(tokens):
        raise InvalidSpec(f"trailing input in {text!r}; {GRAMMAR}")
    return spec


def _expect(tokens, i, tok, text):
    if i >= len(tokens) or tokens[i] != tok:
        raise InvalidSpec(f"expected {tok!r} in {text!r}; {GRAMMAR}")
    return i + 1


def _int_arg(tokens, i, text):
    if i >= len(tokens) or not tokens[i].isdigit():
        raise InvalidSpec(f"expected an integer in {text!r}; {GRAMMAR}")
    return int(tokens[i]), i + 1


def _parse_term(tokens, i, text):
    if i >= len(tokens):
        raise InvalidSpec(f"empty spec; {GRAMMAR}")
    name = tokens[i]
    i += 1
    if name in ("op2", "sl3so3", "su3so3", "g2so4"):
        return SpaceSpec(name), i
    if name in ("gr", "cp", "hp"):
        i = _expect(tokens, i, "(", text)
        a, i = _int_arg(tokens, i, text)
        args = [a]
        if name == "gr":
            i = _expect(tokens, i, ",", text)
            b, i = _int_arg(tokens, i, text)
            args.append(b)
        i = _expect(tokens, i, ")", text)
        spec = SpaceSpec(name, tuple(args))
        _check_ranges(spec, text)
        return spec, i
    if name in ("prod", "dual"):
        i = _expect(tokens, i, "(", text)
        a, i = _parse_term(tokens, i, text)
        args = [a]
        if name == "prod":
            i = _expect(tokens, i, ",", text)
            b, i = _parse_term(tokens, i, text)
            args.append(b)
        i = _expect(tokens, i, ")", text)
        return SpaceSpec(name, tuple(args)), i
    raise InvalidSpec(f"unknown space {name!r}; {GRAMMAR}")


def _check_ranges(spec: SpaceSpec, text: str):
    if spec.kind == "gr":
        p, q = spec.args
        if not p >= q >= 1:
            raise InvalidSpec(f"gr(p,q) needs p >= q >= 1, got {text!r}")
    elif spec.kind == "cp" and spec.args[0] < 2:
        raise InvalidSpec(f"cp(m) needs m >= 2, got {text!r}")
    elif spec.kind == "hp" and spec.args[0] < 2:
        raise InvalidSpec(f"hp(d) needs d >= 2, got {text!r}")


CATALOG = [
    "gr(3,1)",
    "gr(4,1)",
    "gr(5,1)",
    "gr(3,2)",
    "gr(4,2)",
    "gr(4,3)",
    "gr(5,3)",
    "cp(2)",
    "cp(3)",
    "hp(2)",
    "op2",
    "sl3so3",
    "su3so3",
    "g2so4",
]


def build_model(spec) -> SpaceModel:
    """Model for a spec string or parsed SpaceSpec."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    return _build_cached(spec)


_CACHE: dict[SpaceSpec, SpaceModel] = {}


def _build_cached(spec: SpaceSpec) -> SpaceModel:
    if spec not in _CACHE:
        _CACHE[spec] = _build(spec)
    return _CACHE[spec]


def _build(spec: SpaceSpec) -> SpaceModel:
    k = spec.kind
    if k == "gr":
        return grassmannian(*spec.args)
    if k == "cp":
        return complex_projective(spec.args[0])
    if k == "hp":
        return quaternionic_projective(spec.args[0])
    if k == "op2":
        from .spin9 import clifford9, op2_bracket

        return op2_bracket(clifford9())
    if k == "sl3so3":
        return sl3so3()
    if k == "su3so3":
        return replace(dual(sl3so3()), name="su3so3")
    if k == "g2so4":
        return g2so4()
    if k == "prod":
        return product(_build_cached(spec.args[0]), _build_cached(spec.args[1]))
    if k == "dual":
        return dual(_build_cached(spec.args[0]))
    raise InvalidSpec(f"unknown space {k!r}; {GRAMMAR}")


# --------------------------------------------------------------------------
# constructions


def _unit(n: int, i: int) -> np.ndarray:
    v = np.zeros(n, dtype=np.int64)
    v[i] = 1
    return v


def _matrix_model(name, mats, bracket, sign, normalization, check_closure=False) -> SpaceModel:
    """Structure constants from an orthogonal basis of integer matrices.

    The triple bracket is evaluated on the matrices and expanded in the
    basis; the basis is then normalised by the trace norms, which may
    introduce a single square root.
    """
    n = len(mats)
    gram = [int(np.trace(m @ m.T)) for m in mats]
    for i in range(n):
        for j in range(i + 1, n):
            if np.trace(mats[i] @ mats[j].T) != 0:
                raise InvalidSpec(f"{name}: basis matrices are not orthogonal")
    raw = ex.zeros((n, n, n, n))
    closure = True
    for i in range(n):
        for j in range(n):
            for k in range(n):
                Z = bracket(mats[i], mats[j], mats[k])
                approx = np.zeros_like(Z, dtype=object)
                for l in range(n):
                    raw[i, j, k, l] = int(np.trace(Z @ mats[l].T))
                    approx = approx + mats[l].astype(object) * fdiv(raw[i, j, k, l], gram[l])
                if check_closure and not ex.is_zero(ex.simplify_array(approx - Z.astype(object))):
                    closure = False
    triple = ex.zeros((n, n, n, n))
    for idx, v in np.ndenumerate(raw):
        if v != 0:
            i, j, k, l = idx
            triple[idx] = ex.simplify(fdiv(v, sqrt_of_rational(gram[i] * gram[j] * gram[k] * gram[l])))
    field_of(triple.flat)  # single extension guard
    return SpaceModel(
        name=name,
        n=n,
        sign=sign,
        triple=triple,
        factor_blocks=(tuple(range(n)),),
        closure=closure if check_closure else None,
        normalization=normalization,
        extra={"gram": gram},
    )


def _gr_bracket(X, Y, Z):
    return Y @ X.T @ Z - X @ Y.T @ Z + Z @ X.T @ Y - Z @ Y.T @ X


def _comm3(X, Y, Z):
    U = X @ Y - Y @ X
    return U @ Z - Z @ U


def grassmannian(p: int, q: int) -> SpaceModel:
    """Real Grassmannian SO(p+q)/SO(p)xSO(q) on p x q matrices, basis E_{a alpha}."""
    mats = []
    for a in range(p):
        for al in range(q):
            E = np.zeros((p, q), dtype=np.int64)
            E[a, al] = 1
            mats.append(E)
    return _matrix_model(f"gr({p},{q})", mats, _gr_bracket, +1, "E_{a alpha}, Tr(XY^t)")


def _bivector_model(name, n, terms, sign, normalization, **kw) -> SpaceModel:
    """Model from ad_{[x,y]} given as a function of basis indices returning an n x n matrix."""
    triple = ex.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            A = terms(i, j)
            for k in range(n):
                for l in range(n):
                    triple[i, j, k, l] = int(A[l, k])
    return SpaceModel(name=name, n=n, sign=sign, triple=triple, factor_blocks=(tuple(range(n)),), normalization=normalization, **kw)


def _wedge_int(x, y):
    return np.outer(y, x) - np.outer(x, y)


def complex_structure(m: int) -> np.ndarray:
    J = np.zeros((2 * m, 2 * m), dtype=np.int64)
    for a in range(m):
        J[2 * a + 1, 2 * a] = 1
        J[2 * a, 2 * a + 1] = -1
    return J


def quaternionic_structure(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Left multiplication by i, j, k on H^d with real basis (1, i, j, k) per block."""
    # images of basis (1, i, j, k) under left multiplication
    table = {
        "i": [(1, 1), (0, -1), (3, 1), (2, -1)],
        "j": [(2, 1), (3, -1), (0, -1), (1, 1)],
        "k": [(3, 1), (2, 1), (1, -1), (0, -1)],
    }
    out = []
    for key in "ijk":
        J = np.zeros((4 * d, 4 * d), dtype=np.int64)
        for b in range(d):
            for src, (dst, sgn) in enumerate(table[key]):
                J[4 * b + dst, 4 * b + src] = sgn
        out.append(J)
    return tuple(out)


def complex_projective(m: int) -> SpaceModel:
    n = 2 * m
    J = complex_structure(m)

    def terms(i, j):
        x, y = _unit(n, i), _unit(n, j)
        return _wedge_int(x, y) + 2 * int((J @ x) @ y) * J + _wedge_int(J @ x, J @ y)

    return _bivector_model(
        f"cp({m})", n, terms, +1, "X^Y + 2<JX,Y>J + JX^JY, Euclidean basis", J=ex.obj(J)
    )


def quaternionic_projective(d: int) -> SpaceModel:
    n = 4 * d
    Js = quaternionic_structure(d)

    def terms(i, j):
        x, y = _unit(n, i), _unit(n, j)
        out = _wedge_int(x, y)
        for J in Js:
            out = out + 2 * int((J @ x) @ y) * J + _wedge_int(J @ x, J @ y)
        return out

    return _bivector_model(
        f"hp({d})",
        n,
        terms,
        +1,
        "X^Y + sum_i (2<J_iX,Y>J_i + J_iX^J_iY), Euclidean basis",
        Js=tuple(ex.obj(J) for J in Js),
    )


def _sl3_basis():
    def E(a, b):
        M = np.zeros((3, 3), dtype=np.int64)
        M[a, b] = 1
        return M

    return [
        E(0, 1) + E(1, 0),
        E(0, 2) + E(2, 0),
        E(1, 2) + E(2, 1),
        E(0, 0) - E(1, 1),
        E(0, 0) + E(1, 1) - 2 * E(2, 2),
    ]


def sl3so3() -> SpaceModel:
    """SL(3)/SO(3): symmetric traceless 3x3 matrices, bracket from matrix commutators."""
    return _matrix_model("sl3so3", _sl3_basis(), _comm3, -1, "symmetric traceless, Tr(XY^t)")


def _G(i, j):
    M = np.zeros((7, 7), dtype=np.int64)
    M[i - 1, j - 1] = 1
    M[j - 1, i - 1] = -1
    return M


def g2_basis() -> list[np.ndarray]:
    """T_1..T_8 inside so(7) spanning g_1 + g_2 + g_5 + g_7."""
    G = _G
    return [
        G(2, 6) + G(4, 5) - 2 * G(1, 3),
        G(4, 7) + G(2, 3),
        G(3, 5) + G(6, 7) + 2 * G(1, 4),
        G(2, 6) - G(4, 5),
        G(4, 7) - G(2, 3) - 2 * G(1, 6),
        G(3, 5) - G(6, 7),
        G(2, 4) + G(3, 7) - 2 * G(5, 6),
        G(2, 4) - G(3, 7),
    ]


def g2_subspace(i: int) -> list[np.ndarray]:
    """Basis of g_i = {e1 G_{i+1,i+3} + e2 G_{i+2,i+6} + e3 G_{i+4,i+5} : e1+e2+e3 = 0}."""

    def w(k):
        return (i + k - 1) % 7 + 1

    a, b, c = _G(w(1), w(3)), _G(w(2), w(6)), _G(w(4), w(5))
    return [a - c, b - c]


def g2so4() -> SpaceModel:
    return _matrix_model(
        "g2so4", g2_basis(), _comm3, +1, "T_i/|T_i| in so(7), Tr(XY^t)", check_closure=True
    )


def product(a: SpaceModel, b: SpaceModel) -> SpaceModel:
    if a.sign != b.sign:
        raise SignMismatch(f"cannot take product of {a.name} (sign {a.sign}) and {b.name} (sign {b.sign})")
    n = a.n + b.n
    triple = ex.zeros((n, n, n, n))
    triple[: a.n, : a.n, : a.n, : a.n] = a.triple
    triple[a.n :, a.n :, a.n :, a.n :] = b.triple
    blocks = a.factor_blocks + tuple(tuple(i + a.n for i in blk) for blk in b.factor_blocks)
    return SpaceModel(
        name=f"prod({a.name},{b.name})",
        n=n,
        sign=a.sign,
        triple=triple,
        factor_blocks=blocks,
        normalization=f"{a.normalization} | {b.normalization}",
    )


def dual(s: SpaceModel) -> SpaceModel:
    """Same vector space with all brackets negated."""
    return SpaceModel(
        name=f"dual({s.name})",
        n=s.n,
        sign=-s.sign,
        triple=ex.simplify_array(-s.triple),
        factor_blocks=s.factor_blocks,
        J=s.J,
        Js=s.Js,
        closure=s.closure,
        normalization=s.normalization,
    )


def scaled(s: SpaceModel, t) -> SpaceModel:
    """Triple bracket multiplied by a positive scalar t."""
    return replace(s, name=f"{s.name}*{t}", triple=ex.scale(s.triple, t), extra={**s.extra, "scale": str(t)})


def perturbed(s: SpaceModel, idx: tuple[int, int, int, int], delta=1) -> SpaceModel:
    """Copy of s with one structure constant shifted (for negative tests)."""
    triple = s.triple.copy()
    triple[idx] = ex.simplify(triple[idx] + delta)
    return replace(s, name=f"{s.name}~", triple=triple)


# --------------------------------------------------------------------------
# validation


def _check(name, arr) -> dict:
    w = ex.first_nonzero(arr)
    entry = {"name": name, "pass": w is None}
    if w is not None:
        entry["witness"] = list(w)
    return entry


def derivation_defect(c: np.ndarray, a: int, d: np.ndarray | None = None) -> np.ndarray:
    """Defect of ad_{[e_a, e_b]} (all b) being derivations, indexed [b, u, v, k, m].

    With a second array d the expression is the bilinear form with the
    derivation taken from d and the bracket from c.
    """
    d = c if d is None else d
    # row convention: A_ab[k, l] = c[a, b, k, l]; "first A_uv then A_ab" is A_uv @ A_ab
    da = d[a]
    lhs = np.einsum("uvkl,blm->buvkm", c, da) - np.einsum("bkl,uvlm->buvkm", da, c)
    # D e_u = sum_x d[a, b, u, x] e_x
    rhs = np.einsum("bux,xvkm->buvkm", da, c) + np.einsum("bvx,uxkm->buvkm", da, c)
    return lhs - rhs


def _derivation_witness(model: SpaceModel):
    comps = ex.int_components(model.triple)
    n = model.n
    for a in range(n):
        if comps is None:
            w = ex.first_nonzero(_derivation_defect_obj(model.triple, a))
        else:
            A, B, _, sq = comps
            rational = derivation_defect(A, a)
            irrational = None
            if sq is not None:
                rational = rational + sq * derivation_defect(B, a)
                irrational = derivation_defect(A, a, B) + derivation_defect(B, a, A)
            w = ex.first_nonzero(rational)
            if w is None and irrational is not None:
                w = ex.first_nonzero(irrational)
        if w is not None:
            return [a, *w]
    return None


def validate(model: SpaceModel) -> list[dict]:
    """Check the Lie triple system axioms; one entry per axiom."""
    c = model.fast_triple
    checks = [
        _check("antisymmetry", c + c.transpose(1, 0, 2, 3)),
        _check("skewness", c + c.transpose(0, 1, 3, 2)),
        _check("first_bianchi", c + c.transpose(1, 2, 0, 3) + c.transpose(2, 0, 1, 3)),
        _check("pair_symmetry", c - c.transpose(2, 3, 0, 1)),
    ]
    w = _derivation_witness(model)
    der = {"name": "derivation", "pass": w is None, **({"witness": w} if w else {})}
    checks.append(der)
    blk = model.block_of()
    bad = None
    for idx, v in np.ndenumerate(model.triple):
        if v != 0 and len({blk[t] for t in idx}) > 1:
            bad = [int(t) for t in idx]
            break
    checks.append({"name": "cross_block_zero", "pass": bad is None, **({"witness": bad} if bad else {})})
    if model.closure is not None:
        checks.append({"name": "ambient_closure", "pass": bool(model.closure)})
    if model.J is not None:
        checks.extend(_complex_checks(model))
    if model.Js is not None:
        checks.extend(_quaternionic_checks(model))
    return checks


def _derivation_defect_obj(c, a):
    n = c.shape[0]
    ca = c[a]
    out = ex.zeros((n, n, n, n, n))
    for b in range(n):
        A = ca[b]
        for u in range(n):
            for v in range(n):
                lhs = c[u, v] @ A - A @ c[u, v]
                rhs = np.tensordot(A[u], c[:, v], axes=(0, 0)) + np.tensordot(A[v], c[u], axes=(0, 0))
                out[b, u, v] = lhs - rhs
    return out


def _is_orthogonal_skew_complex(J) -> bool:
    n = J.shape[0]
    I = ex.eye(n)
    return ex.is_zero(J + J.T) and ex.is_zero(J @ J + I) and ex.is_zero(J @ J.T - I)


def _complex_checks(model):
    J = model.J
    ok = _is_orthogonal_skew_complex(J)
    commute = all(ex.is_zero(ex.commutator(model.ad_basis_pair(i, j), J)) for i in range(model.n) for j in range(model.n))
    return [{"name": "complex_structure", "pass": ok}, {"name": "bracket_commutes_with_J", "pass": commute}]


def _quaternionic_checks(model):
    J1, J2, J3 = model.Js
    ok = all(_is_orthogonal_skew_complex(J) for J in model.Js) and ex.is_zero(J1 @ J2 - J3)
    span_ok = True
    basis = [ex.skew_coords(J) for J in model.Js]
    from .linalg import span_rank

    for i in range(model.n):
        for j in range(i + 1, model.n):
            A = model.ad_basis_pair(i, j)
            for J in model.Js:
                C = ex.commutator(A, J)
                if span_rank(basis + [ex.skew_coords(C)]) != 3:
                    span_ok = False
    return [
        {"name": "quaternionic_structure", "pass": ok},
        {"name": "bracket_preserves_quaternionic_span", "pass": span_ok},
    ]


def constant_curvature_kappa(model: SpaceModel):
    """kappa with [[x,y],z] = kappa (x^y) z for all basis vectors, or None."""
    n = model.n
    kappa = None
    for i, j, k, l in iproduct(range(n), repeat=4):
        w = (1 if (i == k and j == l) else 0) - (1 if (j == k and i == l) else 0)
        v = model.triple[i, j, k, l]
        if w == 0:
            if v != 0:
                return None
            continue
        r = ex.simplify(fdiv(v, w))
        if kappa is None:
            kappa = r
        elif r != kappa:
            return None
    return kappa


__all__ = [
    "SpaceModel",
    "SpaceSpec",
    "parse_spec",
    "build_model",
    "product",
    "dual",
    "scaled",
    "perturbed",
    "validate",
    "grassmannian",
    "complex_projective",
    "quaternionic_projective",
    "sl3so3",
    "g2so4",
    "g2_basis",
    "g2_subspace",
    "constant_curvature_kappa",
    "CATALOG",
    "GRAMMAR",
    "QSqrt",
]
