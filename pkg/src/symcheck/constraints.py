"""Linear systems for the pair (K, Phi) and related cochain computations.

Unknowns are stacked as
  K:   <K_{e_i} e_j, e_k>      for all i and j < k,   index i*P + pair(j, k)
  Phi: <Phi(e_i, e_j), e_k>    for i < j and all k,   index n*P + pair(i, j)*n + k
with P = n(n-1)/2.  Rows carry labels such as "curv[i,j,k|l,m]".
"""

from __future__ import annotations

import itertools
import re
from collections import defaultdict
from collections.abc import Iterator
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact as ex
from . import linalg, modp
from .curvature import schouten
from .errors import NotIrreducible
from .fields import QQ, FieldSpec, fdiv, field_of, join_fields, random_primes, sqrt_modp, to_modp
from .linalg import SparseMatrix
from .spaces import SpaceModel, _sl3_basis

# --------------------------------------------------------------------------
# unknown layout


class Layout:
    def __init__(self, n: int):
        self.n = n
        self.P = n * (n - 1) // 2
        self.pidx = ex.pair_index(n)
        self.nk = n * self.P
        self.size = 2 * n * self.P

    def k_index(self, i: int, j: int, k: int) -> int:
        return i * self.P + self.pidx[(j, k)]

    def phi_index(self, i: int, j: int, k: int) -> int:
        return self.nk + self.pidx[(i, j)] * self.n + k

    @property
    def phi_block(self) -> range:
        return range(self.nk, self.size)

    def add_k(self, row, coef, c, x, w):
        """row += coef * <K_{e_c} e_x, e_w>."""
        if x < w:
            row[c * self.P + self.pidx[(x, w)]] += coef
        elif x > w:
            row[c * self.P + self.pidx[(w, x)]] -= coef

    def add_phi(self, row, coef, a, b, u):
        """row += coef * <Phi(e_a, e_b), e_u>."""
        if a < b:
            row[self.nk + self.pidx[(a, b)] * self.n + u] += coef
        elif a > b:
            row[self.nk + self.pidx[(b, a)] * self.n + u] -= coef

    def stack(self, K, Phi) -> list:
        """K[i][j][k] = <K_{e_i} e_j, e_k>, Phi[i][j][k] = <Phi(e_i, e_j), e_k>."""
        v = [0] * self.size
        for i in range(self.n):
            for (j, k), t in self.pidx.items():
                v[i * self.P + t] = ex.simplify(K[i][j][k])
        for (i, j), t in self.pidx.items():
            for k in range(self.n):
                v[self.nk + t * self.n + k] = ex.simplify(Phi[i][j][k])
        return v

    def unstack(self, v):
        n = self.n
        K = ex.zeros((n, n, n))
        Phi = ex.zeros((n, n, n))
        for i in range(n):
            for (j, k), t in self.pidx.items():
                x = v[i * self.P + t]
                K[i, j, k], K[i, k, j] = x, -x
        for (i, j), t in self.pidx.items():
            for k in range(n):
                x = v[self.nk + t * n + k]
                Phi[i, j, k], Phi[j, i, k] = x, -x
        return K, Phi

    def k_operator(self, v, i: int) -> np.ndarray:
        """Matrix (column convention) of K_{e_i} from a stacked vector."""
        return ex.skew_from_coords(v[i * self.P : (i + 1) * self.P], self.n)


def _clean(row: dict) -> dict:
    return {c: ex.simplify(v) for c, v in row.items() if v != 0}


# --------------------------------------------------------------------------
# ad(h)


def curvature_operator_coords(model: SpaceModel) -> list[list]:
    """Coordinates of ad_{[e_i, e_j]} in so(m) for every pair i < j."""
    c = model.triple
    return [ex.skew_coords(c[i, j].T) for i, j in ex.pairs(model.n)]


def adh_basis(model: SpaceModel) -> list[list]:
    """Independent subset of the curvature operators, as so(m) coordinate vectors."""
    ops = curvature_operator_coords(model)
    return [ops[t] for t in linalg.independent_subset(ops)]


def adh_complement(model: SpaceModel) -> list[list]:
    """Basis of the orthogonal complement of ad(h) under the coordinate dot product."""
    B = adh_basis(model)
    P = model.n * (model.n - 1) // 2
    if not B:
        return [[1 if a == b else 0 for b in range(P)] for a in range(P)]
    return linalg.nullspace(SparseMatrix.from_dense(B, P), field_of(x for v in B for x in v))


# --------------------------------------------------------------------------
# assembly


@dataclass(frozen=True)
class LinearSystem:
    model: SpaceModel
    kind: str
    orth: bool
    phi_zero: bool
    matrix: SparseMatrix

    @property
    def layout(self) -> Layout:
        return Layout(self.model.n)

    @property
    def unknowns(self) -> int:
        return self.matrix.ncols

    @property
    def rows(self) -> int:
        return self.matrix.nrows


def _psi_adder(layout: Layout, rho):
    """Callable adding coef * <Psi(e_a, e_b), e_u> with Psi = Phi + [rho,K_a]e_b - [rho,K_b]e_a."""
    if rho is None:
        return layout.add_phi
    n = layout.n
    nz = [[(w, rho[u, w]) for w in range(n) if rho[u, w] != 0] for u in range(n)]
    nzc = [[(w, rho[w, b]) for w in range(n) if rho[w, b] != 0] for b in range(n)]

    def comm(row, coef, a, b, u):
        # <[rho, K_a] e_b, e_u> = sum_w rho_uw <K_a e_b, e_w> - sum_w rho_wb <K_a e_w, e_u>
        for w, r in nz[u]:
            layout.add_k(row, coef * r, a, b, w)
        for w, r in nzc[b]:
            layout.add_k(row, -coef * r, a, w, u)

    def add(row, coef, a, b, u):
        layout.add_phi(row, coef, a, b, u)
        comm(row, coef, a, b, u)
        comm(row, -coef, b, a, u)

    return add


def _curvature_row(model: SpaceModel, layout: Layout, psi, i, j, k, l, m) -> dict:
    S = model.sparse
    row: dict = defaultdict(int)
    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
        for w, v in S[a][b][m]:
            layout.add_k(row, -v, c, l, w)
        for w, v in S[a][b][l]:
            layout.add_k(row, v, c, m, w)
        for w, v in S[m][l][b]:
            layout.add_k(row, v, c, a, w)
        for w, v in S[m][l][a]:
            layout.add_k(row, -v, c, b, w)
        if c == m:
            psi(row, 1, a, b, l)
        if c == l:
            psi(row, -1, a, b, m)
    return _clean(row)


def _cyclic_row(layout: Layout, psi, i, j, k) -> dict:
    row: dict = defaultdict(int)
    psi(row, 1, i, j, k)
    psi(row, 1, j, k, i)
    psi(row, 1, k, i, j)
    return _clean(row)


def iter_rows(model: SpaceModel, kind: str = "prop3", orth: bool = False, phi_zero: bool = False) -> Iterator[tuple[str, dict]]:
    """Labelled rows of the system, before duplicate removal."""
    n = model.n
    layout = Layout(n)
    if kind == "prop3":
        psi = layout.add_phi
        names = ("curv", "cyclic")
    elif kind == "prop1":
        psi = _psi_adder(layout, schouten(model).rho if n >= 4 else None)
        names = ("bianchi", "cyclic_psi")
    else:
        raise ValueError(f"unknown system {kind!r}")
    triples = list(itertools.combinations(range(n), 3))
    for i, j, k in triples:
        for l, m in ex.pairs(n):
            yield f"{names[0]}[{i},{j},{k}|{l},{m}]", _curvature_row(model, layout, psi, i, j, k, l, m)
    for i, j, k in triples:
        yield f"{names[1]}[{i},{j},{k}]", _cyclic_row(layout, psi, i, j, k)
    if orth:
        for b, u in enumerate(adh_basis(model)):
            for i in range(n):
                yield f"orth14[{i}|{b}]", {i * layout.P + t: x for t, x in enumerate(u) if x != 0}
    if phi_zero:
        for (i, j), t in layout.pidx.items():
            for k in range(n):
                yield f"phi0[{i},{j},{k}]", {layout.phi_index(i, j, k): 1}


def _dedupe(rows: Iterator[tuple[str, dict]]):
    seen = set()
    labels, kept = [], []
    for label, row in rows:
        if not row:
            continue
        key = tuple(sorted(row.items()))
        neg = tuple((c, -v) for c, v in key)
        if key in seen or neg in seen:
            continue
        seen.add(key)
        labels.append(label)
        kept.append(row)
    return labels, kept


def _col_labels(layout: Layout) -> list[str]:
    out = [""] * layout.size
    for i in range(layout.n):
        for (j, k), t in layout.pidx.items():
            out[i * layout.P + t] = f"K[{i}][{j},{k}]"
    for (i, j), t in layout.pidx.items():
        for k in range(layout.n):
            out[layout.nk + t * layout.n + k] = f"Phi[{i},{j}][{k}]"
    return out


def _assemble(model, kind, orth, phi_zero) -> LinearSystem:
    layout = Layout(model.n)
    labels, rows = _dedupe(iter_rows(model, kind, orth, phi_zero))
    M = SparseMatrix.from_dicts(layout.size, rows, labels, _col_labels(layout))
    return LinearSystem(model, kind, orth, phi_zero, M)


def assemble_prop3(model: SpaceModel, orth14: bool = False, phi_zero: bool = False) -> LinearSystem:
    if not model.irreducible:
        raise NotIrreducible(f"{model.name} is reducible; use the prop1 system")
    return _assemble(model, "prop3", orth14, phi_zero)


def assemble_prop1(model: SpaceModel, orth14: bool = False, phi_zero: bool = False) -> LinearSystem:
    return _assemble(model, "prop1", orth14, phi_zero)


_LABEL = re.compile(r"^(curv|bianchi|cyclic|cyclic_psi|orth14|phi0)\[([0-9,|]+)\]$")


def assemble_row(model: SpaceModel, label: str) -> dict:
    """Rebuild the single row named by a provenance label."""
    m = _LABEL.match(label)
    if not m:
        raise ValueError(f"bad row label {label!r}")
    name, body = m.groups()
    nums = [int(x) for x in re.split(r"[,|]", body)]
    layout = Layout(model.n)
    if name in ("curv", "cyclic"):
        psi = layout.add_phi
    elif name in ("bianchi", "cyclic_psi"):
        psi = _psi_adder(layout, schouten(model).rho if model.n >= 4 else None)
    if name in ("curv", "bianchi"):
        return _curvature_row(model, layout, psi, *nums)
    if name in ("cyclic", "cyclic_psi"):
        return _cyclic_row(layout, psi, *nums)
    if name == "orth14":
        i, b = nums
        u = adh_basis(model)[b]
        return {i * layout.P + t: x for t, x in enumerate(u) if x != 0}
    return {layout.phi_index(*nums): 1}


# --------------------------------------------------------------------------
# solving


@dataclass
class SolutionSpace:
    dim: int
    basis: list
    phi_block_rank: int
    k_adh_complement_rank: int
    field: str
    certified: bool
    trusted: bool = True
    k_cross_block_rank: int | None = None
    primes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "phi_block_rank": self.phi_block_rank,
            "k_adh_complement_rank": self.k_adh_complement_rank,
            "k_cross_block_rank": self.k_cross_block_rank,
            "field": self.field,
            "certified": self.certified,
            "trusted": self.trusted,
            **({"primes": self.primes} if self.primes else {}),
        }


def _cross_block_columns(model: SpaceModel, layout: Layout) -> list[int]:
    blk = model.block_of()
    return [
        i * layout.P + t for i in range(layout.n) for (j, k), t in layout.pidx.items() if blk[j] != blk[k]
    ]


def _complement_projection(basis, model: SpaceModel, layout: Layout) -> list[list]:
    """Per solution: <K_{e_i}, c> for every i and every c spanning ad(h)^perp."""
    comp = adh_complement(model)
    out = []
    for v in basis:
        row = []
        for i in range(layout.n):
            blk = v[i * layout.P : (i + 1) * layout.P]
            row += [ex.dot(blk, c) for c in comp]
        out.append(row)
    return out


def _modp_rank(vectors, p) -> int:
    if not len(vectors):
        return 0
    A = np.array(vectors, dtype=np.int64) % p
    return len(modp.echelon(A, p)[1])


def rational_reconstruct(a: int, p: int):
    """Fraction r/s with r = a s mod p and |r|, |s| below sqrt(p/2), or None."""
    a %= p
    bound = int((p // 2) ** 0.5)
    r0, r1, s0, s1 = p, a, 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1, s0, s1 = r1, r0 - q * r1, s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    return Fraction(r1, s1)


def _lift_basis(system: LinearSystem, K: np.ndarray, p: int):
    """Rational lifts of a mod-p kernel basis that annihilate the system exactly, or None."""
    out = []
    for row in K:
        v = []
        for x in row:
            y = rational_reconstruct(int(x), p)
            if y is None:
                return None
            v.append(ex.simplify(y))
        out.append(v)
    M = system.matrix
    if all(not any(x != 0 for x in M.apply(v)) for v in out):
        return out
    return None


def solve_constraints(
    system: LinearSystem, f: FieldSpec | str = "qq", seed: int = 0, certify: bool = False, prime: int | None = None
) -> SolutionSpace:
    """Nullspace of an assembled system over QQ (promoted to QQ(sqrt d) if needed) or GF(p)."""
    M = system.matrix
    model = system.model
    layout = system.layout
    mf = join_fields(QQ, model.field)
    if isinstance(f, str):
        if f == "gfp":
            return _solve_modp(system, prime, seed, certify, _cross(model, layout))
        f = QQ if f == "qq" else FieldSpec.parse(f)
    if f.kind == "GF":
        return _solve_modp(system, f.p, seed, certify, _cross(model, layout))
    cross = _cross(model, layout)
    f = join_fields(f, mf)
    basis = linalg.nullspace(M, f)
    phi_rank = linalg.block_projection_rank(basis, layout.phi_block, f) if basis else 0
    comp_rank = linalg.span_rank(_complement_projection(basis, model, layout), f) if basis else 0
    cross_rank = None
    if cross is not None:
        cross_rank = linalg.block_projection_rank(basis, cross, f) if basis and cross else 0
    return SolutionSpace(len(basis), basis, phi_rank, comp_rank, str(f), True, True, cross_rank)


def _cross(model: SpaceModel, layout: Layout):
    return None if model.irreducible else _cross_block_columns(model, layout)


def _solve_modp(system, prime, seed, certify, cross) -> SolutionSpace:
    M = system.matrix
    model = system.model
    layout = system.layout
    d = model.field.d if model.field.kind == "QQ_SQRT" else None
    primes = [prime] if prime else []
    for q in random_primes(4, seed=seed, d=d):
        if len(primes) == 2:
            break
        if q not in primes:
            primes.append(q)
    results = []
    for p in primes:
        s = sqrt_modp(d, p) if d is not None else None
        rows = linalg._residue_rows(M, p, s)
        results.append(linalg.modp_solve(rows, M.ncols, p, seed=seed))
    dims = [M.ncols - r.rank for r in results]
    trusted = len(set(dims)) == 1
    res = results[0]
    p = res.p
    kernel = res.kernel
    # rank mod p never exceeds the rank over the base field, so full rank is a certificate
    certified = dims[0] == 0
    basis = [[int(x) for x in row] for row in kernel]
    if certify and not certified:
        lifted = _lift_basis(system, kernel, p) if d is None else None
        if lifted is None:
            exact = solve_constraints(system, "qq")
            return SolutionSpace(
                exact.dim, exact.basis, exact.phi_block_rank, exact.k_adh_complement_rank,
                exact.field, True, trusted, exact.k_cross_block_rank, primes,
            )
        basis, certified = lifted, True
    field_name = f"GF({p})"
    if not basis:
        return SolutionSpace(0, [], 0, 0, field_name, certified, trusted, 0 if cross is not None else None, primes)
    s = sqrt_modp(d, p) if d is not None else None
    B = np.array([[to_modp(x, p, s) for x in v] for v in basis], dtype=np.int64)
    phi_rank = _modp_rank(B[:, layout.nk :], p)
    comp = np.array([[to_modp(x, p, s) for x in c] for c in adh_complement(model)], dtype=np.int64)
    proj = np.concatenate(
        [modp.matmul_mod(B[:, i * layout.P : (i + 1) * layout.P], comp.T, p) for i in range(layout.n)], axis=1
    ) if len(comp) else np.zeros((len(B), 0), dtype=np.int64)
    comp_rank = _modp_rank(proj, p) if proj.shape[1] else 0
    cross_rank = _modp_rank(B[:, cross], p) if cross else (0 if cross is not None else None)
    return SolutionSpace(len(basis), basis, phi_rank, comp_rank, field_name, certified, trusted, cross_rank, primes)


def residual(model: SpaceModel, v, kind: str = "prop3", orth: bool = False) -> dict:
    """Exact evaluation of every row at a stacked (K, Phi) vector."""
    bad = []
    worst = 0
    for label, row in iter_rows(model, kind, orth):
        val = ex.simplify(sum((x * v[c] for c, x in row.items()), 0))
        if val != 0:
            bad.append(label)
            if abs(val) > abs(worst):
                worst = val
    return {"zero": not bad, "max_abs": abs(worst), "nonzero_rows": bad[:5], "nonzero_count": len(bad)}


def satisfies(system: LinearSystem, v) -> bool:
    """Whether v solves every row of an assembled system exactly."""
    return not any(ex.simplify(x) != 0 for x in system.matrix.apply(v))


def dual_map(v, layout: Layout) -> list:
    """(K, Phi) -> (K, -Phi)."""
    return [x if c < layout.nk else ex.simplify(-x) for c, x in enumerate(v)]


def scale_map(v, layout: Layout, t) -> list:
    """(K, Phi) -> (K, t Phi)."""
    return [x if c < layout.nk else ex.simplify(t * x) for c, x in enumerate(v)]


def in_span(vectors, basis, f: FieldSpec | None = None) -> bool:
    """Whether every vector lies in span(basis)."""
    if not vectors:
        return True
    if f is None:
        f = join_fields(field_of(x for v in vectors for x in v), field_of(x for v in basis for x in v))
    return linalg.span_rank(list(basis) + list(vectors), f) == linalg.span_rank(list(basis), f) if basis else all(
        all(x == 0 for x in v) for v in vectors
    )


# --------------------------------------------------------------------------
# explicit families


def adh_valued_family(model: SpaceModel) -> list[list]:
    """(K, 0) with K_{e_i} running over ad(h): one vector per (i, basis element)."""
    layout = Layout(model.n)
    out = []
    for u in adh_basis(model):
        for i in range(model.n):
            v = [0] * layout.size
            v[i * layout.P : (i + 1) * layout.P] = u
            out.append(v)
    return out


def _so3_basis():
    out = []
    for a, b in ((0, 1), (0, 2), (1, 2)):
        L = np.zeros((3, 3), dtype=np.int64)
        L[a, b], L[b, a] = 1, -1
        out.append(L)
    return out


def sl3_trace_family(dual: bool = False) -> list[list]:
    """Three solutions for SL(3)/SO(3), one per L in a basis of so(3).

    <K_X Y, Z> = Tr((X[Z,Y]/5 - ZXY)L) and <Phi(Y,Z), X> = Tr((X[Z,Y] + 2ZXY)L)
    on the orthonormal basis f_i/|f_i|.  The normalisation 1/|f_i||f_j||f_k|
    always contains a factor 1/(2 sqrt 2); it is dropped from the whole vector,
    which keeps the entries in QQ(sqrt 3) without leaving the solution space.
    """
    from .fields import sqrt_of_rational

    f = _sl3_basis()
    gram = [int(np.trace(m @ m.T)) for m in f]
    n = 5
    layout = Layout(n)
    out = []
    for L in _so3_basis():
        K = ex.zeros((n, n, n))
        Phi = ex.zeros((n, n, n))
        for i, j, k in itertools.product(range(n), repeat=3):
            X, Y, Z = f[i], f[j], f[k]
            g = Fraction(gram[i] * gram[j] * gram[k], 8)
            norm = sqrt_of_rational(g)
            kv = Fraction(int(np.trace((X @ (Z @ Y - Y @ Z)) @ L)), 5) - int(np.trace(Z @ X @ Y @ L))
            pv = int(np.trace((X @ (Z @ Y - Y @ Z) + 2 * Z @ X @ Y) @ L))
            K[i, j, k] = ex.simplify(fdiv(kv, norm))
            # Phi(e_j, e_k) paired with e_i
            Phi[j, k, i] = ex.simplify(fdiv(-pv if dual else pv, norm))
        out.append(layout.stack(K, Phi))
    return out


def sl3_highest_weight(dual: bool = False) -> list:
    """The displayed element: K_{e_1}, K_{e_4} as given, other K zero, Phi(Y,Z).X = 3/2 <K_X Y, Z>."""
    n = 5
    K1 = [[0, 0, -1, 0, 0], [0, 0, 0, -1, 0], [1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 0, 0, 0]]
    K4 = [[0, 1, 0, 0, 0], [-1, 0, 0, 0, 0], [0, 0, 0, -1, 0], [0, 0, 1, 0, 0], [0, 0, 0, 0, 0]]
    K = ex.zeros((n, n, n))
    for i, mat in ((0, K1), (3, K4)):
        for j in range(n):
            for k in range(n):
                # column convention: <K e_j, e_k> = mat[k][j]
                K[i, j, k] = mat[k][j]
    Phi = ex.zeros((n, n, n))
    t = Fraction(-3, 2) if dual else Fraction(3, 2)
    for i, j, k in itertools.product(range(n), repeat=3):
        Phi[j, k, i] = ex.simplify(t * K[i, j, k])
    return Layout(n).stack(K, Phi)


# --------------------------------------------------------------------------
# alternating-form system for A: m -> h


def _adh_coordinates(model: SpaceModel, basis: list[list]) -> list[list]:
    """Coordinates of each curvature operator ad_{[e_i,e_j]} in the given ad(h) basis."""
    ops = curvature_operator_coords(model)
    B = SparseMatrix.from_dense([list(col) for col in zip(*basis)], len(basis))
    return [linalg.solve_particular(B, op) for op in ops]


def lemma3_system(model: SpaceModel) -> tuple[SparseMatrix, list[list]]:
    """Rows sigma <[X,Y], A Z> = 0 for A(e_i) = sum_b a_ib U_b; columns i*dim + b."""
    n = model.n
    U = [ex.skew_from_coords(u, n) for u in adh_basis(model)]
    h = len(U)
    rows, labels = [], []
    for i, j, k in itertools.combinations(range(n), 3):
        row: dict = defaultdict(int)
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            # <[e_a, e_b], U> := <ad_U e_a, e_b> = U[b, a]
            for t in range(h):
                row[c * h + t] += U[t][b, a]
        rows.append(_clean(row))
        labels.append(f"alt[{i},{j},{k}]")
    return SparseMatrix.from_dicts(n * h, rows, labels), U


def lemma3_solve(model: SpaceModel) -> dict:
    n = model.n
    M, U = lemma3_system(model)
    h = len(U)
    f = join_fields(QQ, model.field)
    basis = linalg.nullspace(M, f)
    coords = _adh_coordinates(model, adh_basis(model))
    pidx = ex.pair_index(n)
    family = []
    for T in range(n):
        # A = ad_{e_T}: A(e_i) = [e_T, e_i], whose operator is ad_{[e_T, e_i]}
        v = [0] * (n * h)
        for i in range(n):
            if i == T:
                continue
            sgn, key = (1, (T, i)) if T < i else (-1, (i, T))
            for t, x in enumerate(coords[pidx[key]]):
                v[i * h + t] = ex.simplify(sgn * x)
        family.append(v)
    ad_dim = linalg.span_rank(family, f)
    contains = all(not any(x != 0 for x in M.apply(v)) for v in family)
    return {"n": n, "dim": len(basis), "ad_m_dim": ad_dim, "contains_ad_m": contains, "unknowns": n * h, "rows": M.nrows}


# --------------------------------------------------------------------------
# boundary operator, decomposable span


def boundary(model: SpaceModel) -> dict:
    """The map X^Y -> [X,Y] on so(m) coordinates and its kernel."""
    n = model.n
    P = n * (n - 1) // 2
    cols = curvature_operator_coords(model)  # column (a,b) = d(e_a ^ e_b)
    I = ex.eye(n)
    closed_ok = True
    c = model.triple
    for (a, b), col in zip(ex.pairs(n), cols):
        K = ex.wedge(I[:, a], I[:, b])
        # -1/2 sum_i [K e_i, e_i], as an operator: -1/2 sum_{i,j} K[j,i] ad_{[e_j, e_i]}
        acc = ex.zeros((n, n))
        for i in range(n):
            for j in range(n):
                if K[j, i] != 0:
                    acc = acc + K[j, i] * c[j, i].T
        if ex.skew_coords(ex.scale(acc, Fraction(-1, 2))) != list(col):
            closed_ok = False
    D = SparseMatrix.from_dense([list(r) for r in zip(*cols)], P)
    f = join_fields(QQ, model.field)
    kernel = linalg.nullspace(D, f)
    adh = adh_basis(model)
    orth = all(ex.dot(u, w) == 0 for u in adh for w in kernel)
    return {
        "P": P,
        "adh_dim": len(adh),
        "dim_M": len(kernel),
        "M_basis": kernel,
        "closed_form_agrees": closed_ok,
        "orthogonal_sum": orth and len(adh) + len(kernel) == P,
    }


def wedge_coords(x, y) -> list:
    return ex.skew_coords(ex.wedge(x, y))


def decomposable_span(model: SpaceModel, datum=None, budget: int = 64, seed: int = 0) -> dict:
    """Span D of X^Y over commuting pairs harvested from random Cartan subspaces."""
    from .roots import cartan_subspace

    n = model.n
    P = n * (n - 1) // 2
    p = random_primes(1, seed=seed + 17)[0]
    vecs: list[list] = []
    history = []
    f = join_fields(QQ, model.field)
    dmod = f.d if f.kind == "QQ_SQRT" else None
    s = sqrt_modp(dmod, p) if dmod is not None else None

    def current_rank():
        return _modp_rank([[to_modp(x, p, s) for x in v] for v in vecs], p) if vecs else 0

    if datum is not None:
        H = datum.cartan
        for a, b in itertools.combinations(range(len(H)), 2):
            vecs.append(wedge_coords(H[a], H[b]))
        for root in datum.roots:
            kern = _kernel_of_root(root.coords, H, f)
            for Hc in kern:
                for X in root.space:
                    vecs.append(wedge_coords(Hc, X))
        history.append(current_rank())
    plateau = 0
    for t in range(budget):
        A = cartan_subspace(model, seed=seed + 1000 + t)
        for a, b in itertools.combinations(range(len(A)), 2):
            vecs.append(wedge_coords(A[a], A[b]))
        history.append(current_rank())
        plateau = plateau + 1 if len(history) > 1 and history[-1] == history[-2] else 0
        if plateau >= 8:
            break
    dim_modp = history[-1] if history else 0
    bd = boundary(model)
    # exact confirmation: D is inside M by construction, so dim D = dim M certifies equality
    dim_D = linalg.span_rank(vecs, f) if vecs else 0
    return {
        "dim_D": dim_D,
        "dim_M": bd["dim_M"],
        "equals_M": dim_D == bd["dim_M"],
        "saturated": plateau >= 8 or dim_D == bd["dim_M"],
        "history": history,
        "modp_dim": dim_modp,
    }


def _kernel_of_root(alpha, H, f) -> list:
    """Vectors of span(H) on which the root (given by its values on H) vanishes."""
    r = len(H)
    M = SparseMatrix.from_dense([list(alpha)], r)
    out = []
    for c in linalg.nullspace(M, f):
        v = sum((c[t] * np.asarray(H[t], dtype=object) for t in range(r)), ex.zeros(len(H[0])))
        out.append(ex.simplify_array(v))
    return out


# --------------------------------------------------------------------------
# Lie triple system cochains


def coboundary_delta1(model: SpaceModel, L) -> np.ndarray:
    """(dL)(e_i,e_j,e_k) = -L[[e_i,e_j],e_k] + [[Le_i,e_j],e_k] + [[e_i,Le_j],e_k] + [[e_i,e_j],Le_k]."""
    c = model.triple
    L = np.asarray(L, dtype=object)
    # <L e_x, e_y> = L[y, x]
    t1 = -np.einsum("ijkx,yx->ijky", c, L)
    t2 = np.einsum("xi,xjkl->ijkl", L, c)
    t3 = np.einsum("xj,ixkl->ijkl", L, c)
    t4 = np.einsum("xk,ijxl->ijkl", L, c)
    return ex.simplify_array(t1 + t2 + t3 + t4)


def derivation_system(model: SpaceModel) -> SparseMatrix:
    """Rows of L -> dL on pairs i < j; unknown L[y, x] at column y*n + x."""
    n = model.n
    S = model.sparse
    rows, labels = [], []
    for i, j in ex.pairs(n):
        for k in range(n):
            row: dict = defaultdict(int)
            # each entry: (coefficient, output l, unknown (y, x)) contributions
            for x, v in S[i][j][k]:  # -L[[e_i,e_j],e_k] = -sum_x c_ijkx L e_x
                for l in range(n):
                    row[(l, l * n + x)] -= v
            for x in range(n):
                for l, v in S[x][j][k]:
                    row[(l, x * n + i)] += v
                for l, v in S[i][x][k]:
                    row[(l, x * n + j)] += v
                for l, v in S[i][j][x]:
                    row[(l, x * n + k)] += v
            per_l: dict = defaultdict(dict)
            for (l, col), v in row.items():
                if v != 0:
                    per_l[l][col] = v
            for l in range(n):
                if per_l[l]:
                    rows.append(per_l[l])
                    labels.append(f"delta[{i},{j},{k}|{l}]")
    return SparseMatrix.from_dicts(n * n, rows, labels)


def derivations(model: SpaceModel) -> dict:
    if not model.irreducible:
        raise NotIrreducible(f"{model.name} is reducible")
    n = model.n
    M = derivation_system(model)
    f = join_fields(QQ, model.field)
    basis = linalg.nullspace(M, f)
    adh_ops = [ex.skew_from_coords(u, n) for u in adh_basis(model)]
    adh_vecs = [[ex.simplify(U[y, x]) for y in range(n) for x in range(n)] for U in adh_ops]
    inside = all(not any(x != 0 for x in M.apply(v)) for v in adh_vecs)
    return {"dim": len(basis), "adh_dim": len(adh_ops), "equals_adh_action": inside and len(basis) == len(adh_ops)}


def nabla_w(model: SpaceModel, K) -> dict:
    """(nabla_Z W)(X,Y) on basis vectors, keyed by (z, x, y) with x < y.

    K is a sequence of n skew matrices (column convention) giving K_{e_z}.
    """
    n = model.n
    c = model.triple
    rho = schouten(model).rho if n >= 4 else ex.zeros((n, n))
    I = ex.eye(n)
    out = {}
    for z in range(n):
        Kz = np.asarray(K[z], dtype=object)
        comm = rho @ Kz - Kz @ rho
        for x, y in ex.pairs(n):
            adxy = c[x, y].T
            term = adxy @ Kz - Kz @ adxy
            u = Kz[:, x]  # K_z e_x
            w = Kz[:, y]
            # ad_{[K_z X, Y] - [K_z Y, X]}
            for a in range(n):
                if u[a] != 0:
                    term = term + u[a] * c[a, y].T
                if w[a] != 0:
                    term = term - w[a] * c[a, x].T
            term = term + ex.wedge(comm[:, x], I[:, y]) + ex.wedge(I[:, x], comm[:, y])
            out[(z, x, y)] = ex.simplify_array(term)
    return out


def k_from_vector(v, n: int) -> list[np.ndarray]:
    layout = Layout(n)
    return [layout.k_operator(v, i) for i in range(n)]


def random_adh_valued(model: SpaceModel, rng: np.random.Generator, bound: int = 3) -> list[np.ndarray]:
    """K_Z = ad_{PZ} for a random linear P into h (block-preserving for products)."""
    n = model.n
    U = [ex.skew_from_coords(u, n) for u in adh_basis(model)]
    out = []
    for _ in range(n):
        M = ex.zeros((n, n))
        for Ub in U:
            M = M + int(rng.integers(-bound, bound + 1)) * Ub
        out.append(ex.simplify_array(M))
    return out
