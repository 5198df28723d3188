"""Curvature, Ricci, Schouten and Weyl tensors of a Lie triple system model.

Conventions: R(X,Y) = -ad_{[X,Y]}, the wedge (x^y)z = <x,z>y - <y,z>x, and
Ric(X) = sum_i R(X,e_i)e_i, so compact models have positive scalar curvature.
Operators on so(m) use the basis e_a^e_b (a < b) with coordinate M[b, a].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact as ex
from .errors import DimensionTooSmall, NotScalarOnBlock, NotSymmetric
from .spaces import SpaceModel


@dataclass(frozen=True)
class CurvatureTensor:
    n: int
    R: dict  # (i, j) with i < j -> n x n skew matrix of R(e_i, e_j)

    def __call__(self, i: int, j: int) -> np.ndarray:
        if i == j:
            return ex.zeros((self.n, self.n))
        if i < j:
            return self.R[(i, j)]
        return ex.scale(self.R[(j, i)], -1)


@dataclass(frozen=True)
class SchoutenData:
    ric: np.ndarray
    scal: object
    rho: np.ndarray


@dataclass(frozen=True)
class WeylTensor:
    n: int
    W: dict

    def __call__(self, i: int, j: int) -> np.ndarray:
        if i == j:
            return ex.zeros((self.n, self.n))
        if i < j:
            return self.W[(i, j)]
        return ex.scale(self.W[(j, i)], -1)

    def is_zero(self) -> bool:
        return all(ex.is_zero(m) for m in self.W.values())


def curvature(model: SpaceModel) -> CurvatureTensor:
    c = model.triple
    return CurvatureTensor(model.n, {(i, j): ex.scale(c[i, j].T, -1) for i, j in ex.pairs(model.n)})


def ricci(model: SpaceModel) -> np.ndarray:
    """Ric[l, k] = <Ric e_k, e_l> = -sum_i c[k, i, i, l]."""
    c = model.triple
    n = model.n
    out = ex.zeros((n, n))
    for k in range(n):
        for l in range(n):
            out[l, k] = -sum((c[k, i, i, l] for i in range(n)), 0)
    return ex.simplify_array(out)


def schouten(model: SpaceModel) -> SchoutenData:
    n = model.n
    if n < 4:
        raise DimensionTooSmall(f"Schouten tensor needs n >= 4, got n = {n}")
    ric = ricci(model)
    scal = ex.trace(ric)
    shift = ex.simplify(Fraction(1, 2 * (n - 1) * (n - 2)) * scal)
    rho = ex.div(ric, n - 2) - shift * ex.eye(n)
    return SchoutenData(ric, scal, ex.simplify_array(rho))


def _weyl_from(R: CurvatureTensor, rho: np.ndarray) -> WeylTensor:
    n = R.n
    I = ex.eye(n)
    W = {}
    for i, j in ex.pairs(n):
        ei, ej = I[:, i], I[:, j]
        W[(i, j)] = ex.simplify_array(R(i, j) + ex.wedge(rho[:, i], ej) + ex.wedge(ei, rho[:, j]))
    return WeylTensor(n, W)


def weyl(model: SpaceModel) -> WeylTensor:
    rho = schouten(model).rho
    return _weyl_from(curvature(model), rho)


def weyl_ricci_defects(W: WeylTensor) -> list[tuple[int, int]]:
    """Pairs (k, l) where sum_i <W(e_k, e_i) e_i, e_l> is nonzero."""
    n = W.n
    bad = []
    for k in range(n):
        v = sum((W(k, i)[:, i] for i in range(n)), ex.zeros(n))
        bad += [(k, l) for l in range(n) if ex.simplify(v[l]) != 0]
    return bad


def weyl_symmetry_defects(W: WeylTensor) -> list[str]:
    """First Bianchi and pair symmetry of <W(e_i,e_j)e_k, e_l>."""
    n = W.n
    w = ex.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            w[i, j] = W(i, j).T
    bad = []
    for i, j, k, l in np.ndindex(n, n, n, n):
        if ex.simplify(w[i, j, k, l] + w[j, k, i, l] + w[k, i, j, l]) != 0:
            bad.append(f"bianchi[{i},{j},{k},{l}]")
        if ex.simplify(w[i, j, k, l] - w[k, l, i, j]) != 0:
            bad.append(f"pair[{i},{j},{k},{l}]")
    return bad


def s_operator(A) -> np.ndarray:
    """Matrix of T -> AT + TA on so(m) in the e_a^e_b basis."""
    A = np.asarray(A, dtype=object)
    n = A.shape[0]
    if any(ex.simplify(A[i, j] - A[j, i]) != 0 for i in range(n) for j in range(i + 1, n)):
        raise NotSymmetric("S_A needs a symmetric A")
    I = ex.eye(n)
    cols = [ex.skew_coords(A @ T + T @ A) for T in (ex.wedge(I[:, a], I[:, b]) for a, b in ex.pairs(n))]
    return ex.simplify_array(np.array(cols, dtype=object).T)


def curvature_operator(model: SpaceModel) -> np.ndarray:
    """Column (a, b) holds the coordinates of ad_{[e_a, e_b]} = -R(e_a, e_b)."""
    c = model.triple
    cols = [ex.skew_coords(c[a, b].T) for a, b in ex.pairs(model.n)]
    return ex.simplify_array(np.array(cols, dtype=object).T)


def weyl_operator(W: WeylTensor) -> np.ndarray:
    cols = [ex.skew_coords(ex.scale(W(a, b), -1)) for a, b in ex.pairs(W.n)]
    return ex.simplify_array(np.array(cols, dtype=object).T)


def decomposition_holds(model: SpaceModel) -> bool:
    """Curvature operator equals Weyl operator plus S_rho."""
    rho = schouten(model).rho
    W = _weyl_from(curvature(model), rho)
    diff = curvature_operator(model) - weyl_operator(W) - s_operator(rho)
    return ex.is_zero(ex.simplify_array(diff))


def casimir_operator(model: SpaceModel) -> np.ndarray:
    """Matrix of X -> sum_i [[X, e_i], e_i]."""
    return ex.scale(ricci(model), -1)


def casimir(model: SpaceModel) -> list:
    """Scalar c per factor block with sum_i [[X,e_i],e_i] = c X there."""
    C = casimir_operator(model)
    out = []
    for blk in model.factor_blocks:
        vals = {ex.simplify(C[l, k]) for k in blk for l in blk if k != l}
        diag = {ex.simplify(C[k, k]) for k in blk}
        off_block = any(C[l, k] != 0 for k in blk for l in range(model.n) if l not in blk)
        if vals - {0} or len(diag) != 1 or off_block:
            raise NotScalarOnBlock(f"Casimir operator is not scalar on block {list(blk)}")
        out.append(diag.pop())
    return out


def casimir_perturbation_defect(model: SpaceModel, K) -> np.ndarray:
    """sum_i ([[X, K e_i], e_i] + [[X, e_i], K e_i]) as a matrix in X (should vanish)."""
    c = model.triple
    n = model.n
    K = np.asarray(K, dtype=object)
    out = ex.zeros((n, n))
    for k in range(n):
        acc = ex.zeros(n)
        for i in range(n):
            for j in range(n):
                if K[j, i] != 0:
                    acc = acc + K[j, i] * (c[k, j, i] + c[k, i, j])
        out[:, k] = acc
    return ex.simplify_array(out)


def random_skew(n: int, rng: np.random.Generator, bound: int = 5) -> np.ndarray:
    M = ex.zeros((n, n))
    for j, k in ex.pairs(n):
        v = int(rng.integers(-bound, bound + 1))
        M[k, j], M[j, k] = v, -v
    return M


def einstein_constant(model: SpaceModel):
    """lambda with Ric = lambda id, or None when not Einstein."""
    ric = ricci(model)
    lam = ric[0, 0]
    if ex.is_zero(ex.simplify_array(ric - lam * ex.eye(model.n))):
        return ex.simplify(lam)
    return None


def report(model: SpaceModel) -> dict:
    from .fields import format_scalar

    lam = einstein_constant(model)
    out = {"n": model.n, "einstein": lam is not None, "lambda": None if lam is None else format_scalar(lam)}
    out["scal"] = format_scalar(ex.trace(ricci(model)))
    if model.n >= 4:
        W = weyl(model)
        out["weyl_nonzero"] = not W.is_zero()
        out["weyl_tracefree"] = not weyl_ricci_defects(W)
        out["decomposition"] = decomposition_holds(model)
    else:
        out["weyl_nonzero"] = None
        out["weyl_tracefree"] = None
    try:
        out["casimir"] = [format_scalar(x) for x in casimir(model)]
    except NotScalarOnBlock:
        out["casimir"] = None
    return out
