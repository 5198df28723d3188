"""Spin(9) Clifford generators, the Cayley plane bracket and the Xi/Theta machinery."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exact as ex
from . import linalg, modp
from .errors import ConstructionInvalid
from .fields import random_primes
from .spaces import SpaceModel

_BLOCKS = {
    "I": np.eye(2, dtype=np.int64),
    "X": np.array([[0, 1], [1, 0]], dtype=np.int64),  # reflection
    "Z": np.array([[1, 0], [0, -1]], dtype=np.int64),  # diagonal sign
    "E": np.array([[0, -1], [1, 0]], dtype=np.int64),  # rotation by 90 degrees
}


@dataclass(frozen=True, eq=False)
class CliffordSystem:
    S: tuple[np.ndarray, ...]
    words: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return self.S[0].shape[0]


def _kron_word(word: str) -> np.ndarray:
    m = _BLOCKS[word[0]]
    for ch in word[1:]:
        m = np.kron(m, _BLOCKS[ch])
    return m


def _anticommute(a, b) -> bool:
    return not (a @ b + b @ a).any()


@lru_cache(maxsize=1)
def _clifford_words() -> tuple[str, ...]:
    """Nine 4-letter words whose Kronecker products pairwise anticommute.

    Words with an even number of rotation factors are symmetric and square
    to the identity; a depth-first search picks the first compatible nine.
    """
    cands = []
    for w in itertools.product("IXZE", repeat=4):
        w = "".join(w)
        if w.count("E") % 2 == 0 and w != "IIII":
            cands.append((w, _kron_word(w)))

    def search(chosen, start):
        if len(chosen) == 9:
            return chosen
        for t in range(start, len(cands)):
            if all(_anticommute(cands[t][1], cands[s][1]) for s in chosen):
                found = search(chosen + [t], t + 1)
                if found:
                    return found
        return None

    found = search([], 0)
    if not found:
        raise ConstructionInvalid("no anticommuting family of nine found")
    return tuple(cands[t][0] for t in found)


def clifford9() -> CliffordSystem:
    words = _clifford_words()
    cs = CliffordSystem(tuple(_kron_word(w) for w in words), words)
    bad = clifford_violations(cs)
    if bad:
        raise ConstructionInvalid(f"Clifford relations fail: {bad[:3]}")
    return cs


def conjugated(cs: CliffordSystem, seed: int) -> CliffordSystem:
    """All generators conjugated by one random signed permutation matrix."""
    rng = np.random.default_rng(seed)
    n = cs.dim
    Q = np.zeros((n, n), dtype=np.int64)
    Q[np.arange(n), rng.permutation(n)] = rng.choice([-1, 1], size=n)
    return CliffordSystem(tuple(Q @ S @ Q.T for S in cs.S), cs.words)


def clifford_violations(cs: CliffordSystem) -> list[tuple[int, int]]:
    n = cs.dim
    I = np.eye(n, dtype=np.int64)
    bad = []
    for i, Si in enumerate(cs.S):
        if (Si != Si.T).any() or (Si @ Si.T != I).any():
            bad.append((i, i))
        for j, Sj in enumerate(cs.S):
            target = 2 * I if i == j else 0 * I
            if (Si @ Sj + Sj @ Si != target).any():
                bad.append((i, j))
    return bad


def so16_span_rank(cs: CliffordSystem) -> int:
    """Rank of {S_iS_j}_{i<j} together with {S_iS_jS_k}_{i<j<k}."""
    S = cs.S
    vecs = [(S[i] @ S[j]).ravel() for i, j in itertools.combinations(range(9), 2)]
    vecs += [(S[i] @ S[j] @ S[k]).ravel() for i, j, k in itertools.combinations(range(9), 3)]
    p = random_primes(1, seed=9)[0]
    return len(modp.echelon(np.array(vecs) % p, p)[1])


def op2_bracket(cs: CliffordSystem) -> SpaceModel:
    """Cayley plane: ad_{[X,Y]} = 3 X^Y + sum_i (S_i X)^(S_i Y)."""
    n = cs.dim
    I = np.eye(n, dtype=np.int64)
    # c[i,j,k,l] = 3(d_ik d_jl - d_jk d_il) + sum_s (S_ki S_lj - S_kj S_li)
    c = 3 * (np.einsum("ik,jl->ijkl", I, I) - np.einsum("jk,il->ijkl", I, I))
    for S in cs.S:
        c += np.einsum("ki,lj->ijkl", S, S) - np.einsum("kj,li->ijkl", S, S)
    return SpaceModel(
        name="op2",
        n=n,
        sign=+1,
        triple=ex.obj(c),
        factor_blocks=(tuple(range(n)),),
        normalization="3 X^Y + sum_i S_iX^S_iY, Euclidean basis of R^16",
        extra={"clifford_words": list(cs.words)},
    )


def op2_spin_form(cs: CliffordSystem) -> np.ndarray:
    """c[i,j,k,l] from ad_{[X,Y]} = sum_{a<b} <S_aS_b X, Y> S_aS_b."""
    n = cs.dim
    c = np.zeros((n, n, n, n), dtype=np.int64)
    for a, b in itertools.combinations(range(9), 2):
        P = cs.S[a] @ cs.S[b]
        # <P e_i, e_j> = P[j, i];  <P e_k, e_l> = P[l, k]
        c += np.einsum("ji,lk->ijkl", P, P)
    return c


# --------------------------------------------------------------------------
# Theta maps on L^k R^9 (x) m and the map Xi into alternating 3-forms on m
#
# Monomial basis of L^k R^9 (x) R^16: index idx(I) * 16 + a for sorted I.


def _monomials(k: int, n: int = 9) -> dict[tuple[int, ...], int]:
    return {I: t for t, I in enumerate(itertools.combinations(range(n), k))}


def _wedge_left(i: int, I: tuple[int, ...]):
    """u_i ^ u_I as (sign, J), or None when i is in I."""
    if i in I:
        return None
    s = -1 if sum(1 for x in I if x < i) % 2 else 1
    return s, tuple(sorted(I + (i,)))


def _contract(i: int, I: tuple[int, ...]):
    """u_i -| u_I as (sign, J), or None when i is not in I."""
    if i not in I:
        return None
    pos = I.index(i)
    return (-1 if pos % 2 else 1), I[:pos] + I[pos + 1 :]


def _theta(cs: CliffordSystem, k: int) -> np.ndarray:
    m = cs.dim
    src, dst = _monomials(k), _monomials(k + 1)
    out = np.zeros((len(dst) * m, len(src) * m), dtype=np.int64)
    for I, s in src.items():
        for i, S in enumerate(cs.S):
            w = _wedge_left(i, I)
            if w is None:
                continue
            sg, J = w
            t = dst[J]
            out[t * m : (t + 1) * m, s * m : (s + 1) * m] += sg * S
    return out


def _theta_star(cs: CliffordSystem, k: int) -> np.ndarray:
    m = cs.dim
    src, dst = _monomials(k), _monomials(k - 1)
    out = np.zeros((len(dst) * m, len(src) * m), dtype=np.int64)
    for I, s in src.items():
        for i, S in enumerate(cs.S):
            w = _contract(i, I)
            if w is None:
                continue
            sg, J = w
            t = dst[J]
            out[t * m : (t + 1) * m, s * m : (s + 1) * m] -= sg * S
    return out


def _exact_kernel(A: np.ndarray) -> np.ndarray:
    """Integer kernel basis (as rows) of an integer matrix."""
    from math import lcm

    M = linalg.SparseMatrix.from_dense(ex.obj(A).tolist(), A.shape[1])
    rows = []
    for v in linalg.nullspace(M):
        den = 1
        for x in v:
            den = lcm(den, Fraction(x).denominator)
        rows.append([int(Fraction(x) * den) for x in v])
    return np.array(rows, dtype=np.int64).reshape(len(rows), A.shape[1])


@dataclass(frozen=True, eq=False)
class HodgeTriple:
    theta: tuple[np.ndarray, ...]  # Theta_0, Theta_1, Theta_2
    theta_star: tuple[np.ndarray, ...]  # Theta_1*, Theta_2* (Theta_0* is zero)
    P: tuple[np.ndarray, ...]  # kernel bases of Theta_k*, one vector per row

    def dims(self) -> list[int]:
        return [p.shape[0] for p in self.P]


def theta_maps(cs: CliffordSystem) -> HodgeTriple:
    theta = tuple(_theta(cs, k) for k in range(3))
    star = tuple(_theta_star(cs, k) for k in (1, 2))
    P0 = np.eye(cs.dim, dtype=np.int64)
    return HodgeTriple(theta, star, (P0, _exact_kernel(star[0]), _exact_kernel(star[1])))


def xi_map(cs: CliffordSystem) -> np.ndarray:
    """Matrix of Xi from L^2 R^9 (x) m to alternating 3-forms, rows indexed by x < y < z.

    Xi(w (x) a)(X, Y, Z) = cyclic sum of <a, X> <rho(w) Y, Z> with
    rho(u_i ^ u_j) = S_i S_j.
    """
    m = cs.dim
    pairs = _monomials(2)
    triples = _monomials(3, m)
    out = np.zeros((len(triples), len(pairs) * m), dtype=np.int64)
    for (i, j), s in pairs.items():
        P = cs.S[i] @ cs.S[j]
        for (x, y, z), r in triples.items():
            # <a, x> <P y, z> + <a, y> <P z, x> + <a, z> <P x, y>
            out[r, s * m + x] += P[z, y]
            out[r, s * m + y] += P[x, z]
            out[r, s * m + z] += P[y, x]
    return out


def evaluate_form(coords: np.ndarray, X, Y, Z):
    """Value of the alternating 3-form with coordinates on basis triples at (X, Y, Z)."""
    m = len(X)
    total = 0
    for (x, y, z), r in _monomials(3, m).items():
        if coords[r] == 0:
            continue
        det = (
            X[x] * (Y[y] * Z[z] - Y[z] * Z[y])
            - X[y] * (Y[x] * Z[z] - Y[z] * Z[x])
            + X[z] * (Y[x] * Z[y] - Y[y] * Z[x])
        )
        total += int(coords[r]) * det
    return total


def _lift(k: int, a: np.ndarray, terms) -> np.ndarray:
    """Vector sum of u_I (x) a_t for terms (I, a_t) in L^k R^9 (x) m."""
    idx = _monomials(k)
    m = len(a)
    v = np.zeros(len(idx) * m, dtype=np.int64)
    for I, vec in terms:
        if k == 2 and I[0] > I[1]:
            I, vec = (I[1], I[0]), -vec
        s = idx[tuple(I)]
        v[s * m : (s + 1) * m] += vec
    return v


def _rank(A: np.ndarray, p: int) -> int:
    if A.size == 0:
        return 0
    return len(modp.echelon(np.asarray(A, dtype=np.int64) % p, p)[1])


def _common_kernel(mats) -> np.ndarray:
    return _exact_kernel(np.vstack(mats))


def witness_p1(cs: CliffordSystem) -> dict:
    S = cs.S
    I = np.eye(cs.dim, dtype=np.int64)
    K = _common_kernel([S[1] @ S[2] @ S[3] @ S[4] - I, S[0] - I])
    X = K[0]
    Y, Z, T = S[1] @ S[3] @ X, S[2] @ S[3] @ X, S[2] @ X
    v = _lift(1, X, [((0,), S[1] @ T), ((1,), S[0] @ T)])
    hodge_star = _theta_star(cs, 1)
    in_p1 = not (hodge_star @ v).any()
    form = xi_map(cs) @ (_theta(cs, 1) @ v)
    value = int(evaluate_form(form, X, Y, Z))
    expected = -3 * int(X @ X) ** 2
    return {"in_P1": bool(in_p1), "value": value, "expected": expected, "pass": bool(in_p1 and value == expected)}


def _isotropic_vector(B: np.ndarray) -> np.ndarray:
    """Nonzero integer X with <BX, X> = 0 for a symmetric traceless B."""
    n = B.shape[0]
    for a in range(n):
        if B[a, a] == 0:
            return np.eye(n, dtype=np.int64)[a]
    pos = _exact_kernel(B - np.eye(n, dtype=np.int64))
    neg = _exact_kernel(B + np.eye(n, dtype=np.int64))
    x, y = pos[0], neg[0]
    # <B(sx + ty), sx + ty> = s^2 |x|^2 - t^2 |y|^2 for eigenvectors x, y of B
    nx, ny = int(x @ x), int(y @ y)
    for s in range(1, 64):
        for t in range(1, 64):
            if s * s * nx == t * t * ny:
                return s * x + t * y
    raise ConstructionInvalid("no integer isotropic vector found")


def witness_p2(cs: CliffordSystem) -> dict:
    S = cs.S
    B = S[0] @ S[1] @ S[2] @ S[3]
    X = _isotropic_vector(B)
    cons = [X, B @ X] + [S[i] @ S[j] @ X for i in range(4) for j in range(4)]
    Y = _exact_kernel(np.array(cons))[0]
    T, Z = S[0] @ S[3] @ X, S[0] @ S[3] @ Y
    N = _lift(
        2,
        X,
        [
            ((0, 1), S[1] @ S[0] @ T),
            ((1, 2), S[1] @ S[2] @ T),
            ((2, 3), S[3] @ S[2] @ T),
            ((3, 0), S[3] @ S[0] @ T),
        ],
    )
    in_p2 = not (_theta_star(cs, 2) @ N).any()
    value = int(evaluate_form(xi_map(cs) @ N, X, Y, Z))
    expected = int(X @ X) * int(Y @ Y)
    # the exact value is -|X|^2 |Y|^2; nonzero is what injectivity on P_2 needs
    return {
        "in_P2": bool(in_p2),
        "value": value,
        "expected": expected,
        "nonzero": value != 0,
        "equals_minus_expected": value == -expected,
        "pass": bool(in_p2 and value == expected),
    }


def decomposition_check(cs: CliffordSystem, seed: int = 0) -> dict:
    """Dimensions of P_k and independence of the three summands of L^2 R^9 (x) m."""
    h = theta_maps(cs)
    p = random_primes(1, seed=seed)[0]
    A = h.theta[1] @ h.theta[0]
    B = h.theta[1] @ h.P[1].T
    C = h.P[2].T
    ranks = {"theta1theta0": _rank(A, p), "theta1_P1": _rank(B, p), "P2": _rank(C, p)}
    total = _rank(np.hstack([A, B, C]), p)
    adjoint = all(
        not (h.theta_star[k] + h.theta[k].T).any() for k in range(2)
    )
    dims = h.dims()
    ok = dims == [16, 128, 432] and total == 576 and ranks == {"theta1theta0": 16, "theta1_P1": 128, "P2": 432}
    return {
        "dim_P": dims,
        "ranks": ranks,
        "total_rank": total,
        "star_is_minus_adjoint": adjoint,
        "pass": ok and adjoint,
    }


def ker_xi_check(cs: CliffordSystem, seed: int = 0) -> dict:
    """dim ker Xi = 16 and ker Xi = Theta_1 Theta_0(P_0).

    Ranks are taken mod p; a mod-p rank never exceeds the rational rank, so
    full rank mod p certifies injectivity, and the exact identity
    Xi Theta_1 Theta_0 = 0 supplies the 16-dimensional part of the kernel.
    """
    h = theta_maps(cs)
    Xi = xi_map(cs)
    p = random_primes(1, seed=seed)[0]
    kills = not (Xi @ h.theta[1] @ h.theta[0]).any()
    rank_xi = _rank(Xi, p)
    ncols = Xi.shape[1]
    inj_p1 = _rank(Xi @ h.theta[1] @ h.P[1].T, p)
    inj_p2 = _rank(Xi @ h.P[2].T, p)
    dim_ker = ncols - rank_xi
    ok = kills and dim_ker == 16 and inj_p1 == 128 and inj_p2 == 432
    return {
        "dim_ker_xi": dim_ker,
        "contains_theta1theta0": kills,
        "rank_on_theta1_P1": inj_p1,
        "rank_on_P2": inj_p2,
        "prime": p,
        "pass": ok,
    }


def _derivation_on_wedge(A: np.ndarray, k: int) -> np.ndarray:
    """Action of a matrix A on L^k by the Leibniz rule, in the sorted monomial basis."""
    n = A.shape[0]
    idx = _monomials(k, n)
    out = np.zeros((len(idx), len(idx)), dtype=np.int64)
    for I, s in idx.items():
        for pos, i in enumerate(I):
            for j in range(n):
                if A[j, i] == 0:
                    continue
                J = I[:pos] + (j,) + I[pos + 1 :]
                if len(set(J)) < k:
                    continue
                order = sorted(range(k), key=lambda t: J[t])
                # sign of the permutation sorting J
                sg = 1
                seen = list(order)
                for a in range(k):
                    for b in range(a + 1, k):
                        if seen[a] > seen[b]:
                            sg = -sg
                out[idx[tuple(sorted(J))], s] += sg * A[j, i]
    return out


def vector_action(cs: CliffordSystem, U: np.ndarray) -> np.ndarray:
    """C with [U, S_k] = sum_l C[l, k] S_l for U in span{S_iS_j}."""
    m = cs.dim
    C = np.zeros((9, 9), dtype=np.int64)
    for k, Sk in enumerate(cs.S):
        comm = U @ Sk - Sk @ U
        for l, Sl in enumerate(cs.S):
            tr = int(np.trace(comm @ Sl))
            if tr % m:
                raise ConstructionInvalid("U does not act on the span of the S_i")
            C[l, k] = tr // m
    return C


def equivariance_check(cs: CliffordSystem, seed: int = 0, samples: int = 20) -> dict:
    rng = np.random.default_rng(seed)
    Xi = xi_map(cs)
    m = cs.dim
    failures = 0
    for _ in range(samples):
        U = np.zeros((m, m), dtype=np.int64)
        for i, j in itertools.combinations(range(9), 2):
            U += int(rng.integers(-3, 4)) * (cs.S[i] @ cs.S[j])
        C = vector_action(cs, U)
        left = np.kron(_derivation_on_wedge(C, 2), np.eye(m, dtype=np.int64)) + np.kron(
            np.eye(36, dtype=np.int64), U
        )
        right = _derivation_on_wedge(U, 3)
        if (Xi @ left - right @ Xi).any():
            failures += 1
    return {"samples": samples, "failures": failures, "pass": failures == 0}


def xi_kills_theta_theta(cs: CliffordSystem, seed: int = 0, samples: int = 10) -> dict:
    rng = np.random.default_rng(seed)
    TT = _theta(cs, 1) @ _theta(cs, 0)
    Xi = xi_map(cs)
    bad = sum(bool((Xi @ TT @ rng.integers(-9, 10, size=cs.dim)).any()) for _ in range(samples))
    return {"samples": samples, "nonzero": bad, "pass": bad == 0}


def report(check: str = "all", seed: int = 0) -> dict:
    cs = clifford9()
    out: dict = {}
    if check in ("relations", "all"):
        bad = clifford_violations(cs)
        model = op2_bracket(cs)
        spin_form = ex.obj(op2_spin_form(cs))
        out["relations"] = {
            "words": list(cs.words),
            "violations": len(bad),
            "so16_span_rank": so16_span_rank(cs),
            "bracket_forms_agree": bool((model.triple == spin_form).all()),
        }
        out["relations"]["pass"] = (
            not bad and out["relations"]["so16_span_rank"] == 120 and out["relations"]["bracket_forms_agree"]
        )
    if check in ("decomposition", "all"):
        out["decomposition"] = decomposition_check(cs, seed)
    if check in ("xi", "all"):
        other = conjugated(cs, seed + 1)
        kx = ker_xi_check(cs, seed)
        kx_conj = ker_xi_check(other, seed)
        out["xi"] = {
            "kernel": kx,
            "kernel_conjugated": kx_conj,
            "theta_theta": xi_kills_theta_theta(cs, seed),
            "witness_P1": witness_p1(cs),
            "witness_P2": witness_p2(cs),
            "equivariance": equivariance_check(cs, seed),
        }
        out["xi"]["pass"] = all(v["pass"] for v in out["xi"].values() if isinstance(v, dict))
    return out
