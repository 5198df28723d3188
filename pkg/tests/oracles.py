"""Independent reference computations used to pin golden numbers.

Nothing here imports the solver or assembly code of the package: systems are
built in operator form from the structure constants alone and reduced by a
plain dense Fraction elimination.  Only rational models are supported.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def dense_rank(rows, ncols: int) -> int:
    """Rank over QQ by Gauss-Jordan elimination on Fraction rows."""
    pivots: dict[int, list] = {}
    for r in rows:
        r = [Fraction(x) for x in r]
        for c, prow in pivots.items():
            if r[c]:
                f = r[c]
                r = [a - f * b for a, b in zip(r, prow)]
        lead = next((c for c, x in enumerate(r) if x), None)
        if lead is None:
            continue
        inv = 1 / r[lead]
        r = [x * inv for x in r]
        for c, prow in list(pivots.items()):
            if prow[lead]:
                f = prow[lead]
                pivots[c] = [a - f * b for a, b in zip(prow, r)]
        pivots[lead] = r
    return len(pivots)


def _triple(model) -> np.ndarray:
    c = np.asarray(model.triple, dtype=object)
    for x in c.flat:
        if not isinstance(x, (int, Fraction)):
            raise ValueError("oracle handles rational models only")
    return c


def _curvature_ops(c) -> list[np.ndarray]:
    n = c.shape[0]
    return [c[a, b].T for a in range(n) for b in range(a + 1, n)]


def prop3_dimension(model, orth: bool, phi_zero: bool = False) -> int:
    """Solution dimension of the operator-form curvature-compatibility system plus the cyclic Phi identity."""
    c = _triple(model)
    n = c.shape[0]
    var = {}
    for i in range(n):
        for j, k in itertools.combinations(range(n), 2):
            var[("K", i, j, k)] = len(var)
    for i, j in itertools.combinations(range(n), 2):
        for k in range(n):
            var[("F", i, j, k)] = len(var)
    N = len(var)

    def lin():
        return np.zeros(N, dtype=object)

    # K[i][l][m] = <K_{e_i} e_m, e_l> as a linear form
    K = np.empty((n, n, n), dtype=object)
    for i, l, m in itertools.product(range(n), repeat=3):
        v = lin()
        if m < l:
            v[var[("K", i, m, l)]] = 1
        elif m > l:
            v[var[("K", i, l, m)]] = -1
        K[i, l, m] = v

    def phi(x, y, k):
        v = lin()
        if x < y:
            v[var[("F", x, y, k)]] = 1
        elif x > y:
            v[var[("F", y, x, k)]] = -1
        return v

    def term(x, y, z):
        A = c[x, y].T  # ad_{[e_x, e_y]}
        out = np.empty((n, n), dtype=object)
        W = [K[x][a, y] - K[y][a, x] for a in range(n)]  # K_X Y - K_Y X
        for l, m in itertools.product(range(n), repeat=2):
            v = lin()
            for a in range(n):
                if A[l, a]:
                    v = v + A[l, a] * K[z][a, m]
                if A[a, m]:
                    v = v - A[a, m] * K[z][l, a]
                if c[a, z, m, l]:
                    v = v + c[a, z, m, l] * W[a]
            # (Phi(X,Y) ^ Z) e_m = <Phi, e_m> e_z - <e_z, e_m> Phi
            if l == z:
                v = v + phi(x, y, m)
            if m == z:
                v = v - phi(x, y, l)
            out[l, m] = v
        return out

    rows = []
    for x, y, z in itertools.combinations(range(n), 3):
        T = term(x, y, z) + term(y, z, x) + term(z, x, y)
        rows += [T[l, m] for l in range(n) for m in range(l)]
        rows.append(phi(x, y, z) + phi(y, z, x) + phi(z, x, y))
    if orth:
        for U in _curvature_ops(c):
            for i in range(n):
                v = lin()
                for j, k in itertools.combinations(range(n), 2):
                    v[var[("K", i, j, k)]] = U[k, j]
                rows.append(v)
    if phi_zero:
        for key, t in var.items():
            if key[0] == "F":
                v = lin()
                v[t] = 1
                rows.append(v)
    return N - dense_rank(rows, N)


def _basis_of_span(vectors) -> list:
    basis = []
    for v in vectors:
        if dense_rank(basis + [v], len(v)) > len(basis):
            basis.append(v)
    return basis


def lemma3_dimension(model) -> int:
    """dim of {A : m -> ad(h) : cyclic sum <[X,Y], A Z> = 0} with <[X,Y],U> = <U X, Y>."""
    c = _triple(model)
    n = c.shape[0]
    flat = [list(U.flat) for U in _curvature_ops(c)]
    U = [np.array(v, dtype=object).reshape(n, n) for v in _basis_of_span(flat)]
    h = len(U)
    N = n * h
    rows = []
    for x, y, z in itertools.combinations(range(n), 3):
        v = [0] * N
        for a, b, w in ((x, y, z), (y, z, x), (z, x, y)):
            for t in range(h):
                v[w * h + t] += U[t][b, a]
        rows.append(v)
    return N - dense_rank(rows, N)
