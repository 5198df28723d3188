"""Dense elimination over GF(p) with numpy int64 arithmetic.

Primes stay below 2**31, so every product of two residues fits in int64 and
each elimination step can reduce with a single ``% p``.
"""

from __future__ import annotations

import numpy as np


def echelon(A: np.ndarray, p: int):
    """Row echelon form with unit pivots.

    Returns (U, pivots, rows) where U holds the r nonzero echelon rows,
    pivots their pivot columns and rows the original indices of the input
    rows that ended up as pivot rows (they are linearly independent mod p).
    """
    A = np.array(A, dtype=np.int64, copy=True) % p
    m, n = A.shape
    perm = np.arange(m)
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
            perm[[r, k]] = perm[[k, r]]
        inv = pow(int(A[r, c]), -1, p)
        if inv != 1:
            A[r, c:] = A[r, c:] * inv % p
        below = r + 1 + np.flatnonzero(A[r + 1 :, c])
        if below.size:
            f = A[below, c][:, None]
            A[below, c:] = (A[below, c:] - f * A[r, c:]) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots, perm[:r]


def reduce_echelon(U: np.ndarray, pivots: list[int], p: int) -> np.ndarray:
    """Turn unit-pivot echelon rows into reduced row echelon form."""
    U = U.copy()
    for t in range(len(pivots) - 1, 0, -1):
        c = pivots[t]
        above = np.flatnonzero(U[:t, c])
        if above.size:
            f = U[above, c][:, None]
            U[above, c:] = (U[above, c:] - f * U[t, c:]) % p
    return U


def rref(A: np.ndarray, p: int):
    U, pivots, _ = echelon(A, p)
    return reduce_echelon(U, pivots, p), pivots


def kernel_from_echelon(U: np.ndarray, pivots: list[int], ncols: int, p: int) -> np.ndarray:
    """Kernel basis (one row per free column) from unit-pivot echelon rows."""
    piv = set(pivots)
    free = [c for c in range(ncols) if c not in piv]
    d = len(free)
    K = np.zeros((d, ncols), dtype=np.int64)
    if d == 0:
        return K
    r = len(pivots)
    if r:
        # Back substitution for Y = U_piv^{-1} U_free, column-oriented.
        Y = U[:, free] % p
        piv_idx = np.array(pivots)
        for t in range(r - 1, 0, -1):
            col = U[:t, piv_idx[t]]
            nz = np.flatnonzero(col)
            if nz.size:
                Y[nz] = (Y[nz] - col[nz][:, None] * Y[t]) % p
        K[:, piv_idx] = (-Y.T) % p
    K[np.arange(d), free] = 1
    return K


def canonical_basis(K: np.ndarray, p: int) -> np.ndarray:
    """Reduced echelon basis of the row span of K (leading entries 1)."""
    if K.shape[0] == 0:
        return K
    R, _ = rref(K, p)
    return R


def matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """A @ B mod p for residue matrices, split into 16-bit limbs to avoid overflow."""
    A = np.asarray(A, dtype=np.int64) % p
    B = np.asarray(B, dtype=np.int64) % p
    if A.shape[1] > 2**14:
        raise ValueError("inner dimension too large for limb splitting")
    lo = B & 0xFFFF
    hi = B >> 16
    return ((A @ lo) % p + ((A @ hi) % p) * 65536) % p


def sparse_matmul_mod(S, B: np.ndarray, p: int) -> np.ndarray:
    """S @ B mod p for a scipy CSR matrix of residues and a dense residue matrix."""
    B = np.asarray(B, dtype=np.int64) % p
    lo = B & 0xFFFF
    hi = B >> 16
    return ((S @ lo) % p + ((S @ hi) % p) * 65536) % p


class RowCompressor:
    """Accumulates random combinations of streamed rows into a fixed number of buckets.

    rank(R M) <= rank(M) for any R, so full column rank of the compressed
    matrix certifies full column rank of M.
    """

    def __init__(self, nbuckets: int, ncols: int, p: int, seed: int, fanout: int = 3):
        self.p = p
        self.B = np.zeros((nbuckets, ncols), dtype=np.int64)
        self.rng = np.random.default_rng(seed)
        self.fanout = min(fanout, nbuckets)

    def add(self, cols: np.ndarray, vals: np.ndarray):
        nb = self.B.shape[0]
        targets = self.rng.choice(nb, size=self.fanout, replace=False)
        coefs = self.rng.integers(1, self.p, size=self.fanout)
        for b, c in zip(targets, coefs):
            self.B[b, cols] = (self.B[b, cols] + int(c) * vals) % self.p
