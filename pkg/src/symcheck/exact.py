"""Helpers for exact dense arrays (numpy object arrays of int/Fraction/QSqrt)."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .fields import QSqrt, fdiv


def obj(a) -> np.ndarray:
    """Copy into an object array, turning numpy integers into Python ints."""
    a = np.asarray(a)
    if a.dtype == object:
        return a.copy()
    if np.issubdtype(a.dtype, np.integer):
        return np.vectorize(int, otypes=[object])(a) if a.size else a.astype(object)
    raise TypeError(f"refusing to convert dtype {a.dtype} to exact values")


def zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(0)
    return out


def eye(n: int) -> np.ndarray:
    out = zeros((n, n))
    for i in range(n):
        out[i, i] = 1
    return out


def is_zero(a) -> bool:
    a = np.asarray(a)
    if a.dtype != object:
        return not a.any()
    return all(x == 0 for x in a.flat)


def first_nonzero(a):
    """Index tuple of the first nonzero entry, or None."""
    a = np.asarray(a)
    if a.dtype != object:
        idx = np.argwhere(a != 0)
        return tuple(int(i) for i in idx[0]) if len(idx) else None
    for idx, x in np.ndenumerate(a):
        if x != 0:
            return tuple(int(i) for i in idx)
    return None


def as_int_array(a):
    """int64 view of an exact array when every entry is a small integer, else None."""
    flat = list(np.asarray(a, dtype=object).flat)
    if all(isinstance(x, int) and abs(x) < 2**20 for x in flat):
        return np.array(flat, dtype=np.int64).reshape(np.shape(a))
    return None


def int_components(a):
    """Write an exact array as (A + B sqrt d) / den with int64 A, B.

    Returns (A, B, den, d) or None when entries are too large; d is None for
    rational arrays (B is then zero).
    """
    from math import lcm

    flat = list(np.asarray(a, dtype=object).flat)
    d = None
    parts = []
    for x in flat:
        if isinstance(x, QSqrt):
            d = x.d
            parts.append((Fraction(x.a), Fraction(x.b)))
        else:
            parts.append((Fraction(x), Fraction(0)))
    den = 1
    for u, v in parts:
        den = lcm(den, u.denominator, v.denominator)
    A = [int(u * den) for u, _ in parts]
    B = [int(v * den) for _, v in parts]
    if any(abs(x) >= 2**25 for x in A + B):
        return None
    shape = np.shape(a)
    return np.array(A, dtype=np.int64).reshape(shape), np.array(B, dtype=np.int64).reshape(shape), den, d


def fast(a) -> np.ndarray:
    """Integer arrays go to int64 for speed; everything else stays exact."""
    ia = as_int_array(a)
    return ia if ia is not None else np.asarray(a, dtype=object)


def simplify(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, QSqrt) and x.b == 0:
        return simplify(x.a)
    return x


def simplify_array(a) -> np.ndarray:
    out = np.asarray(a, dtype=object).copy()
    for idx, x in np.ndenumerate(out):
        out[idx] = simplify(x)
    return out


def scale(a, t) -> np.ndarray:
    return simplify_array(np.asarray(a, dtype=object) * t)


def div(a, t) -> np.ndarray:
    out = np.asarray(a, dtype=object).copy()
    for idx, x in np.ndenumerate(out):
        out[idx] = simplify(fdiv(x, t))
    return out


def dot(u, v):
    return simplify(sum((a * b for a, b in zip(u, v)), 0))


def trace(a):
    return simplify(sum((a[i, i] for i in range(a.shape[0])), 0))


def skew_coords(M) -> list:
    """Coordinates of a skew operator in so(n): entry <M e_j, e_k> = M[k, j] for j < k."""
    n = M.shape[0]
    return [simplify(M[k, j]) for j in range(n) for k in range(j + 1, n)]


def skew_from_coords(v, n: int) -> np.ndarray:
    M = zeros((n, n))
    t = 0
    for j in range(n):
        for k in range(j + 1, n):
            M[k, j] = v[t]
            M[j, k] = -v[t]
            t += 1
    return M


def pair_index(n: int) -> dict[tuple[int, int], int]:
    out = {}
    for j in range(n):
        for k in range(j + 1, n):
            out[(j, k)] = len(out)
    return out


def pairs(n: int) -> list[tuple[int, int]]:
    return [(j, k) for j in range(n) for k in range(j + 1, n)]


def wedge(x, y) -> np.ndarray:
    """Operator Z -> <x,Z> y - <y,Z> x, as a matrix acting on column vectors."""
    x = np.asarray(x, dtype=object)
    y = np.asarray(y, dtype=object)
    return simplify_array(np.outer(y, x) - np.outer(x, y))


def commutator(A, B) -> np.ndarray:
    return simplify_array(A @ B - B @ A)
