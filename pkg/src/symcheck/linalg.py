"""Sparse exact matrices with rank, nullspace and projection-rank over exact fields.

Exact fields (QQ and QQ(sqrt d)) use structured elimination on sparse dict
rows; large systems are first screened modulo a prime to pick independent
rows, and every kernel vector is checked against the full matrix exactly.
Prime fields use the dense numpy engine in :mod:`modp`, optionally after
random row compression.
"""

from __future__ import annotations

import heapq
import io
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import sparse

from . import modp
from .errors import GoldenFormatError, IndexOutOfRange, MixedExtension
from .fields import (
    QQ,
    FieldSpec,
    QSqrt,
    check_in_field,
    fdiv,
    field_of,
    format_scalar,
    parse_scalar,
    random_primes,
    sqrt_modp,
    to_modp,
)

Row = tuple[tuple[int, ...], tuple]

# Above this many stored entries the exact path screens rows modulo a prime first.
_SCREEN_THRESHOLD = 4000
_DENSE_LIMIT = 6 * 10**7


@dataclass(frozen=True)
class SparseMatrix:
    """Row-major sparse matrix; each row is (column indices, values), no stored zeros."""

    nrows: int
    ncols: int
    rows: tuple[Row, ...]
    row_labels: tuple[str, ...] | None = None
    col_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise ValueError("row count does not match nrows")
        for cols, vals in self.rows:
            if len(cols) != len(vals):
                raise ValueError("ragged row")
            if any(b <= a for a, b in zip(cols, cols[1:])):
                raise ValueError("column indices must be strictly increasing")
            if cols and (cols[0] < 0 or cols[-1] >= self.ncols):
                raise IndexOutOfRange("column index outside matrix")
            if any(v == 0 for v in vals):
                raise ValueError("stored zero entry")
        if self.row_labels is not None and len(self.row_labels) != self.nrows:
            raise ValueError("row labels length mismatch")
        if self.col_labels is not None and len(self.col_labels) != self.ncols:
            raise ValueError("column labels length mismatch")

    @classmethod
    def from_dicts(cls, ncols: int, dict_rows: Iterable[dict], row_labels=None, col_labels=None):
        rows = []
        for d in dict_rows:
            items = sorted((c, v) for c, v in d.items() if v != 0)
            rows.append((tuple(c for c, _ in items), tuple(v for _, v in items)))
        return cls(
            len(rows),
            ncols,
            tuple(rows),
            tuple(row_labels) if row_labels is not None else None,
            tuple(col_labels) if col_labels is not None else None,
        )

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence], ncols: int | None = None):
        dense = [list(r) for r in dense]
        if ncols is None:
            ncols = len(dense[0]) if dense else 0
        return cls.from_dicts(ncols, ({j: v for j, v in enumerate(r) if v != 0} for r in dense))

    def row_dict(self, i: int) -> dict:
        cols, vals = self.rows[i]
        return dict(zip(cols, vals))

    def to_dense(self) -> list[list]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i, (cols, vals) in enumerate(self.rows):
            for c, v in zip(cols, vals):
                out[i][c] = v
        return out

    def nnz(self) -> int:
        return sum(len(c) for c, _ in self.rows)

    def values(self):
        for _, vals in self.rows:
            yield from vals

    def field(self) -> FieldSpec:
        return field_of(self.values())

    def apply(self, v: Sequence) -> list:
        """Exact product M v."""
        return [sum((val * v[c] for c, val in zip(cols, vals)), 0) for cols, vals in self.rows]

    def transpose(self) -> SparseMatrix:
        cols_of: list[dict] = [dict() for _ in range(self.ncols)]
        for i, (cols, vals) in enumerate(self.rows):
            for c, v in zip(cols, vals):
                cols_of[c][i] = v
        return SparseMatrix.from_dicts(self.nrows, cols_of, self.col_labels, self.row_labels)

    def select_rows(self, idx: Sequence[int]) -> SparseMatrix:
        labels = tuple(self.row_labels[i] for i in idx) if self.row_labels else None
        return SparseMatrix(len(idx), self.ncols, tuple(self.rows[i] for i in idx), labels, self.col_labels)


# --------------------------------------------------------------------------
# exact elimination


def _reduce_row(r: dict, pivots: dict, pos: dict, order: list):
    """Eliminate every pivot column from r, in pivot insertion order."""
    heap = [pos[c] for c in r if c in pos]
    if not heap:
        return
    heapq.heapify(heap)
    last = -1
    while heap:
        k = heapq.heappop(heap)
        if k == last:
            continue
        last = k
        c = order[k]
        f = r.get(c)
        if f is None:
            continue
        for cc, v in pivots[c].items():
            new = r.get(cc, 0) - f * v
            if new == 0:
                r.pop(cc, None)
            else:
                if cc not in r and cc in pos:
                    heapq.heappush(heap, pos[cc])
                r[cc] = new


def _exact_rref(rows: Iterable[dict], ncols: int, leftmost: bool = False):
    """Structured Gauss-Jordan elimination over an exact field.

    Rows are processed shortest first and each pivot is taken in the column
    of the current row that is least populated in the whole matrix
    (Markowitz-style), unless leftmost is set, which gives the classical
    reduced echelon form.  Returns (pivots, order): pivot rows keyed by
    column, fully reduced, and the insertion order of pivot columns.
    """
    rows = [dict(r) for r in rows if r]
    counts = Counter(c for r in rows for c in r)
    rows.sort(key=len)
    pivots: dict[int, dict] = {}
    pos: dict[int, int] = {}
    order: list[int] = []
    for r in rows:
        _reduce_row(r, pivots, pos, order)
        if not r:
            continue
        c = min(r) if leftmost else min(r, key=lambda j: (counts[j], j))
        inv = fdiv(1, r[c])
        if inv != 1:
            r = {j: _norm(v * inv) for j, v in r.items()}
        pos[c] = len(order)
        order.append(c)
        pivots[c] = r
    for idx in range(len(order) - 1, -1, -1):
        r = pivots[order[idx]]
        for c2 in order[idx + 1 :]:
            f = r.get(c2)
            if f is None:
                continue
            for cc, v in pivots[c2].items():
                new = r.get(cc, 0) - f * v
                if new == 0:
                    r.pop(cc, None)
                else:
                    r[cc] = new
    return pivots, order


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _exact_kernel(rows: Iterable[dict], ncols: int) -> list[dict]:
    pivots, order = _exact_rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    kernel = []
    for f in free:
        v = {f: 1}
        for c, r in pivots.items():
            x = r.get(f)
            if x is not None:
                v[c] = _norm(-x)
        kernel.append(v)
    return kernel


def independent_subset(vectors: Sequence[Sequence]) -> list[int]:
    """Indices of the first maximal linearly independent subfamily (exact)."""
    pivots: dict[int, dict] = {}
    pos: dict[int, int] = {}
    order: list[int] = []
    keep = []
    for idx, v in enumerate(vectors):
        r = {j: x for j, x in enumerate(v) if x != 0}
        _reduce_row(r, pivots, pos, order)
        if not r:
            continue
        c = min(r)
        inv = fdiv(1, r[c])
        pivots[c] = {j: _norm(x * inv) for j, x in r.items()}
        pos[c] = len(order)
        order.append(c)
        keep.append(idx)
    return keep


def _canonical_exact(vectors: list[dict], ncols: int) -> list[dict]:
    if not vectors:
        return []
    pivots, order = _exact_rref(vectors, ncols, leftmost=True)
    return [pivots[c] for c in sorted(order)]


def _check_field(M: SparseMatrix, f: FieldSpec):
    if f.kind == "GF":
        return
    for v in M.values():
        check_in_field(v, f)


def _modp_prime_and_root(f: FieldSpec, seed: int = 0) -> tuple[int, int | None]:
    d = f.d if f.kind == "QQ_SQRT" else None
    p = random_primes(1, seed=seed, d=d)[0]
    return p, (sqrt_modp(d, p) if d is not None else None)


def _residue_rows(M: SparseMatrix, p: int, s: int | None):
    out = []
    for cols, vals in M.rows:
        out.append((np.array(cols, dtype=np.int64), np.array([to_modp(v, p, s) for v in vals], dtype=np.int64)))
    return out


def _dense_residues(res_rows, ncols: int) -> np.ndarray:
    A = np.zeros((len(res_rows), ncols), dtype=np.int64)
    for i, (cols, vals) in enumerate(res_rows):
        A[i, cols] = vals
    return A


def _csr_residues(res_rows, ncols: int, p: int):
    indptr = np.zeros(len(res_rows) + 1, dtype=np.int64)
    for i, (cols, _) in enumerate(res_rows):
        indptr[i + 1] = indptr[i] + len(cols)
    if res_rows:
        indices = np.concatenate([c for c, _ in res_rows]) if indptr[-1] else np.zeros(0, dtype=np.int64)
        data = np.concatenate([v for _, v in res_rows]) if indptr[-1] else np.zeros(0, dtype=np.int64)
    else:
        indices = data = np.zeros(0, dtype=np.int64)
    return sparse.csr_matrix((data % p, indices, indptr), shape=(len(res_rows), ncols), dtype=np.int64)


@dataclass
class ModpResult:
    p: int
    rank: int
    kernel: np.ndarray  # canonical basis rows
    pivot_rows: np.ndarray | None  # original row indices (uncompressed runs only)
    compressed: bool


def modp_solve(res_rows, ncols: int, p: int, seed: int = 0, want_kernel: bool = True) -> ModpResult:
    """Rank and canonical kernel of a residue matrix given as sparse rows."""
    m = len(res_rows)
    if m == 0:
        return ModpResult(p, 0, np.eye(ncols, dtype=np.int64), np.zeros(0, dtype=np.int64), False)
    target = ncols + 40
    if m > 2 * target and target * ncols <= _DENSE_LIMIT:
        comp = modp.RowCompressor(target, ncols, p, seed=seed)
        for cols, vals in res_rows:
            if len(cols):
                comp.add(cols, vals)
        U, piv, _ = modp.echelon(comp.B, p)
        if len(piv) == ncols:
            return ModpResult(p, ncols, np.zeros((0, ncols), dtype=np.int64), None, True)
        # The compressed kernel contains the true kernel; keep it only if it
        # is annihilated by the full matrix.
        K = modp.kernel_from_echelon(U, piv, ncols, p)
        S = _csr_residues(res_rows, ncols, p)
        if not modp.sparse_matmul_mod(S, K.T, p).any():
            return ModpResult(p, len(piv), modp.canonical_basis(K, p), None, True)
    A = _dense_residues(res_rows, ncols)
    U, piv, rows = modp.echelon(A, p)
    K = modp.kernel_from_echelon(U, piv, ncols, p) if want_kernel else np.zeros((0, ncols), dtype=np.int64)
    return ModpResult(p, len(piv), modp.canonical_basis(K, p), rows, False)


def _exact_nullspace(M: SparseMatrix, f: FieldSpec) -> list[dict]:
    """Exact kernel as canonical sparse dict vectors."""
    rows = [dict(zip(c, v)) for c, v in M.rows]
    if M.nnz() > _SCREEN_THRESHOLD and M.nrows * M.ncols <= _DENSE_LIMIT:
        p, s = _modp_prime_and_root(f)
        res = modp_solve(_residue_rows(M, p, s), M.ncols, p, want_kernel=False)
        if res.rank == M.ncols:
            return []
        if res.pivot_rows is not None:
            sub = [rows[i] for i in res.pivot_rows]
            kernel = _exact_kernel(sub, M.ncols)
            if all(_residual_zero(M, v) for v in kernel):
                return _canonical_exact(kernel, M.ncols)
    return _canonical_exact(_exact_kernel(rows, M.ncols), M.ncols)


def _residual_zero(M: SparseMatrix, v: dict) -> bool:
    for cols, vals in M.rows:
        acc = 0
        for c, x in zip(cols, vals):
            y = v.get(c)
            if y is not None:
                acc += x * y
        if acc != 0:
            return False
    return True


def _dict_to_list(v: dict, n: int) -> list:
    out = [0] * n
    for c, x in v.items():
        out[c] = x
    return out


def nullspace(M: SparseMatrix, f: FieldSpec = QQ) -> list[list]:
    """Basis of {v : Mv = 0} over f in reduced echelon form (leading entries 1)."""
    _check_field(M, f)
    if f.kind == "GF":
        res = modp_solve(_residue_rows(M, f.p, None), M.ncols, f.p)
        return [[int(x) for x in row] for row in res.kernel]
    return [_dict_to_list(v, M.ncols) for v in _exact_nullspace(M, f)]


def rank(M: SparseMatrix, f: FieldSpec = QQ) -> int:
    """Exact rank of M over f."""
    _check_field(M, f)
    if f.kind == "GF":
        return modp_solve(_residue_rows(M, f.p, None), M.ncols, f.p, want_kernel=False).rank
    if M.nnz() > _SCREEN_THRESHOLD and M.nrows * M.ncols <= _DENSE_LIMIT:
        p, s = _modp_prime_and_root(f)
        res = modp_solve(_residue_rows(M, p, s), M.ncols, p, want_kernel=False)
        if res.rank == M.ncols:
            return res.rank
    return M.ncols - len(_exact_nullspace(M, f))


def block_projection_rank(basis: Sequence[Sequence], block: Iterable[int], f: FieldSpec | None = None) -> int:
    """Rank of span(basis) projected onto the coordinates in block."""
    block = sorted(set(block))
    if not basis:
        return 0
    n = len(basis[0])
    if any(len(v) != n for v in basis):
        raise ValueError("basis vectors have different lengths")
    if block and (block[0] < 0 or block[-1] >= n):
        raise IndexOutOfRange(f"block index outside 0..{n - 1}")
    proj = SparseMatrix.from_dicts(len(block), ({k: v[j] for k, j in enumerate(block) if v[j] != 0} for v in basis))
    if f is None:
        f = proj.field()
    return rank(proj, f)


def span_rank(vectors: Sequence[Sequence], f: FieldSpec | None = None) -> int:
    if not vectors:
        return 0
    return block_projection_rank(vectors, range(len(vectors[0])), f)


def solve_particular(M: SparseMatrix, b: Sequence, f: FieldSpec | None = None):
    """One exact solution x of Mx = b, or None if inconsistent."""
    n = M.ncols
    aug = SparseMatrix.from_dicts(
        n + 1,
        ({**dict(zip(c, v)), **({n: -b[i]} if b[i] != 0 else {})} for i, (c, v) in enumerate(M.rows)),
    )
    for v in _exact_nullspace(aug, f or field_of(list(aug.values()))):
        t = v.get(n)
        if t:
            return [fdiv(v.get(j, 0), t) for j in range(n)]
    return None if any(x != 0 for x in b) else [0] * n

# --------------------------------------------------------------------------
# golden file format


def dumps_golden(M: SparseMatrix, f: FieldSpec | None = None) -> str:
    f = f or M.field()
    out = io.StringIO()
    out.write(f"{M.nrows} {M.ncols} {f}\n")
    if M.row_labels:
        for i, lab in enumerate(M.row_labels):
            out.write(f"#row {i} {lab}\n")
    if M.col_labels:
        for j, lab in enumerate(M.col_labels):
            out.write(f"#col {j} {lab}\n")
    for i, (cols, vals) in enumerate(M.rows):
        for c, v in zip(cols, vals):
            out.write(f"{i} {c} {format_scalar(v)}\n")
    return out.getvalue()


def loads_golden(text: str) -> tuple[SparseMatrix, FieldSpec]:
    lines = text.splitlines()
    if not lines:
        raise GoldenFormatError("empty matrix file")
    head = lines[0].split(maxsplit=2)
    if len(head) != 3:
        raise GoldenFormatError(f"bad header {lines[0]!r}")
    nrows, ncols, f = int(head[0]), int(head[1]), FieldSpec.parse(head[2])
    row_labels: dict[int, str] = {}
    col_labels: dict[int, str] = {}
    rows: list[dict] = [dict() for _ in range(nrows)]
    for ln in lines[1:]:
        if not ln.strip():
            continue
        if ln.startswith("#"):
            kind, idx, lab = (ln[1:].split(" ", 2) + [""])[:3]
            (row_labels if kind == "row" else col_labels)[int(idx)] = lab
            continue
        i, j, val = ln.split()
        i, j = int(i), int(j)
        if not (0 <= i < nrows and 0 <= j < ncols):
            raise GoldenFormatError(f"entry outside matrix: {ln!r}")
        rows[i][j] = parse_scalar(val, f)
    rl = tuple(row_labels.get(i, "") for i in range(nrows)) if row_labels else None
    cl = tuple(col_labels.get(j, "") for j in range(ncols)) if col_labels else None
    return SparseMatrix.from_dicts(ncols, rows, rl, cl), f


def write_golden(M: SparseMatrix, path, f: FieldSpec | None = None):
    with open(path, "w") as fh:
        fh.write(dumps_golden(M, f))


def read_golden(path) -> tuple[SparseMatrix, FieldSpec]:
    with open(path) as fh:
        return loads_golden(fh.read())


def residues(M: SparseMatrix, p: int, d: int | None = None):
    """Sparse residue rows of M modulo p (with a chosen sqrt(d) when needed)."""
    s = sqrt_modp(d, p) if d is not None else None
    return _residue_rows(M, p, s)


__all__ = [
    "SparseMatrix",
    "independent_subset",
    "rank",
    "nullspace",
    "block_projection_rank",
    "span_rank",
    "solve_particular",
    "dumps_golden",
    "loads_golden",
    "write_golden",
    "read_golden",
    "modp_solve",
    "residues",
    "MixedExtension",
]
