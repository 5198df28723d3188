from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from symcheck import linalg, modp
from symcheck.constraints import rational_reconstruct
from symcheck.errors import (
    DenominatorDivisibleByPrime,
    GoldenFormatError,
    IndexOutOfRange,
    InvalidField,
    MixedExtension,
)
from symcheck.fields import QQ, FieldSpec, QSqrt, field_sqrt, gf, qq_sqrt, random_primes, sqrt_modp, to_modp
from symcheck.linalg import SparseMatrix

P = random_primes(1, seed=3)[0]

small_ints = st.integers(-4, 4)
matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 7).flatmap(lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r))
)
rationals = st.builds(Fraction, st.integers(-50, 50), st.integers(1, 20))
nonzero = st.builds(Fraction, st.integers(1, 50) | st.integers(-50, -1), st.integers(1, 20))


def test_qsqrt_arithmetic():
    x = QSqrt(1, 2, 3)
    assert x * x == QSqrt(13, 4, 3)
    assert x * x.inverse() == 1
    assert (x - x) == 0
    with pytest.raises(MixedExtension):
        _ = x + QSqrt(0, 1, 2)


@given(rationals, nonzero)
def test_qsqrt_inverse_property(a, b):
    x = QSqrt(a, b, 3)
    assert x * x.inverse() == 1
    assert abs(float(x) - (float(a) + float(b) * 3**0.5)) < 1e-9


@given(rationals, rationals)
def test_field_sqrt_of_square(u, v):
    x = QSqrt.make(u, v, 3)
    r = field_sqrt(x * x, 3)
    assert r is not None and r * r == x * x


def test_fieldspec_validation():
    with pytest.raises(InvalidField):
        gf(7)
    with pytest.raises(InvalidField):
        qq_sqrt(4)
    assert FieldSpec.parse("QQ(sqrt(3))") == qq_sqrt(3)
    assert str(FieldSpec.parse(f"GF({P})")) == f"GF({P})"


def test_to_modp():
    assert to_modp(Fraction(1, 2), P) * 2 % P == 1
    with pytest.raises(DenominatorDivisibleByPrime):
        to_modp(Fraction(1, P), P)
    s = sqrt_modp(3, random_primes(1, seed=0, d=3)[0])
    assert s * s % random_primes(1, seed=0, d=3)[0] == 3


@given(matrices)
@settings(max_examples=60, deadline=None)
def test_rank_nullity_and_kernel(rows):
    n = len(rows[0])
    M = SparseMatrix.from_dense(rows, n)
    ker = linalg.nullspace(M)
    assert linalg.rank(M) + len(ker) == n
    for v in ker:
        assert all(x == 0 for x in M.apply(v))
    assert linalg.rank(M) == oracles.dense_rank(rows, n)


@given(matrices)
@settings(max_examples=40, deadline=None)
def test_modp_rank_never_exceeds_rational_rank(rows):
    n = len(rows[0])
    M = SparseMatrix.from_dense(rows, n)
    assert linalg.rank(M, gf(P)) <= linalg.rank(M)
    A = np.array(rows, dtype=np.int64)
    assert len(modp.echelon(A % P, P)[1]) == linalg.rank(M, gf(P))


@given(matrices)
@settings(max_examples=40, deadline=None)
def test_golden_round_trip(rows):
    rows = [[Fraction(x, 3) for x in r] for r in rows]
    M = SparseMatrix.from_dense(rows, len(rows[0]))
    text = linalg.dumps_golden(M)
    M2, f = linalg.loads_golden(text)
    assert f == QQ
    assert linalg.dumps_golden(M2) == text
    assert M2.to_dense() == M.to_dense()


def test_golden_extension_round_trip(tmp_path):
    M = SparseMatrix.from_dense([[QSqrt(1, 2, 3), 0], [Fraction(1, 2), QSqrt(0, 1, 3)]], 2)
    path = tmp_path / "m.txt"
    linalg.write_golden(M, path)
    M2, f = linalg.read_golden(path)
    assert f == qq_sqrt(3)
    assert M2.to_dense() == M.to_dense()


def test_golden_errors():
    with pytest.raises(GoldenFormatError):
        linalg.loads_golden("")
    with pytest.raises(GoldenFormatError):
        linalg.loads_golden("2 2\n")
    with pytest.raises(GoldenFormatError):
        linalg.loads_golden("1 1 QQ\n3 0 1\n")


def test_extension_nullspace():
    s = QSqrt(0, 1, 3)
    M = SparseMatrix.from_dense([[1, s], [s, 3]], 2)
    ker = linalg.nullspace(M, qq_sqrt(3))
    assert len(ker) == 1
    assert all(x == 0 for x in M.apply(ker[0]))


def test_block_projection_rank():
    basis = [[1, 0, 2], [0, 1, 0]]
    assert linalg.block_projection_rank(basis, [2]) == 1
    assert linalg.block_projection_rank(basis, [0, 1]) == 2
    with pytest.raises(IndexOutOfRange):
        linalg.block_projection_rank(basis, [5])


def test_solve_particular():
    M = SparseMatrix.from_dense([[1, 1], [1, -1]], 2)
    assert linalg.solve_particular(M, [2, 0]) == [1, 1]
    assert linalg.solve_particular(SparseMatrix.from_dense([[1, 1], [1, 1]], 2), [1, 2]) is None


@given(st.integers(-1000, 1000), st.integers(1, 1000))
def test_rational_reconstruction(a, b):
    x = Fraction(a, b)
    r = rational_reconstruct(to_modp(x, P), P)
    assert r == x


def test_independent_subset():
    vecs = [[1, 0], [2, 0], [0, 1], [1, 1]]
    assert linalg.independent_subset(vecs) == [0, 2]
