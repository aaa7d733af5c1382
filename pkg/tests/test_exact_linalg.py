from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from malcevext.field import GF, QQ, BadFieldChar, DivisionByZero, FieldError, FieldMismatch, Scalar
from malcevext.linalg import (DimensionMismatch, Singular, invert, is_invertible, nullspace,
                              rank, rref, solve_linear)

F7 = GF(7)


def test_gf_rejects_small_and_composite():
    with pytest.raises(BadFieldChar):
        GF(3)
    with pytest.raises(BadFieldChar):
        GF(2)
    with pytest.raises(FieldError):
        GF(9)
    with pytest.raises(FieldError):
        GF(1 << 21 | 1)


def test_scalar_arithmetic_and_formatting():
    a = Scalar(QQ, Fraction(1, 2)) + Scalar(QQ, Fraction(1, 3))
    assert a == Scalar(QQ, Fraction(5, 6))
    b = Scalar(F7, 3) / Scalar(F7, 5)
    assert (b * Scalar(F7, 5)) == Scalar(F7, 3)
    assert str(Scalar(F7, 11)) == "4 mod 7"
    assert str(Scalar(QQ, Fraction(-2, 3))) == "-2/3"
    with pytest.raises(DivisionByZero):
        Scalar(F7, 0).inverse()
    with pytest.raises(FieldMismatch):
        Scalar(F7, 1) + Scalar(GF(5), 1)


def test_fraction_literal_mod_p():
    assert F7.parse("1/2") == 4
    with pytest.raises(DivisionByZero):
        F7.coerce(Fraction(1, 7))


def test_rref_and_rank_over_qq():
    A = QQ.array([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    R, piv = rref(QQ, A)
    assert piv == [0, 1]
    assert rank(QQ, A) == 2
    assert R[0, 0] == 1 and R[1, 1] == 1


def test_solve_linear_inconsistent_and_kernel():
    A = QQ.array([[1, 1], [2, 2]])
    sol = solve_linear(QQ, A, QQ.array([1, 3]))
    assert not sol.consistent
    sol = solve_linear(QQ, A, QQ.array([1, 2]))
    assert sol.consistent and len(sol.kernel_basis) == 1
    with pytest.raises(DimensionMismatch):
        solve_linear(QQ, A, QQ.array([1, 2, 3]))


def test_singular_inverse():
    with pytest.raises(Singular):
        invert(F7, np.array([[1, 2], [2, 4]]))
    assert not is_invertible(F7, np.array([[1, 2], [2, 4]]))


mats = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.integers(-6, 6), min_size=n * n, max_size=n * n).map(
        lambda xs: np.array(xs, dtype=np.int64).reshape(n, n)))


@given(mats)
def test_inverse_roundtrip_gf7(A):
    A = F7.reduce(A)
    if is_invertible(F7, A):
        assert F7.equal(F7.matmul(A, invert(F7, A)), F7.identity(len(A)))
    else:
        assert rank(F7, A) < len(A)


@given(mats)
def test_inverse_roundtrip_qq(A):
    Aq = QQ.array(A)
    if is_invertible(QQ, Aq):
        assert QQ.equal(QQ.matmul(invert(QQ, Aq), Aq), QQ.identity(len(A)))


@given(mats)
def test_nullspace_is_annihilated_and_rank_nullity(A):
    A = F7.reduce(A)
    ker = nullspace(F7, A)
    for k in ker:
        assert F7.all_zero(F7.matmul(A, k))
    assert len(ker) + rank(F7, A) == A.shape[1]


@given(mats, st.lists(st.integers(0, 6), min_size=4, max_size=4))
def test_solution_satisfies_system(A, b):
    n = len(A)
    b = np.array(b[:n], dtype=np.int64)
    sol = solve_linear(F7, A, b)
    if sol.consistent:
        assert F7.equal(F7.matmul(F7.reduce(A), sol.particular), b)


_fracs = st.fractions(min_value=-10 ** 12, max_value=10 ** 12, max_denominator=10 ** 6)


@given(st.lists(_fracs, min_size=6, max_size=6), st.lists(_fracs, min_size=12, max_size=12))
def test_rational_einsum_matches_fraction_arithmetic(xs, ys):
    a = QQ.array(np.array(xs, dtype=object).reshape(2, 3))
    b = QQ.array(np.array(ys, dtype=object).reshape(3, 4))
    want = np.einsum("ij,jk->ik", a, b)
    assert QQ.equal(QQ.einsum("ij,jk->ik", a, b), want)
    assert QQ.equal(QQ.matmul(a, b), want)
    assert QQ.matmul(a[0], b[:, 0]) == sum(x * y for x, y in zip(a[0], b[:, 0]))
