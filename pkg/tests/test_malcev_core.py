import numpy as np
import pytest
from hypothesis import given, strategies as st

from malcevext import kernels
from malcevext.algebra import (AlgebraError, MalcevAlgebra, bracket, check_algebra,
                               check_malcev_eq2, check_malcev_eq3, is_lie, jacobiator)
from malcevext.field import GF, QQ
from malcevext.sampling import m4, random_anticommutative


def test_m4_is_malcev_not_lie(M4q):
    rep = check_algebra(M4q)
    assert rep["anticommutative"].passed
    assert rep["eq2"].passed and rep["eq2_polarized"].passed and rep["eq3"].passed
    assert rep.extras["lie"] is False
    assert not is_lie(M4q)


def test_m4_jacobiator_value(M4q):
    e = M4q.e
    assert QQ.equal(jacobiator(M4q, e(0), e(1), e(2)), QQ.array([0, 0, 0, 3]))


def test_bracket_row_convention(M4q):
    # [e1, e4] = -e4 and [e4, e1] = e4
    assert QQ.equal(bracket(M4q, M4q.e(0), M4q.e(3)), QQ.array([0, 0, 0, -1]))
    assert QQ.equal(bracket(M4q, M4q.e(3), M4q.e(0)), QQ.array([0, 0, 0, 1]))


def test_lie_algebras_pass():
    # sl2: [h,e]=2e, [h,f]=-2f, [e,f]=h
    sl2 = MalcevAlgebra.from_brackets(QQ, ("h", "e", "f"), {(0, 1): [0, 2, 0], (0, 2): [0, 0, -2],
                                                           (1, 2): [1, 0, 0]})
    assert is_lie(sl2)
    assert check_malcev_eq3(sl2).overall


def test_non_malcev_gives_quadruple_witness():
    A = MalcevAlgebra.from_brackets(QQ, 3, {(0, 1): [0, 0, 1], (0, 2): [1, 0, 0],
                                           (1, 2): [0, 1, 0]})
    rep = check_malcev_eq3(A)
    if not rep.overall:
        w = rep["eq3"].witnesses[0]
        assert len(w.labels) == 4 and not QQ.equal(w.lhs, w.rhs)


def test_table_must_be_skew():
    t = np.zeros((2, 2, 2), dtype=np.int64)
    t[0, 1, 1] = 1
    with pytest.raises(AlgebraError):
        MalcevAlgebra(GF(5), ("a", "b"), t)


def test_abelian_is_lie():
    A = MalcevAlgebra.abelian(GF(7), 3)
    assert check_algebra(A).overall and is_lie(A)


@given(st.integers(0, 10 ** 6), st.sampled_from([5, 7]), st.integers(1, 4))
def test_eq2_and_eq3_verdicts_agree(seed, p, n):
    A = random_anticommutative(GF(p), np.random.default_rng(seed), n, density=0.4)
    assert check_malcev_eq2(A).overall == check_malcev_eq3(A).overall


@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_kernel_matches_generic_engine(seed, n):
    A = random_anticommutative(GF(5), np.random.default_rng(seed), n, density=0.4)
    want = check_malcev_eq3(A).overall
    assert kernels.malcev_ok(A.table, 5, use_numba=False) == want
    if kernels.HAVE_NUMBA:
        assert kernels.malcev_ok(A.table, 5, use_numba=True) == want


def test_kernel_mask_parallel_matches_serial(rng):
    Cs = np.stack([random_anticommutative(GF(5), rng, 4, 0.4).table for _ in range(300)])
    ref = kernels.malcev_mask(Cs, 5, use_numba=False)
    if kernels.HAVE_NUMBA:
        assert np.array_equal(ref, kernels.malcev_mask(Cs, 5, use_numba=True))
        assert np.array_equal(ref, kernels.malcev_mask(Cs, 5, use_numba=True, parallel=True))
    assert ref.any() and not ref.all()


def test_numba_can_be_disabled_by_env():
    import subprocess
    import sys

    code = "from malcevext import kernels; print(kernels.backend())"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={**__import__("os").environ, "MALCEVEXT_NO_NUMBA": "1"})
    assert out.stdout.strip() == "numpy"


def test_m4_over_gf5_same_verdict():
    assert check_algebra(m4(GF(5))).overall
