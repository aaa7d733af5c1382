import numpy as np
import pytest
from hypothesis import given, strategies as st

from malcevext.algebra import MalcevAlgebra, check_malcev_eq3
from malcevext.field import GF
from malcevext.linalg import DimensionMismatch
from malcevext.reps import (Cocycle, ModuleAction, ModuleAxiomFailed, check_cocycle, check_module,
                            cocycle_extension, semidirect)
from malcevext.sampling import (characters, random_action, random_cocycle_candidate,
                                random_malcev, random_valid_module)

F = GF(5)


def test_zero_action_and_zero_cocycle(M4):
    act = ModuleAction.zero(M4, 2)
    assert check_module(M4, act).overall
    E = cocycle_extension(M4, act, Cocycle(F, F.zeros((4, 4, 2))))
    assert check_malcev_eq3(E).overall
    assert F.equal(E.table[:4, :4, :4], M4.table)


def test_adjoint_module_of_m4_needs_derived_reading(M4):
    act = ModuleAction.adjoint(M4)
    assert check_malcev_eq3(semidirect(M4, act)).overall
    assert check_module(M4, act, reading="derived").overall
    # the printed identity forces x|>(x|>(x|>q)) = 0, which ad(e1) violates
    rep = check_module(M4, act)
    assert not rep.overall
    assert rep["module"].witnesses[0].labels == ("e1", "e1", "e1", "e2'")


def test_cocycle_needs_module(M4):
    act = ModuleAction(np.ones((4, 1, 1), dtype=np.int64))
    if not check_module(M4, act).overall:
        with pytest.raises(ModuleAxiomFailed):
            check_cocycle(M4, act, Cocycle(F, F.zeros((4, 4, 1))))


def test_cocycle_shape_and_skew(M4):
    with pytest.raises(ValueError):
        Cocycle(F, np.ones((2, 2, 1), dtype=np.int64))
    with pytest.raises(DimensionMismatch):
        check_cocycle(M4, ModuleAction.zero(M4, 1), Cocycle(F, F.zeros((3, 3, 1))))


def test_characters_of_m4(M4):
    assert [c.tolist() for c in characters(M4)] == [[0, 0, 0, 0]]
    derived = characters(M4, reading="derived")
    # lambda must vanish on [M4, M4] = span(e2, e3, e4)
    assert sorted(int(c[0]) for c in derived) == [0, 1, 2, 3, 4]
    assert all(int(c[1]) == int(c[2]) == int(c[3]) == 0 for c in derived)


@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 2))
def test_derived_module_reading_is_exact(seed, m, v):
    rng = np.random.default_rng(seed)
    A = random_malcev(F, rng, m)
    act = random_action(A, rng, v, density=0.4)
    assert check_module(A, act, reading="derived").overall == \
        check_malcev_eq3(semidirect(A, act)).overall


@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 2))
def test_module_implies_malcev_semidirect(seed, m, v):
    rng = np.random.default_rng(seed)
    A = random_malcev(F, rng, m)
    act = random_action(A, rng, v, density=0.4)
    if check_module(A, act).overall:
        assert check_malcev_eq3(semidirect(A, act)).overall


@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 2))
def test_cocycle_iff_malcev(seed, m, v):
    rng = np.random.default_rng(seed)
    A = random_malcev(F, rng, m)
    act = random_valid_module(A, rng, v)
    w = random_cocycle_candidate(A, rng, v)
    assert check_cocycle(A, act, w).overall == check_malcev_eq3(cocycle_extension(A, act, w)).overall
