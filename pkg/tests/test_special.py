import numpy as np
import pytest
from hypothesis import given, strategies as st

from malcevext.algebra import MalcevAlgebra
from malcevext.field import GF
from malcevext.linalg import DimensionMismatch
from malcevext.sampling import random_anticommutative, random_malcev, skew_tensor
from malcevext.special import (CrossedSystem, FactorNotMalcev, MatchedPairData, SkewCrossedSystem,
                               bicrossed_product, crossed_product, matched_pair_check,
                               skew_crossed_product)
from malcevext.unified import build_unified
from malcevext.kernels import malcev_ok

F = GF(5)


def _factors(rng, m, v):
    M = random_malcev(F, rng, m)
    V = random_malcev(F, rng, v)
    return M, V.__class__(F, tuple(f"v{a + 1}" for a in range(v)), V.table)


def _direct_sum_table(M, V):
    m, v = M.dim, V.dim
    T = F.zeros((m + v, m + v, m + v))
    T[:m, :m, :m] = M.table
    T[m:, m:, m:] = V.table
    return T


@given(st.integers(0, 10 ** 6), st.integers(1, 2), st.integers(1, 2))
def test_specializations_match_unified(seed, m, v):
    rng = np.random.default_rng(seed)
    M, V = _factors(rng, m, v)
    cs = CrossedSystem(M, V, F.random(rng, (m, v, m), 0.3), skew_tensor(F, rng, v, m))
    E, rep = crossed_product(cs)
    assert F.equal(E.table, build_unified(cs.datum()).table)
    assert rep["eq3"].passed == malcev_ok(E.table, 5)

    ss = SkewCrossedSystem(M, V, F.random(rng, (m, v, v), 0.3), skew_tensor(F, rng, v, m))
    E, rep = skew_crossed_product(ss)
    assert F.equal(E.table, build_unified(ss.datum()).table)
    assert F.all_zero(ss.datum().tl)

    mp = MatchedPairData(M, V, F.random(rng, (m, v, v), 0.3), F.random(rng, (m, v, m), 0.3))
    E = bicrossed_product(mp)
    assert F.equal(E.table, build_unified(mp.datum()).table)
    rep = matched_pair_check(mp)
    assert rep.extras["direct"] == malcev_ok(E.table, 5)


@given(st.integers(0, 10 ** 6))
def test_zero_maps_give_direct_sums(seed):
    rng = np.random.default_rng(seed)
    M, V = _factors(rng, 2, 2)
    want = _direct_sum_table(M, V)
    E, rep = crossed_product(CrossedSystem(M, V, F.zeros((2, 2, 2)), F.zeros((2, 2, 2))))
    assert F.equal(E.table, want) and rep.overall
    E, rep = skew_crossed_product(SkewCrossedSystem(M, V, F.zeros((2, 2, 2)), F.zeros((2, 2, 2))))
    assert F.equal(E.table, want) and rep.overall
    mp = MatchedPairData(M, V, F.zeros((2, 2, 2)), F.zeros((2, 2, 2)))
    assert F.equal(bicrossed_product(mp).table, want)
    assert matched_pair_check(mp).overall


def test_crossed_conditions_are_exact_components():
    rng = np.random.default_rng(7)
    for _ in range(40):
        M, V = _factors(rng, 2, 2)
        cs = CrossedSystem(M, V, F.random(rng, (2, 2, 2), 0.3), skew_tensor(F, rng, 2, 2))
        _, rep = crossed_product(cs)
        assert rep.extras["agree"]
        assert not [t for t in rep.extras["triage"] if t.kind == "residual_differs"]


def test_factor_not_malcev():
    rng = np.random.default_rng(0)
    while True:
        bad = random_anticommutative(F, rng, 3, 0.9)
        if not malcev_ok(bad.table, 5):
            break
    V = MalcevAlgebra.abelian(F, 1, ("v",))
    with pytest.raises(FactorNotMalcev):
        crossed_product(CrossedSystem(bad, V, F.zeros((3, 1, 3)), F.zeros((1, 1, 3))))
    with pytest.raises(FactorNotMalcev):
        matched_pair_check(MatchedPairData(V, MalcevAlgebra(F, ("a", "b", "c"), bad.table),
                                           F.zeros((1, 3, 3)), F.zeros((1, 3, 1))))


def test_shape_errors(M4):
    V = MalcevAlgebra.abelian(F, 1, ("v",))
    with pytest.raises(DimensionMismatch):
        CrossedSystem(M4, V, F.zeros((4, 1, 3)), F.zeros((1, 1, 4)))
    with pytest.raises(DimensionMismatch):
        SkewCrossedSystem(M4, V, F.zeros((4, 2, 2)), F.zeros((1, 1, 4)))
