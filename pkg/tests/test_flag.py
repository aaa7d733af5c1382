import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from malcevext.algebra import MalcevAlgebra, check_malcev_eq3
from malcevext.field import GF
from malcevext.flag import (FAMILIES, LambdaInvalid, TwistedDerivation, check_twisted_derivation,
                            enumerate_all, flag_equiv, flag_product, lambda_ok, manufacture,
                            solve_twisted)
from malcevext.linalg import DimensionMismatch
from malcevext.sampling import random_malcev
from malcevext.unified import Projection, extract_datum

F5, F7 = GF(5), GF(7)


def extraction_instance(M4):
    """M = span{e1, e2, e4} inside M4 and u = e3."""
    d = extract_datum(Projection(M4, (0, 1, 3)))
    lam = d.tr[:, 0, 0]
    D = d.tl[:, 0, :]
    return d.M, TwistedDerivation(lam, D)


def test_extraction_instance_shape(M4):
    M, td = extraction_instance(M4)
    assert M.names == ("e1", "e2", "e4")
    assert td.lam.tolist() == [1, 0, 0]
    assert td.D.tolist() == [[0, 0, 0], [0, 0, 1], [0, 0, 0]]
    assert check_malcev_eq3(flag_product(M, td)).overall


def test_printed_t1_rejects_extraction_instance(M4):
    M, td = extraction_instance(M4)
    rep = check_twisted_derivation(M, td)
    assert rep.failed() == ["T1"]
    w = rep["T1"].witnesses[0]
    assert w.labels == ("e1", "e1", "e2")
    assert (F5.reduce(w.lhs - w.rhs)).tolist() == [0, 0, 2]
    assert rep.extras["direct"] and not rep.extras["agree"]
    assert rep.extras["triage"][0].condition_id == "T1"

    der = check_twisted_derivation(M, td, reading="derived")
    assert der.overall and der.extras["agree"]
    assert not der["T1"].as_printed


@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_derived_reading_matches_direct(seed, n):
    rng = np.random.default_rng(seed)
    M = random_malcev(F5, rng, n)
    td = TwistedDerivation(F5.random(rng, n, 0.5), F5.random(rng, (n, n), 0.4))
    rep = check_twisted_derivation(M, td, reading="derived")
    assert rep.extras["agree"] and rep.extras["kernel_agrees"]


@pytest.mark.parametrize("k", [1, 2, 3])
def test_t6_rules_out_lambda_on_derived_algebra(M4, k):
    lam = np.zeros(4, dtype=np.int64)
    lam[k] = 1
    assert not lambda_ok(M4, lam)
    rep = check_twisted_derivation(M4, TwistedDerivation(lam, np.zeros((4, 4), dtype=np.int64)))
    assert ("e1", M4.names[k], "e1") in [w.labels for w in rep["T6"].witnesses]
    with pytest.raises(LambdaInvalid):
        solve_twisted(M4, lam)


def test_non_strict_solver_still_samples_families(M4):
    lam = [0, 1, 0, 0]
    res = solve_twisted(M4, lam, strict_lambda=False, samples=5)
    assert not res.lambda_valid and res.solutions == []
    assert {s.family for s in res.family_checks} == {"D1"}
    assert len(res.family_checks) == 5
    for s in res.family_checks:
        assert "T6" in s.failed and not s.direct and s.conditions == s.direct


def test_family_shapes():
    assert {n: f.lam_index for n, f in FAMILIES.items()} == {
        "D1": 1, "D21": 2, "D22": 2, "D23": 2, "D24": 2, "D31": 3, "D32": 3}


def test_solver_matches_brute_force():
    M = MalcevAlgebra.from_brackets(F5, 2, {(0, 1): [0, 1]})
    for lam in itertools.product(range(5), repeat=2):
        brute = {tuple(D.reshape(-1)) for D in enumerate_all(M, lam)}
        if not lambda_ok(M, lam):
            assert not brute
            continue
        res = solve_twisted(M, lam)
        assert {tuple(td.D.reshape(-1)) for td in res.solutions} == brute


def test_solver_on_m4_lambda_e1(M4):
    res = solve_twisted(M4, [1, 0, 0, 0], samples=0)
    assert res.linear_dim == 4
    assert len(res.solutions) == 5 ** 4
    for td in res.solutions[::37]:
        assert check_malcev_eq3(flag_product(M4, td)).overall


@given(st.integers(0, 10 ** 6))
def test_manufactured_derivation_is_equivalent(seed):
    rng = np.random.default_rng(seed)
    M = random_malcev(F7, rng, 3)
    td = TwistedDerivation(F7.random(rng, 3, 0.5), F7.random(rng, (3, 3), 0.5))
    r = F7.random(rng, 3)
    td2 = manufacture(M, td, r)
    res = flag_equiv(M, td, td2)
    assert res
    assert F7.equal(manufacture(M, td, res.r).D, td2.D)


def test_flag_equiv_needs_same_lambda(M4):
    a = TwistedDerivation.zero(M4)
    b = TwistedDerivation(np.array([1, 0, 0, 0]), np.zeros((4, 4), dtype=np.int64))
    assert not flag_equiv(M4, a, b)


def test_dimension_checks(M4):
    with pytest.raises(DimensionMismatch):
        check_twisted_derivation(M4, TwistedDerivation(np.zeros(3), np.zeros((4, 4))))
    with pytest.raises(DimensionMismatch):
        solve_twisted(M4, [1, 0, 0])
