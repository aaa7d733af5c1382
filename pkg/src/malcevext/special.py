"""Crossed, skew-crossed and bicrossed products as specialized unified products."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import MalcevAlgebra, check_malcev_eq3
from .conditions import CP_CONDITIONS, MP_CONDITIONS, SP_CONDITIONS
from .linalg import DimensionMismatch
from .report import VerificationReport
from .unified import ExtendingDatum, build_unified, run_conditions, verify_unified_direct


class FactorNotMalcev(ValueError):
    pass


def _check_factors(M: MalcevAlgebra, V: MalcevAlgebra) -> None:
    M.field.check_same(V.field)
    for name, A in (("M", M), ("V", V)):
        if not check_malcev_eq3(A).overall:
            raise FactorNotMalcev(f"factor {name} is not a Malcev algebra")


def _shape(arr, shape, name):
    if np.shape(arr) != shape:
        raise DimensionMismatch(f"{name} has shape {np.shape(arr)}, expected {shape}")


@dataclass(frozen=True, eq=False)
class CrossedSystem:
    M: MalcevAlgebra
    V: MalcevAlgebra
    tl: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        m, v = self.M.dim, self.V.dim
        _shape(self.tl, (m, v, m), "tl")
        _shape(self.omega, (v, v, m), "omega")

    def datum(self) -> ExtendingDatum:
        f, m, v = self.M.field, self.M.dim, self.V.dim
        return ExtendingDatum(self.M, self.V.names, self.tl, f.zeros((m, v, v)),
                              self.omega, self.V.table)


@dataclass(frozen=True, eq=False)
class SkewCrossedSystem:
    M: MalcevAlgebra
    V: MalcevAlgebra
    tr: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        m, v = self.M.dim, self.V.dim
        _shape(self.tr, (m, v, v), "tr")
        _shape(self.omega, (v, v, m), "omega")

    def datum(self) -> ExtendingDatum:
        f, m, v = self.M.field, self.M.dim, self.V.dim
        return ExtendingDatum(self.M, self.V.names, f.zeros((m, v, m)), self.tr,
                              self.omega, self.V.table)


@dataclass(frozen=True, eq=False)
class MatchedPairData:
    """``tr[i, a]`` = e_i |> v_a in V and ``tl[i, a]`` = e_i <| v_a in M."""

    M: MalcevAlgebra
    V: MalcevAlgebra
    tr: np.ndarray
    tl: np.ndarray

    def __post_init__(self):
        m, v = self.M.dim, self.V.dim
        _shape(self.tr, (m, v, v), "tr")
        _shape(self.tl, (m, v, m), "tl")

    def datum(self) -> ExtendingDatum:
        f, v = self.M.field, self.V.dim
        return ExtendingDatum(self.M, self.V.names, self.tl, self.tr,
                              f.zeros((v, v, self.M.dim)), self.V.table)


def _with_direct(d: ExtendingDatum, conds) -> VerificationReport:
    direct = verify_unified_direct(d)
    rep = run_conditions(d, conds, direct)
    rep.checks.extend(direct.checks)
    return rep


def crossed_product(cs: CrossedSystem) -> tuple[MalcevAlgebra, VerificationReport]:
    _check_factors(cs.M, cs.V)
    d = cs.datum()
    return build_unified(d), _with_direct(d, CP_CONDITIONS)


def skew_crossed_product(ss: SkewCrossedSystem) -> tuple[MalcevAlgebra, VerificationReport]:
    _check_factors(ss.M, ss.V)
    d = ss.datum()
    return build_unified(d), _with_direct(d, SP_CONDITIONS)


def bicrossed_product(mp: MatchedPairData) -> MalcevAlgebra:
    return build_unified(mp.datum())


def matched_pair_check(mp: MatchedPairData) -> VerificationReport:
    _check_factors(mp.M, mp.V)
    return _with_direct(mp.datum(), MP_CONDITIONS)
