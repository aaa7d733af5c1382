"""Left modules, semidirect products and 2-cocycle extensions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import MalcevAlgebra, block_algebra, default_names
from .field import Field
from .linalg import DimensionMismatch
from .report import VerificationReport, compare
from .tuples import Tuples, bil


class ModuleAxiomFailed(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ModuleAction:
    """``rho[i, a]`` = coordinates of ``e_i |> v_a`` in V."""

    rho: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        rho = np.asarray(self.rho)
        if rho.ndim != 3 or rho.shape[1] != rho.shape[2]:
            raise DimensionMismatch(f"action tensor must be (dimM, dimV, dimV), got {rho.shape}")
        if not self.names:
            object.__setattr__(self, "names", default_names(rho.shape[1], "v"))
        elif len(self.names) != rho.shape[1]:
            raise DimensionMismatch("module basis names do not match dim V")
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def carrier_dim(self) -> int:
        return self.rho.shape[1]

    @classmethod
    def zero(cls, A: MalcevAlgebra, dim_v: int, names: Sequence[str] = ()) -> "ModuleAction":
        return cls(A.field.zeros((A.dim, dim_v, dim_v)), tuple(names))

    @classmethod
    def adjoint(cls, A: MalcevAlgebra) -> "ModuleAction":
        return cls(A.table, tuple(f"{nm}'" for nm in A.names))


@dataclass(frozen=True, eq=False)
class Cocycle:
    """Skew ``omega[i, j]`` = coordinates of omega(e_i, e_j) in V."""

    field: Field
    omega: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omega)
        if w.ndim != 3 or w.shape[0] != w.shape[1]:
            raise DimensionMismatch(f"cocycle tensor must be (dimM, dimM, dimV), got {w.shape}")
        if not self.field.all_zero(w + w.transpose(1, 0, 2)):
            raise ValueError("cocycle is not skew-symmetric")

    @classmethod
    def from_upper(cls, field, dim_m: int, dim_v: int, entries: dict) -> "Cocycle":
        w = field.zeros((dim_m, dim_m, dim_v))
        for (i, j), coords in entries.items():
            if i == j:
                raise ValueError("cocycle is skew; diagonal entries must vanish")
            vec = field.array(coords)
            w[i, j] = vec
            w[j, i] = field.neg(vec)
        return cls(field, w)


def _compat(A: MalcevAlgebra, act: ModuleAction) -> None:
    if act.rho.shape[0] != A.dim:
        raise DimensionMismatch(f"action defined on dim {act.rho.shape[0]}, algebra has {A.dim}")


def check_module(A: MalcevAlgebra, act: ModuleAction, *,
                 reading: str = "printed") -> VerificationReport:
    """[x,z]|>(y|>q) = [[x,y],z]|>q - x|>([y,z]|>q) + z|>(y|>(x|>q)).

    ``reading="derived"`` checks instead the identity the semidirect
    product actually needs (its Malcev identity with one argument in V),
    which has the extra term y|>(x|>(z|>q)) and the last term negated.
    The printed form is strictly stronger: the adjoint module of a
    non-Lie Malcev algebra can fail it.
    """
    if reading not in ("printed", "derived"):
        raise ValueError(f"unknown reading {reading!r}")
    _compat(A, act)
    f, C, R = A.field, A.table, act.rho
    m, v = A.dim, act.carrier_dim

    def br(a, b):
        return bil(f, a, b, C)

    def tr(a, q):
        return bil(f, a, q, R)

    x, y, z, q = Tuples(f, (m, m, m, v)).vars()
    lhs = tr(br(x, z), tr(y, q))
    rhs = tr(br(br(x, y), z), q) - tr(x, tr(br(y, z), q))
    if reading == "printed":
        rhs = f.reduce(rhs + tr(z, tr(y, tr(x, q))))
    else:
        rhs = f.reduce(rhs + tr(y, tr(x, tr(z, q))) - tr(z, tr(y, tr(x, q))))
    labels = [list(A.names)] * 3 + [list(act.names)]
    return VerificationReport(f, [compare(f, "module", lhs, rhs, labels, as_printed=reading == "printed",
                                          note="" if reading == "printed" else "derived reading")])


def semidirect(A: MalcevAlgebra, act: ModuleAction) -> MalcevAlgebra:
    """M + V with [(x,u),(y,v)] = ([x,y], x|>v - y|>u)."""
    _compat(A, act)
    f = A.field
    m, v = A.dim, act.carrier_dim
    mm = np.concatenate([A.table, f.zeros((m, m, v))], axis=2)
    mv = np.concatenate([f.zeros((m, v, m)), act.rho], axis=2)
    vv = f.zeros((v, v, m + v))
    return block_algebra(f, A.names, act.names, mm, mv, vv)


def _cocycle_compat(A: MalcevAlgebra, act: ModuleAction, w: Cocycle) -> None:
    _compat(A, act)
    if w.omega.shape != (A.dim, A.dim, act.carrier_dim):
        raise DimensionMismatch(f"cocycle shape {w.omega.shape} incompatible with "
                                f"dim M = {A.dim}, dim V = {act.carrier_dim}")


def cocycle_sides(A: MalcevAlgebra, act: ModuleAction, w: Cocycle):
    f, C, R, W = A.field, A.table, act.rho, w.omega
    m = A.dim

    def br(a, b):
        return bil(f, a, b, C)

    def tr(a, q):
        return bil(f, a, q, R)

    def om(a, b):
        return bil(f, a, b, W)

    x, y, z, t = Tuples(f, (m, m, m, m)).vars()
    lhs = f.reduce(om(br(x, z), br(y, t)) + tr(br(t, y), om(x, z)) + tr(br(x, z), om(y, t)))
    rhs = f.reduce(
        om(br(br(x, y), z), t) + om(br(br(y, z), t), x)
        + om(br(br(z, t), x), y) + om(br(br(t, x), y), z)
        + tr(x, tr(t, om(y, z))) - tr(x, om(br(y, z), t))
        + tr(z, tr(y, om(t, x))) - tr(z, om(br(t, x), y))
        + tr(t, tr(z, om(x, y))) - tr(t, om(br(x, y), z))
        + tr(y, tr(x, om(z, t))) - tr(y, om(br(z, t), x))
    )
    return lhs, rhs


def check_cocycle(A: MalcevAlgebra, act: ModuleAction, w: Cocycle) -> VerificationReport:
    """The 2-cocycle identity on basis quadruples; requires a valid module."""
    _cocycle_compat(A, act, w)
    mod = check_module(A, act)
    if not mod.overall:
        raise ModuleAxiomFailed("action does not satisfy the module identity")
    lhs, rhs = cocycle_sides(A, act, w)
    labels = [list(A.names)] * 4
    return VerificationReport(A.field, [compare(A.field, "cocycle", lhs, rhs, labels)])


def cocycle_extension(A: MalcevAlgebra, act: ModuleAction, w: Cocycle) -> MalcevAlgebra:
    """M + V with [(x,u),(y,v)] = ([x,y], x|>v - y|>u + omega(x,y))."""
    _cocycle_compat(A, act, w)
    f = A.field
    m, v = A.dim, act.carrier_dim
    mm = np.concatenate([A.table, w.omega], axis=2)
    mv = np.concatenate([f.zeros((m, v, m)), act.rho], axis=2)
    vv = f.zeros((v, v, m + v))
    return block_algebra(f, A.names, act.names, mm, mv, vv)
