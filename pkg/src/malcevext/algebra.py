"""Anticommutative algebras by structure constants and the Malcev identities."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .field import Field
from .linalg import DimensionMismatch
from .report import Check, VerificationReport, compare
from .tuples import Tuples, bil


class AlgebraError(ValueError):
    pass


def default_names(n: int, prefix: str = "e") -> tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(n))


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class MalcevAlgebra:
    """Finite-dimensional anticommutative algebra.

    ``table[i, j]`` holds the coordinates of ``[e_i, e_j]``. Only pairs
    ``i < j`` are free data; the constructor rejects tables that are not
    alternating. Despite the name, the Malcev identity itself is not
    enforced here; use :func:`check_malcev_eq3`.
    """

    field: Field
    names: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        t = self.field.reduce(np.asarray(self.table))
        n = len(self.names)
        if n < 1:
            raise AlgebraError("algebra needs a positive dimension")
        if len(set(self.names)) != n:
            raise AlgebraError(f"basis names not distinct: {self.names}")
        if t.shape != (n, n, n):
            raise DimensionMismatch(f"table shape {t.shape} does not match dim {n}")
        if not self.field.all_zero(t + t.transpose(1, 0, 2)):
            raise AlgebraError("structure constants are not anticommutative")
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "table", _freeze(t))

    @classmethod
    def from_brackets(
        cls,
        field: Field,
        names: Sequence[str] | int,
        brackets: Mapping[tuple, Sequence] | None = None,
    ) -> "MalcevAlgebra":
        """Build from ``{(i, j): coords}`` for i != j (indices or names)."""
        if isinstance(names, int):
            names = default_names(names)
        names = tuple(names)
        n = len(names)
        pos = {nm: k for k, nm in enumerate(names)}
        t = field.zeros((n, n, n))
        seen = set()
        for (a, b), coords in (brackets or {}).items():
            i = pos[a] if isinstance(a, str) else int(a)
            j = pos[b] if isinstance(b, str) else int(b)
            if i == j:
                raise AlgebraError(f"diagonal bracket [{names[i]},{names[j]}] must vanish")
            if frozenset((i, j)) in seen:
                raise AlgebraError(f"pair [{names[i]},{names[j]}] given twice")
            seen.add(frozenset((i, j)))
            v = field.array(coords)
            if v.shape != (n,):
                raise DimensionMismatch(f"bracket value has shape {v.shape}, expected ({n},)")
            t[i, j] = v
            t[j, i] = field.neg(v)
        return cls(field, names, t)

    @classmethod
    def abelian(cls, field: Field, n: int, names: Sequence[str] | None = None) -> "MalcevAlgebra":
        return cls(field, tuple(names) if names else default_names(n), field.zeros((n, n, n)))

    @property
    def dim(self) -> int:
        return len(self.names)

    def e(self, i: int) -> np.ndarray:
        return self.field.unit(self.dim, i)

    def vector(self, coords) -> np.ndarray:
        v = self.field.array(coords)
        if v.shape != (self.dim,):
            raise DimensionMismatch(f"expected {self.dim} coordinates, got {v.shape}")
        return v

    def same_as(self, other: "MalcevAlgebra") -> bool:
        return (
            self.field == other.field
            and self.dim == other.dim
            and self.field.equal(self.table, other.table)
        )

    def upper_entries(self) -> dict[tuple[int, int], np.ndarray]:
        """Nonzero brackets ``[e_i, e_j]`` with ``i < j``."""
        out = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                if not self.field.all_zero(self.table[i, j]):
                    out[(i, j)] = self.table[i, j]
        return out

    def __repr__(self):
        return f"MalcevAlgebra({self.field!r}, dim={self.dim}, names={self.names})"


def block_algebra(
    field: Field,
    names_m: Sequence[str],
    names_v: Sequence[str],
    mm: np.ndarray,
    mv: np.ndarray,
    vv: np.ndarray,
) -> MalcevAlgebra:
    """Algebra on M + V from its three bracket blocks.

    ``mm[i, j]``, ``mv[i, a]`` and ``vv[a, b]`` are coordinates in the
    concatenated basis of ``[x_i, y_j]``, ``[x_i, v_a]`` and ``[v_a, v_b]``.
    """
    m, v = len(names_m), len(names_v)
    n = m + v
    t = field.zeros((n, n, n))
    t[:m, :m] = mm
    t[:m, m:] = mv
    t[m:, :m] = field.neg(np.asarray(mv).transpose(1, 0, 2))
    t[m:, m:] = vv
    return MalcevAlgebra(field, tuple(names_m) + tuple(names_v), t)


def _check_vec(A: MalcevAlgebra, *vs) -> list[np.ndarray]:
    out = []
    for v in vs:
        v = np.asarray(v)
        if v.shape != (A.dim,):
            raise DimensionMismatch(f"vector of shape {v.shape} in algebra of dim {A.dim}")
        out.append(A.field.reduce(v) if v.dtype != object else A.field.array(v))
    return out


def bracket(A: MalcevAlgebra, x, y) -> np.ndarray:
    x, y = _check_vec(A, x, y)
    return bil(A.field, x, y, A.table)


def jacobiator(A: MalcevAlgebra, x, y, z) -> np.ndarray:
    x, y, z = _check_vec(A, x, y, z)
    return _jac(A.field, A.table, x, y, z)


def _jac(f: Field, C, x, y, z):
    def br(a, b):
        return bil(f, a, b, C)

    return f.reduce(br(br(x, y), z) + br(br(y, z), x) + br(br(z, x), y))


def _labels(A: MalcevAlgebra, k: int) -> list[list[str]]:
    return [list(A.names)] * k


def check_anticommutative(A: MalcevAlgebra) -> Check:
    """Always passes for a constructed algebra; kept for report completeness."""
    t = A.table
    return compare(A.field, "anticommutative", t, A.field.neg(t.transpose(1, 0, 2)),
                   _labels(A, 2))


def eq2_residual_checks(A: MalcevAlgebra) -> list[Check]:
    f, C, n = A.field, A.table, A.dim

    def br(a, b):
        return bil(f, a, b, C)

    x, y, z = Tuples(f, (n, n, n)).vars()
    lhs = _jac(f, C, x, y, br(x, z))
    rhs = br(_jac(f, C, x, y, z), x)
    diag = compare(f, "eq2", lhs, rhs, _labels(A, 3))
    # eq2 is quadratic in x, so basis triples alone do not decide it:
    # also check its polarization in x (variables x, w, y, z).
    x, w, y, z = Tuples(f, (n, n, n, n)).vars()
    lhs = f.reduce(_jac(f, C, x, y, br(w, z)) + _jac(f, C, w, y, br(x, z)))
    rhs = f.reduce(br(_jac(f, C, x, y, z), w) + br(_jac(f, C, w, y, z), x))
    pol = compare(f, "eq2_polarized", lhs, rhs, _labels(A, 4))
    return [diag, pol]


def check_malcev_eq2(A: MalcevAlgebra) -> VerificationReport:
    """J(x,y,[x,z]) = [J(x,y,z), x] for all x, y, z."""
    return VerificationReport(A.field, eq2_residual_checks(A))


def eq3_sides(f: Field, C: np.ndarray):
    n = C.shape[0]

    def br(a, b):
        return bil(f, a, b, C)

    x, y, z, w = Tuples(f, (n, n, n, n)).vars()
    lhs = br(br(x, z), br(y, w))
    rhs = f.reduce(
        br(br(br(x, y), z), w)
        + br(br(br(y, z), w), x)
        + br(br(br(z, w), x), y)
        + br(br(br(w, x), y), z)
    )
    return lhs, rhs


def check_malcev_eq3(A: MalcevAlgebra) -> VerificationReport:
    """Four-variable form [[x,z],[y,w]] = [[[x,y],z],w] + cyclic, on basis quadruples."""
    lhs, rhs = eq3_sides(A.field, A.table)
    return VerificationReport(A.field, [compare(A.field, "eq3", lhs, rhs, _labels(A, 4))])


def is_lie(A: MalcevAlgebra) -> bool:
    n = A.dim
    x, y, z = Tuples(A.field, (n, n, n)).vars()
    return A.field.all_zero(_jac(A.field, A.table, x, y, z))


def jacobi_check(A: MalcevAlgebra) -> Check:
    n = A.dim
    x, y, z = Tuples(A.field, (n, n, n)).vars()
    J = _jac(A.field, A.table, x, y, z)
    return compare(A.field, "jacobi", J, A.field.zeros(J.shape), _labels(A, 3))


def check_algebra(A: MalcevAlgebra) -> VerificationReport:
    """Everything ``check FILE`` reports: anticommutativity, eq2, eq3 and Lie."""
    rep = VerificationReport(A.field, [check_anticommutative(A)])
    rep.checks.extend(eq2_residual_checks(A))
    rep.extend(check_malcev_eq3(A))
    lie = jacobi_check(A)
    rep.extras["lie"] = lie.passed
    rep.extras["malcev"] = rep.overall
    rep.extras["jacobi_failures"] = lie.failures
    return rep
