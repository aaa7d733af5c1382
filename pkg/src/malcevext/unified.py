"""Extending data, unified products, and datum extraction from a projection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import MalcevAlgebra, block_algebra, default_names
from .field import Field
from .linalg import DimensionMismatch, Singular, invert, rank
from .report import VerificationReport
from .tuples import bil


class NotASubalgebra(ValueError):
    pass


class NotIdempotent(ValueError):
    pass


class NotMalcev(ValueError):
    pass


def _skew(field: Field, t: np.ndarray) -> bool:
    return field.all_zero(t + t.transpose(1, 0, 2))


@dataclass(frozen=True, eq=False)
class ExtendingDatum:
    """The four maps defining a bracket on M + V.

    ``tl[i, a]`` (in M) is ``e_i <| v_a``, ``tr[i, a]`` (in V) is
    ``e_i |> v_a``, ``omega[a, b]`` (in M) and ``bv[a, b]`` (in V) are skew
    in ``a, b``.
    """

    M: MalcevAlgebra
    names_v: tuple[str, ...]
    tl: np.ndarray
    tr: np.ndarray
    omega: np.ndarray
    bv: np.ndarray

    def __post_init__(self):
        f = self.M.field
        m, v = self.M.dim, len(self.names_v)
        if v < 1:
            raise DimensionMismatch("dim V must be positive")
        shapes = {"tl": (m, v, m), "tr": (m, v, v), "omega": (v, v, m), "bv": (v, v, v)}
        for name, shape in shapes.items():
            arr = f.reduce(np.asarray(getattr(self, name)))
            if arr.shape != shape:
                raise DimensionMismatch(f"{name} has shape {arr.shape}, expected {shape}")
            arr = np.array(arr, copy=True)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        for name in ("omega", "bv"):
            if not _skew(f, getattr(self, name)):
                raise ValueError(f"{name} must be skew-symmetric")
        if set(self.names_v) & set(self.M.names) or len(set(self.names_v)) != v:
            raise ValueError("V basis names must be distinct and disjoint from M's")
        object.__setattr__(self, "names_v", tuple(self.names_v))

    @property
    def field(self) -> Field:
        return self.M.field

    @property
    def dim_v(self) -> int:
        return len(self.names_v)

    @classmethod
    def zero(cls, M: MalcevAlgebra, dim_v: int, names_v: Sequence[str] | None = None,
             bv: np.ndarray | None = None) -> "ExtendingDatum":
        f = M.field
        m, v = M.dim, dim_v
        names_v = tuple(names_v) if names_v else default_names(v, "v")
        return cls(M, names_v, f.zeros((m, v, m)), f.zeros((m, v, v)), f.zeros((v, v, m)),
                   f.zeros((v, v, v)) if bv is None else bv)

    def replace(self, **kw) -> "ExtendingDatum":
        vals = dict(M=self.M, names_v=self.names_v, tl=self.tl, tr=self.tr,
                    omega=self.omega, bv=self.bv)
        vals.update(kw)
        return ExtendingDatum(**vals)

    def same_as(self, other: "ExtendingDatum") -> bool:
        f = self.field
        return (self.M.same_as(other.M) and self.dim_v == other.dim_v
                and all(f.equal(getattr(self, k), getattr(other, k))
                        for k in ("tl", "tr", "omega", "bv")))

    def v_algebra(self) -> MalcevAlgebra:
        return MalcevAlgebra(self.field, self.names_v, self.bv)


def build_unified(d: ExtendingDatum) -> MalcevAlgebra:
    """[(x,u),(y,v)] = ([x,y] + x<|v - y<|u + w(u,v), x|>v - y|>u + [u,v])."""
    f, M = d.field, d.M
    m, v = M.dim, d.dim_v
    mm = np.concatenate([M.table, f.zeros((m, m, v))], axis=2)
    mv = np.concatenate([d.tl, d.tr], axis=2)
    vv = np.concatenate([d.omega, d.bv], axis=2)
    return block_algebra(f, M.names, d.names_v, mm, mv, vv)


def verify_unified_direct(d: ExtendingDatum) -> VerificationReport:
    """Canonical verdict: the four-variable Malcev identity on M + V."""
    from .algebra import check_malcev_eq3
    from . import kernels

    E = build_unified(d)
    rep = check_malcev_eq3(E)
    if d.field.is_finite:
        rep.extras["kernel_agrees"] = kernels.malcev_ok(E.table, d.field.p) == rep.overall
    return rep


@dataclass(frozen=True, eq=False)
class Projection:
    """Idempotent ``p: E -> E`` onto the span of ``sub`` basis vectors.

    With ``p`` omitted the coordinate projection is used, so V is spanned by
    the remaining basis vectors. An explicit ``p`` (row convention) is
    validated and its kernel becomes V.
    """

    E: MalcevAlgebra
    sub: tuple[int, ...]
    p: np.ndarray | None = None

    def __post_init__(self):
        f, n = self.E.field, self.E.dim
        sub = tuple(int(i) for i in self.sub)
        if not sub or len(set(sub)) != len(sub) or not all(0 <= i < n for i in sub):
            raise ValueError(f"bad sub-basis indices {self.sub}")
        object.__setattr__(self, "sub", sub)
        if self.p is None:
            p = f.zeros((n, n))
            for i in sub:
                p[i, i] = f.one
        else:
            p = f.reduce(np.asarray(self.p)) if np.asarray(self.p).dtype != object \
                else f.array(self.p)
            if p.shape != (n, n):
                raise DimensionMismatch(f"projection must be {n}x{n}")
            if not f.equal(f.matmul(p, p), p):
                raise NotIdempotent("p o p != p")
            for i in sub:
                if not f.equal(p[i], f.unit(n, i)):
                    raise NotIdempotent(f"p does not fix basis vector {self.E.names[i]}")
            if rank(f, p) != len(sub):
                raise NotIdempotent("image of p is larger than the sub-basis span")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @property
    def complement(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.E.dim) if i not in self.sub)

    def is_coordinate(self) -> bool:
        f = self.E.field
        return all(f.all_zero(self.p[i]) for i in self.complement)

    def basis(self) -> np.ndarray:
        """Rows: sub-basis vectors, then a basis of ker p (in E coordinates)."""
        f, n = self.E.field, self.E.dim
        rows = [f.unit(n, i) for i in self.sub]
        for i in self.complement:
            # e_i - p(e_i) spans ker p as i runs over the complement
            rows.append(f.reduce(f.unit(n, i) - self.p[i]))
        return np.array(rows, dtype=f.dtype)

    def names_v(self) -> tuple[str, ...]:
        return tuple(self.E.names[i] for i in self.complement)


def _in_new_basis(E: MalcevAlgebra, B: np.ndarray) -> np.ndarray:
    f = E.field
    Binv = invert(f, B)
    pairs = bil(f, B[:, None, :], B[None, :, :], E.table)
    return f.einsum("ijk,kl->ijl", pairs, Binv)


def extract_datum(pr: Projection, check_malcev: bool = True) -> ExtendingDatum:
    """Datum (<|_p, |>_p, w_p, [,]_p) of E relative to the projection ``pr``."""
    from .algebra import check_malcev_eq3

    E, f = pr.E, pr.E.field
    m = len(pr.sub)
    if m == E.dim:
        raise ValueError("complement V is zero-dimensional")
    B = pr.basis()
    try:
        T = _in_new_basis(E, B)
    except Singular as exc:  # pragma: no cover - basis() is always a basis
        raise NotIdempotent("projection does not split E") from exc
    if not f.all_zero(T[:m, :m, m:]):
        raise NotASubalgebra("sub-basis does not span a subalgebra")
    if check_malcev and not check_malcev_eq3(E).overall:
        raise NotMalcev("E fails the Malcev identity")
    M = MalcevAlgebra(f, tuple(E.names[i] for i in pr.sub), T[:m, :m, :m])
    return ExtendingDatum(
        M,
        pr.names_v(),
        tl=T[:m, m:, :m],
        tr=T[:m, m:, m:],
        omega=T[m:, m:, :m],
        bv=T[m:, m:, m:],
    )


@dataclass(frozen=True)
class IsoCheck:
    ok: bool
    reason: str = ""
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def phi_iso_check(E: MalcevAlgebra, pr: Projection, d: ExtendingDatum) -> IsoCheck:
    """Check that phi(x, u) = x + u is an isomorphism M#V -> E fixing M and V."""
    f = E.field
    U = build_unified(d)
    m = d.M.dim
    if U.dim != E.dim:
        return IsoCheck(False, "dimension mismatch")
    Phi = pr.basis()
    try:
        Binv = invert(f, Phi)
    except Singular:
        return IsoCheck(False, "phi is not invertible")
    lhs = f.matmul(U.table, Phi)
    rhs = bil(f, Phi[:, None, :], Phi[None, :, :], E.table)
    bad = np.argwhere(~f.is_zero(lhs - rhs).all(axis=-1))
    if len(bad):
        i, j = (int(k) for k in bad[0])
        return IsoCheck(False, "phi does not preserve brackets", (U.names[i], U.names[j]))
    for k, i in enumerate(pr.sub):
        if not f.equal(Phi[k], f.unit(E.dim, i)):
            return IsoCheck(False, "phi does not stabilize M", (U.names[k],))
    # pi = id - p projects E onto V along M; read it in the (M, V) basis
    pi = f.matmul(f.reduce(Phi - f.matmul(Phi, pr.p)), Binv)
    want = np.concatenate([f.zeros((m, E.dim - m)), f.identity(E.dim - m)], axis=0)
    if not (f.all_zero(pi[:, :m]) and f.equal(pi[:, m:], want)):
        return IsoCheck(False, "phi does not co-stabilize V")
    return IsoCheck(True)


@dataclass(frozen=True)
class TriageRecord:
    """One observation where a printed condition and the direct check part ways."""

    condition_id: str
    kind: str
    witness: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {"condition_id": self.condition_id, "kind": self.kind,
                "witness": list(self.witness)}


def run_conditions(d: ExtendingDatum, conds, direct: VerificationReport | None = None,
                   ) -> VerificationReport:
    """Evaluate ``conds`` on ``d`` and cross-check against the direct verdict.

    ``extras`` gets ``direct`` (canonical verdict), ``conjunction``,
    ``agree`` and a list of :class:`TriageRecord` under ``triage``. For
    conditions that are a single component of the four-variable identity
    the residual tensors are compared too (kind ``residual_differs``).
    """
    from .conditions import component_residual, evaluate
    from .report import compare

    f, M = d.field, d.M
    E = build_unified(d)
    if direct is None:
        direct = verify_unified_direct(d)
    labels = {"M": list(M.names), "V": list(d.names_v)}
    rep = VerificationReport(f)
    triage: list[TriageRecord] = []
    for c in conds:
        lhs, rhs, _ = evaluate(c, f, M.table, d.tl, d.tr, d.omega, d.bv)
        check = compare(f, c.cid, lhs, rhs, [labels[s] for s in c.spaces],
                        as_printed=c.as_printed, note=c.note)
        rep.checks.append(check)
        if c.slots is None:
            continue
        comp = component_residual(c, f, E.table, M.dim)
        res = np.broadcast_to(f.reduce(lhs - rhs), comp.shape)
        diff = ~f.is_zero(res - comp).reshape(comp.shape[:4] + (-1,)).all(axis=-1)
        if diff.any():
            idx = tuple(int(i) for i in np.argwhere(diff)[0])
            triage.append(TriageRecord(
                c.cid, "residual_differs",
                tuple(labels[s][i] for s, i in zip(c.spaces, idx))))
    conj = rep.overall
    if conj != direct.overall:
        for c in rep.checks:
            if not c.passed:
                triage.append(TriageRecord(c.condition_id, "fails_while_direct_passes",
                                           c.witnesses[0].labels))
        if conj:
            w = direct.checks[0].witnesses[0].labels if direct.failed() else ()
            triage.append(TriageRecord("eq3", "direct_fails_while_conditions_pass", w))
    rep.extras.update(direct=direct.overall, conjunction=conj, agree=conj == direct.overall,
                      triage=triage)
    if "kernel_agrees" in direct.extras:
        rep.extras["kernel_agrees"] = direct.extras["kernel_agrees"]
    return rep


def diagnose_U(d: ExtendingDatum) -> VerificationReport:
    """(U1)-(U11) one by one, plus the cross-check against the direct verdict."""
    from .conditions import U_CONDITIONS

    return run_conditions(d, U_CONDITIONS)
