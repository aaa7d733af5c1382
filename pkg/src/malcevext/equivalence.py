"""Morphisms between unified products and the two equivalence relations.

A pair (r, s) with r: V -> M and s: V -> V gives the linear map
psi(x, u) = (x + r(u), s(u)). In the row convention used everywhere in
this package, ``r[a]`` holds the M-coordinates of r(v_a) and ``s[a]``
the V-coordinates of s(v_a), so psi has the block matrix [[I, 0], [r, s]].
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import MalcevAlgebra
from .field import Field, PrimeField
from .flag import ResourceLimit, flag_tables
from .linalg import DimensionMismatch, Singular, invert, is_invertible
from .report import VerificationReport, compare
from .tuples import Tuples, bil, lin
from .unified import ExtendingDatum, Projection, TriageRecord, build_unified, extract_datum

CANDIDATE_LIMIT = 10 ** 8


class FieldNotAllowed(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MorphPair:
    r: np.ndarray   # (dim V, dim M)
    s: np.ndarray   # (dim V, dim V)

    def validate(self, f: Field, m: int, v: int) -> "MorphPair":
        r, s = f.array(self.r), f.array(self.s)
        if r.shape != (v, m) or s.shape != (v, v):
            raise DimensionMismatch(f"r must be ({v}, {m}) and s ({v}, {v})")
        return MorphPair(r, s)

    @classmethod
    def identity(cls, f: Field, m: int, v: int) -> "MorphPair":
        return cls(f.zeros((v, m)), f.identity(v))


def psi_map(f: Field, mp: MorphPair, dim_m: int, dim_v: int) -> np.ndarray:
    """Matrix of psi in the row convention (row k = image of basis vector k)."""
    mp = mp.validate(f, dim_m, dim_v)
    top = np.concatenate([f.identity(dim_m), f.zeros((dim_m, dim_v))], axis=1)
    bottom = np.concatenate([mp.r, mp.s], axis=1)
    return np.concatenate([top, bottom], axis=0)


def compose(f: Field, first: MorphPair, second: MorphPair) -> MorphPair:
    """The pair of ``second o first``: (r1 + s1 r2, s1 s2) in rows."""
    return MorphPair(f.reduce(first.r + f.matmul(first.s, second.r)),
                     f.matmul(first.s, second.s))


def is_homomorphism(f: Field, A: MalcevAlgebra, B: MalcevAlgebra, P: np.ndarray) -> bool:
    """Whether the row-convention matrix P: A -> B preserves brackets."""
    lhs = f.matmul(A.table, P)
    rhs = bil(f, P[:, None, :], P[None, :, :], B.table)
    return f.all_zero(lhs - rhs)


def _same_shape(d: ExtendingDatum, d2: ExtendingDatum) -> None:
    d.field.check_same(d2.field)
    if d.M.dim != d2.M.dim or d.dim_v != d2.dim_v:
        raise DimensionMismatch("data must share dim M and dim V")
    if not d.M.same_as(d2.M):
        raise DimensionMismatch("data must share the algebra M")


def check_morphism_pair(d: ExtendingDatum, d2: ExtendingDatum, mp: MorphPair) -> VerificationReport:
    """(M1)-(M4) on basis pairs plus the direct homomorphism check of psi.

    M1: s(x |> v) = x |>' s(v)
    M2: x <| v + r(x |> v) = [x, r(v)] + x <|' s(v)
    M3: s([u, v]) = [s u, s v]' + r(u) |>' s(v) - r(v) |>' s(u)
    M4: w(u, v) + r([u, v]) = [r u, r v] + r(u) <|' s(v) - r(v) <|' s(u) + w'(s u, s v)
    """
    _same_shape(d, d2)
    f, m, v = d.field, d.M.dim, d.dim_v
    mp = mp.validate(f, m, v)
    r, s, C = mp.r, mp.s, d.M.table
    nm, nv = list(d.M.names), list(d.names_v)
    rep = VerificationReport(f)

    x, a = Tuples(f, (m, v)).vars()
    sa = lin(f, a, s)
    lhs = lin(f, bil(f, x, a, d.tr), s)
    rhs = bil(f, x, sa, d2.tr)
    rep.checks.append(compare(f, "M1", lhs, rhs, [nm, nv]))
    lhs = f.reduce(bil(f, x, a, d.tl) + lin(f, bil(f, x, a, d.tr), r))
    rhs = f.reduce(bil(f, x, lin(f, a, r), C) + bil(f, x, sa, d2.tl))
    rep.checks.append(compare(f, "M2", lhs, rhs, [nm, nv]))

    u, w = Tuples(f, (v, v)).vars()
    su, sw, ru, rw = lin(f, u, s), lin(f, w, s), lin(f, u, r), lin(f, w, r)
    uw = bil(f, u, w, d.bv)
    lhs = lin(f, uw, s)
    rhs = f.reduce(bil(f, su, sw, d2.bv) + bil(f, ru, sw, d2.tr) - bil(f, rw, su, d2.tr))
    rep.checks.append(compare(f, "M3", lhs, rhs, [nv, nv]))
    lhs = f.reduce(bil(f, u, w, d.omega) + lin(f, uw, r))
    rhs = f.reduce(bil(f, ru, rw, C) + bil(f, ru, sw, d2.tl) - bil(f, rw, su, d2.tl)
                   + bil(f, su, sw, d2.omega))
    rep.checks.append(compare(f, "M4", lhs, rhs, [nv, nv]))

    direct = is_homomorphism(f, build_unified(d), build_unified(d2), psi_map(f, mp, m, v))
    conj = rep.overall
    triage = []
    if conj != direct:
        triage = [TriageRecord(c.condition_id, "fails_while_direct_passes", c.witnesses[0].labels)
                  for c in rep.checks if not c.passed]
        if conj:
            triage.append(TriageRecord("psi", "direct_fails_while_conditions_pass"))
    rep.extras.update(direct=direct, conjunction=conj, agree=conj == direct, triage=triage,
                      invertible=is_invertible(f, s) if v else True,
                      co_stabilizes=f.equal(s, f.identity(v)))
    return rep


def transport_table(f: Field, T: np.ndarray, P: np.ndarray, Pinv: np.ndarray | None = None) -> np.ndarray:
    """Table of the bracket [a, b]' = P([P^-1 a, P^-1 b]) (row convention)."""
    if Pinv is None:
        Pinv = invert(f, P)
    return f.einsum("ijk,kl->ijl", bil(f, Pinv[:, None, :], Pinv[None, :, :], T), P)


def act_on_datum(d: ExtendingDatum, mp: MorphPair) -> ExtendingDatum:
    """The datum d2 for which psi_(r,s): M#V(d) -> M#V(d2) is an isomorphism."""
    f, m, v = d.field, d.M.dim, d.dim_v
    P = psi_map(f, mp, m, v)
    try:
        Pinv = invert(f, P)
    except Singular as exc:
        raise Singular("s is not invertible") from exc
    E = build_unified(d)
    E2 = MalcevAlgebra(f, E.names, transport_table(f, E.table, P, Pinv))
    return extract_datum(Projection(E2, tuple(range(m))), check_malcev=False)


# -------------------------------------------------------------- classification

@dataclass(frozen=True)
class FlagClass:
    lam: tuple
    D: tuple
    size: int

    def as_dict(self, f: Field) -> dict:
        return {"lambda": [f.format(c) for c in self.lam],
                "D": [[f.format(c) for c in row] for row in self.D],
                "orbit_size": self.size}


@dataclass
class ClassificationResult:
    field: Field
    dim_m: int
    dim_v: int
    total_data: int
    classes_equiv: list[FlagClass]
    classes_cohom: list[FlagClass]
    cross_check: dict = dc_field(default_factory=dict)
    agree: bool = False
    refines: bool = False

    @property
    def ok(self) -> bool:
        return self.agree and self.refines


def _check_classify_input(M: MalcevAlgebra) -> PrimeField:
    f = M.field
    if not isinstance(f, PrimeField):
        raise FieldNotAllowed("classification needs a prime field GF(p)")
    if f.p in (2, 3):
        raise FieldNotAllowed(f"GF({f.p}) is not allowed")
    n = M.dim
    if n > 3:
        raise ResourceLimit("classification is limited to dim M <= 3")
    cand = f.p ** (n + n * n)
    # route 1 evaluates every candidate once per generator as well
    if cand * (n + 2) > CANDIDATE_LIMIT:
        raise ResourceLimit(f"{cand} candidate data exceed the enumeration bound")
    return f


def _digits(p: int, k: int) -> np.ndarray:
    idx = np.arange(p ** k, dtype=np.int64)
    out = np.empty((idx.size, k), dtype=np.int64)
    for j in range(k - 1, -1, -1):
        out[:, j] = idx % p
        idx //= p
    return out


def _encode(rows: np.ndarray, p: int) -> np.ndarray:
    code = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(rows.shape[1]):
        code = code * p + rows[:, j]
    return code


def _components(codes: np.ndarray, edges: list[np.ndarray]) -> np.ndarray:
    """Connected-component labels of the graph on ``codes`` (sorted)."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    n = codes.size
    src = np.concatenate([np.arange(n)] * len(edges)) if edges else np.zeros(0, dtype=np.int64)
    dst = np.concatenate([np.searchsorted(codes, e) for e in edges]) if edges else src
    g = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(g, directed=True, connection="weak")
    return labels


def _classes_from_labels(codes, labels, decode) -> list[FlagClass]:
    out = []
    for lab in np.unique(labels):
        members = codes[labels == lab]
        lam, D = decode(int(members.min()))
        out.append(FlagClass(lam, D, int(members.size)))
    out.sort(key=lambda c: (c.lam, c.D))
    return out


def _route_data(M: MalcevAlgebra, f: PrimeField, parallel: bool):
    """Datum-quotient route: (lambda, D) pairs, generators of the (r, s) action."""
    from . import kernels

    p, n = f.p, M.dim
    rows = _digits(p, n + n * n)
    lams, Ds = rows[:, :n], rows[:, n:].reshape(-1, n, n)
    ok = kernels.malcev_mask(flag_tables(M, lams, Ds), p, parallel=parallel)
    rows = rows[ok]
    codes = _encode(rows, p)   # already sorted: digits enumerate in code order
    lams, Ds = rows[:, :n], rows[:, n:].reshape(-1, n, n)

    def act(r, sigma):
        # D'(x) = sigma^-1 (D(x) + lambda(x) r + [r, x])
        ad = np.einsum("k,kij->ij", r, M.table)
        newD = (Ds + lams[:, :, None] * r[None, None, :] + ad[None]) % p
        newD = (newD * pow(int(sigma), -1, p)) % p
        return _encode(np.concatenate([lams, newD.reshape(len(rows), -1)], axis=1), p)

    shifts = [act(np.eye(n, dtype=np.int64)[k], 1) for k in range(n)]
    gen = _primitive_root(p)
    eq_labels = _components(codes, shifts + [act(np.zeros(n, dtype=np.int64), gen)])
    co_labels = _components(codes, shifts)
    return codes, eq_labels, co_labels


def _primitive_root(p: int) -> int:
    phi = p - 1
    factors = {q for q in range(2, phi + 1) if phi % q == 0 and all(q % t for t in range(2, q))}
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in factors):
            return g
    return 1


def _route_tables(M: MalcevAlgebra, f: PrimeField):
    """Extension-enumeration route: full tables on M + <u>, orbits by conjugation.

    Independent of the (lambda, D) formulas: the free entries are the
    brackets [e_i, u], Malcev tables are found with the numpy kernel and
    orbits are computed by transporting tables with every stabilizing
    isomorphism (x -> x, u -> r + sigma u).
    """
    from . import kernels

    p, n = f.p, M.dim
    N = n + 1
    keep_T, keep_free = [], []
    allfree = _digits(p, n * N)
    for s0 in range(0, allfree.shape[0], 1 << 16):
        free = allfree[s0:s0 + (1 << 16)]
        T = np.zeros((free.shape[0], N, N, N), dtype=np.int64)
        T[:, :n, :n, :n] = M.table
        T[:, :n, n, :] = free.reshape(-1, n, N)
        T[:, n, :n, :] = (-T[:, :n, n, :]) % p
        ok = kernels.malcev_mask(T, p, use_numba=False)
        keep_T.append(T[ok])
        keep_free.append(free[ok])
    T, free = np.concatenate(keep_T), np.concatenate(keep_free)
    codes = _encode(free, p)
    index = {int(c): i for i, c in enumerate(codes)}
    Ps, sigmas = [], []
    for sigma in range(1, p):
        for r in _digits(p, n):
            P = np.eye(N, dtype=np.int64)
            P[n, :n], P[n, n] = r, sigma
            Ps.append(P)
            sigmas.append(sigma)
    Ps = np.stack(Ps)
    Pinvs = np.stack([invert(f, P) for P in Ps])
    co = np.array(sigmas) == 1
    found_eq = np.full(codes.size, -1)
    found_co = np.full(codes.size, -1)
    for i in range(codes.size):
        if found_eq[i] >= 0 and found_co[i] >= 0:
            continue
        # only the rows [e_k, u]' are needed: P([P^-1 e_k, P^-1 u])
        # with P^-1 e_k = e_k and P^-1 u = Pinv[n]
        rows = np.einsum("gj,kjl->gkl", Pinvs[:, n, :], T[i, :n]) % p
        rows = np.einsum("gkl,glm->gkm", rows, Ps) % p
        js = np.array([index[int(c)] for c in _encode(rows.reshape(len(Ps), -1), p)])
        if found_eq[i] < 0:
            found_eq[js] = i
        if found_co[i] < 0:
            found_co[js[co]] = i
    return codes, found_eq, found_co


def classify_flag(M: MalcevAlgebra, relation: str = "both", *,
                  parallel: bool = False) -> ClassificationResult:
    """Classes of flag extending structures of M over GF(p) under the two relations.

    ``relation`` only selects what a caller intends to show; both relations
    and both routes are always computed so the result can cross-check them.
    """
    if relation not in ("equiv", "cohom", "both"):
        raise ValueError(f"unknown relation {relation!r}")
    f = _check_classify_input(M)
    p, n = f.p, M.dim

    def decode_data(code: int):
        digs = []
        for _ in range(n + n * n):
            digs.append(code % p)
            code //= p
        digs = digs[::-1]
        lam = tuple(digs[:n])
        D = tuple(tuple(digs[n + i * n:n + (i + 1) * n]) for i in range(n))
        return lam, D

    codes, eq_l, co_l = _route_data(M, f, parallel)
    classes_eq = _classes_from_labels(codes, eq_l, decode_data)
    classes_co = _classes_from_labels(codes, co_l, decode_data)

    tcodes, teq, tco = _route_tables(M, f)
    sizes_eq = sorted(np.unique(teq, return_counts=True)[1].tolist())
    sizes_co = sorted(np.unique(tco, return_counts=True)[1].tolist())

    refines = all(len(set(eq_l[co_l == lab].tolist())) == 1 for lab in np.unique(co_l))
    cross = {
        "total_data": int(tcodes.size),
        "classes_equiv": len(sizes_eq),
        "classes_cohom": len(sizes_co),
        "orbit_sizes_equiv": sizes_eq,
        "orbit_sizes_cohom": sizes_co,
    }
    agree = (cross["total_data"] == codes.size
             and sizes_eq == sorted(c.size for c in classes_eq)
             and sizes_co == sorted(c.size for c in classes_co))
    return ClassificationResult(f, n, 1, int(codes.size), classes_eq, classes_co,
                                cross, agree, refines)
