"""Batched GF(p) Malcev checks on raw int64 structure-constant tables.

These kernels back the exhaustive enumerations (extraction sweeps,
classification). The numba path is used when numba imports cleanly and
``MALCEVEXT_NO_NUMBA`` is unset or "0"; otherwise a pure numpy path with
the same semantics runs. Both evaluate the four-variable identity

    [[x,z],[y,w]] = [[[x,y],z],w] + [[[y,z],w],x] + [[[z,w],x],y] + [[[w,x],y],z]

on every basis quadruple. Tables must already be reduced mod p with
p < 2**20, so every product of two residues fits comfortably in int64.
"""

from __future__ import annotations

import os

import numpy as np

_CHUNK = 2048


def _want_numba() -> bool:
    return os.environ.get("MALCEVEXT_NO_NUMBA", "0") in ("", "0")


try:  # pragma: no cover - exercised implicitly depending on the environment
    if not _want_numba():
        raise ImportError("numba disabled by MALCEVEXT_NO_NUMBA")
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------- numpy path

def _eq3_residual_np(C: np.ndarray, p: int) -> np.ndarray:
    """Residual over a leading batch axis: shape (B, n, n, n, n, n)."""
    # [[x,z],[y,w]]: first contract [x,z] with the table, then with [y,w]
    T = np.einsum("Bxza,Baqk->Bxzqk", C, C) % p
    lhs = np.einsum("Bywq,Bxzqk->Bxyzwk", C, T) % p
    # R[a,b,c,d] = [[[a,b],c],d]
    T3 = np.einsum("Baby,Byck->Babck", C, C) % p
    R = np.einsum("Babcy,Bydk->Babcdk", T3, C) % p
    rhs = (R
           + np.einsum("Byzwxk->Bxyzwk", R)
           + np.einsum("Bzwxyk->Bxyzwk", R)
           + np.einsum("Bwxyzk->Bxyzwk", R)) % p
    return (lhs - rhs) % p


def _malcev_mask_np(Cs: np.ndarray, p: int) -> np.ndarray:
    out = np.empty(Cs.shape[0], dtype=np.bool_)
    for s in range(0, Cs.shape[0], _CHUNK):
        res = _eq3_residual_np(Cs[s:s + _CHUNK], p)
        out[s:s + _CHUNK] = ~res.reshape(res.shape[0], -1).any(axis=1)
    return out


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _malcev_ok_nb(C, p):
        n = C.shape[0]
        # T3[a,b,c,:] = [[a,b],c]
        T3 = np.zeros((n, n, n, n), dtype=np.int64)
        for a in range(n):
            for b in range(n):
                for y in range(n):
                    cab = C[a, b, y]
                    if cab == 0:
                        continue
                    for c in range(n):
                        for k in range(n):
                            T3[a, b, c, k] += cab * C[y, c, k]
        T3 %= p
        R = np.zeros((n, n, n, n, n), dtype=np.int64)
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for y in range(n):
                        t = T3[a, b, c, y]
                        if t == 0:
                            continue
                        for d in range(n):
                            for k in range(n):
                                R[a, b, c, d, k] += t * C[y, d, k]
        R %= p
        left = np.zeros(n, dtype=np.int64)
        for x in range(n):
            for z in range(n):
                for y in range(n):
                    for w in range(n):
                        for k in range(n):
                            left[k] = 0
                        for a in range(n):
                            cxz = C[x, z, a]
                            if cxz == 0:
                                continue
                            for b in range(n):
                                cyw = C[y, w, b]
                                if cyw == 0:
                                    continue
                                f = (cxz * cyw) % p
                                for k in range(n):
                                    left[k] += f * C[a, b, k]
                        for k in range(n):
                            r = (R[x, y, z, w, k] + R[y, z, w, x, k]
                                 + R[z, w, x, y, k] + R[w, x, y, z, k])
                            if (left[k] - r) % p != 0:
                                return False
        return True

    @njit(cache=True)
    def _mask_serial(Cs, p):
        out = np.empty(Cs.shape[0], dtype=np.bool_)
        for i in range(Cs.shape[0]):
            out[i] = _malcev_ok_nb(Cs[i], p)
        return out

    @njit(cache=True, parallel=True)
    def _mask_parallel(Cs, p):
        out = np.empty(Cs.shape[0], dtype=np.bool_)
        for i in prange(Cs.shape[0]):
            out[i] = _malcev_ok_nb(Cs[i], p)
        return out


# ---------------------------------------------------------------- public API

def _prep(C, p: int) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(C, dtype=np.int64) % int(p))


def malcev_ok(C, p: int, *, use_numba: bool | None = None) -> bool:
    """Whether the table ``C[i, j, k]`` over GF(p) satisfies the identity."""
    C = _prep(C, p)
    if C.ndim != 3:
        raise ValueError("expected a (n, n, n) table")
    return bool(malcev_mask(C[None], p, use_numba=use_numba)[0])


def malcev_mask(Cs, p: int, *, parallel: bool = False,
                use_numba: bool | None = None) -> np.ndarray:
    """Boolean mask over a batch of tables with shape (B, n, n, n)."""
    Cs = _prep(Cs, p)
    if Cs.ndim != 4:
        raise ValueError("expected a (B, n, n, n) batch")
    if Cs.shape[0] == 0:
        return np.zeros(0, dtype=np.bool_)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but unavailable")
    if use_numba:
        return (_mask_parallel if parallel else _mask_serial)(Cs, np.int64(p))
    return _malcev_mask_np(Cs, int(p))
