"""Exact dense linear algebra over :mod:`malcevext.field` fields.

Matrices act on row vectors throughout the package: a linear map ``L``
is stored with ``L[i]`` holding the coordinates of the image of basis
vector ``i``, and is applied as ``x @ L``. Linear *systems* below are
the usual ``A x = b`` with ``x`` a column of unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .field import Field, PrimeField


class Singular(ArithmeticError):
    pass


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Solution:
    particular: np.ndarray | None
    kernel_basis: tuple[np.ndarray, ...]

    @property
    def consistent(self) -> bool:
        return self.particular is not None


def _bareiss_echelon(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form of an integer matrix.

    Pivots are the first nonzero entry in column order, scanning rows top
    down, so the result is deterministic.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    prev = 1
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        pr = m[r]
        a = pr[c]
        for i in range(r + 1, nrows):
            row = m[i]
            b = row[c]
            for j in range(c + 1, ncols):
                q, rem = divmod(a * row[j] - b * pr[j], prev)
                assert rem == 0, "Bareiss division must be exact"
                row[j] = q
            row[c] = 0
        # rows above the pivot band keep their scale; only the pivot carries over
        prev = a
        pivots.append(c)
        r += 1
    return m, pivots


def _rref_rational(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    nrows, ncols = mat.shape
    rows = []
    for i in range(nrows):
        fr = [Fraction(v) for v in mat[i]]
        den = lcm(*(f.denominator for f in fr)) if fr else 1
        rows.append([int(f * den) for f in fr])
    ech, pivots = _bareiss_echelon(rows, ncols)
    out = np.empty((nrows, ncols), dtype=object)
    for i in range(nrows):
        for j in range(ncols):
            out[i, j] = Fraction(ech[i][j])
    for r, c in enumerate(pivots):
        out[r] = out[r] / out[r, c]
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        for i in range(r):
            f = out[i, c]
            if f != 0:
                out[i] = out[i] - f * out[r]
    return out, pivots


def _rref_mod(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    m = np.mod(np.array(mat, dtype=np.int64), p)
    nrows, ncols = m.shape
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = m[r] * pow(int(m[r, c]), -1, p) % p
        col = m[:, c].copy()
        col[r] = 0
        m = (m - np.outer(col, m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rref(field: Field, mat) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    mat = np.asarray(mat)
    if mat.ndim != 2:
        raise DimensionMismatch("rref needs a 2-d array")
    if isinstance(field, PrimeField):
        return _rref_mod(mat, field.p)
    return _rref_rational(field.array(mat))


def rank(field: Field, mat) -> int:
    return len(rref(field, mat)[1])


def solve_linear(field: Field, A, b) -> Solution:
    """All solutions of ``A x = b`` as particular solution plus kernel basis."""
    A = field.array(A) if np.asarray(A).dtype == object else field.reduce(np.asarray(A))
    b = field.array(b) if np.asarray(b).dtype == object else field.reduce(np.asarray(b))
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"cannot solve {A.shape} system with rhs {b.shape}")
    nvars = A.shape[1]
    aug = np.concatenate([A, b[:, None]], axis=1)
    R, pivots = rref(field, aug)
    consistent = nvars not in pivots
    pivots = [c for c in pivots if c < nvars]
    if not consistent:
        particular = None
    else:
        particular = field.zeros(nvars)
        for r, c in enumerate(pivots):
            particular[c] = R[r, nvars]
    free = [c for c in range(nvars) if c not in pivots]
    kernel = []
    for f in free:
        v = field.zeros(nvars)
        v[f] = field.one
        for r, c in enumerate(pivots):
            v[c] = field.neg(R[r, f])
        kernel.append(v)
    return Solution(particular, tuple(kernel))


def nullspace(field: Field, A) -> list[np.ndarray]:
    A = np.asarray(A)
    return list(solve_linear(field, A, field.zeros(A.shape[0])).kernel_basis)


def invert(field: Field, S) -> np.ndarray:
    """Exact inverse of a square matrix; raises :class:`Singular`."""
    S = np.asarray(S)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"invert needs a square matrix, got {S.shape}")
    n = S.shape[0]
    S = field.array(S) if S.dtype == object else field.reduce(S)
    R, pivots = rref(field, np.concatenate([S, field.identity(n)], axis=1))
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise Singular("matrix is singular")
    return R[:, n:]


def is_invertible(field: Field, S) -> bool:
    try:
        invert(field, S)
    except Singular:
        return False
    return True
