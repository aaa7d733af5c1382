"""Evaluate multilinear expressions on all basis tuples at once.

Every identity checked in this package is multilinear in its variables,
so it holds iff it holds on basis vectors. Instead of looping over tuples
we give variable ``k`` the shape ``(1, .., d_k, .., 1, d_k)`` (a stack of
basis vectors along its own axis) and let broadcasting produce the value
of an expression on every tuple in a single array whose last axis holds
coordinates.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .field import Field


class Tuples:
    def __init__(self, field: Field, dims: Sequence[int]):
        self.field = field
        self.dims = tuple(int(d) for d in dims)

    def var(self, k: int) -> np.ndarray:
        d = self.dims[k]
        shape = [1] * len(self.dims) + [d]
        shape[k] = d
        return self.field.identity(d).reshape(shape)

    def vars(self) -> list[np.ndarray]:
        return [self.var(k) for k in range(len(self.dims))]

    def zero(self, d: int) -> np.ndarray:
        return self.field.zeros((1,) * len(self.dims) + (d,))


def bil(field: Field, a: np.ndarray, b: np.ndarray, S: np.ndarray) -> np.ndarray:
    """``sum_ij a_i b_j S[i, j, :]`` with broadcasting over leading axes."""
    tmp = field.einsum("...i,ijk->...jk", a, S)
    return field.einsum("...j,...jk->...k", b, tmp)


def lin(field: Field, a: np.ndarray, L: np.ndarray) -> np.ndarray:
    """Apply a row-convention matrix: ``a @ L``."""
    return field.einsum("...i,ij->...j", a, L)


def fun(field: Field, a: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Linear functional; keeps a trailing axis of length one."""
    return field.einsum("...i,i->...", a, lam)[..., None]


def smul(field: Field, s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Scalar (trailing axis of length one) times vector."""
    return field.reduce(s * v)
