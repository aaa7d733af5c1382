"""Random instances for property suites and the CLI's randomized commands.

All generators take a ``numpy.random.Generator`` so runs are reproducible
from a seed. Random structures are sparse by default: dense random tables
almost never satisfy the identities, and sparse ones hit both verdicts.
"""

from __future__ import annotations

import itertools

import numpy as np

from .algebra import MalcevAlgebra, check_malcev_eq3
from .field import Field, PrimeField
from .reps import Cocycle, ModuleAction, check_module
from .unified import ExtendingDatum

DENSITY = 0.3


def skew_tensor(f: Field, rng: np.random.Generator, n: int, d: int,
                density: float = DENSITY) -> np.ndarray:
    """Random (n, n, d) tensor, skew in the first two axes."""
    t = f.zeros((n, n, d))
    for i, j in itertools.combinations(range(n), 2):
        vec = f.random(rng, d, density)
        t[i, j] = vec
        t[j, i] = f.neg(vec)
    return t


def random_anticommutative(f: Field, rng: np.random.Generator, n: int,
                           density: float = DENSITY) -> MalcevAlgebra:
    return MalcevAlgebra(f, tuple(f"e{i + 1}" for i in range(n)), skew_tensor(f, rng, n, n, density))


def m4(f: Field) -> MalcevAlgebra:
    """The 4-dimensional non-Lie Malcev algebra."""
    return MalcevAlgebra.from_brackets(
        f, 4, {(0, 1): [0, 1, 0, 0], (0, 2): [0, 0, 1, 0], (0, 3): [0, 0, 0, -1], (1, 2): [0, 0, 0, 1]})


def random_malcev(f: Field, rng: np.random.Generator, n: int, *, density: float = DENSITY,
                  tries: int = 200) -> MalcevAlgebra:
    """Rejection sampling on sparse tables; abelian if nothing is found."""
    from . import kernels

    for _ in range(tries):
        A = random_anticommutative(f, rng, n, density)
        ok = kernels.malcev_ok(A.table, f.p) if isinstance(f, PrimeField) \
            else check_malcev_eq3(A).overall
        if ok:
            return A
    return MalcevAlgebra.abelian(f, n)


def random_action(A: MalcevAlgebra, rng: np.random.Generator, dim_v: int,
                  density: float = DENSITY) -> ModuleAction:
    f = A.field
    return ModuleAction(f.random(rng, (A.dim, dim_v, dim_v), density))


def characters(A: MalcevAlgebra, reading: str = "printed") -> list[np.ndarray]:
    """Every lambda: A -> k for which k is a module via x |> v = lambda(x) v (GF only)."""
    f = A.field
    out = []
    for lam in itertools.product(f.elements(), repeat=A.dim):
        act = ModuleAction(np.array(lam, dtype=np.int64).reshape(A.dim, 1, 1))
        if check_module(A, act, reading=reading).overall:
            out.append(np.array(lam, dtype=np.int64))
    return out


def random_valid_module(A: MalcevAlgebra, rng: np.random.Generator, dim_v: int,
                        tries: int = 50) -> ModuleAction:
    """A module for A: sparse rejection sampling, else a sum of characters
    conjugated by a random invertible matrix."""
    from .linalg import invert, is_invertible

    f = A.field
    for _ in range(tries):
        act = random_action(A, rng, dim_v)
        if check_module(A, act).overall:
            return act
    chars = characters(A)
    rho = f.zeros((A.dim, dim_v, dim_v))
    for a in range(dim_v):
        lam = chars[int(rng.integers(len(chars)))]
        rho[:, a, a] = lam
    while True:
        S = f.random(rng, (dim_v, dim_v))
        if is_invertible(f, S):
            break
    Sinv = invert(f, S)
    rho = f.einsum("ab,ibc->iac", Sinv, f.einsum("iab,bc->iac", rho, S))
    return ModuleAction(rho)


def random_cocycle_candidate(A: MalcevAlgebra, rng: np.random.Generator, dim_v: int,
                             density: float = DENSITY) -> Cocycle:
    f = A.field
    return Cocycle(f, skew_tensor(f, rng, A.dim, dim_v, density))


def random_datum(M: MalcevAlgebra, rng: np.random.Generator, dim_v: int,
                 density: float = DENSITY) -> ExtendingDatum:
    f, m, v = M.field, M.dim, dim_v
    return ExtendingDatum(
        M, tuple(f"v{a + 1}" for a in range(v)),
        tl=f.random(rng, (m, v, m), density),
        tr=f.random(rng, (m, v, v), density),
        omega=skew_tensor(f, rng, v, m, density),
        bv=skew_tensor(f, rng, v, v, density),
    )
