"""Exact scalar fields: the rationals and prime fields GF(p) with p >= 5.

Scalars live in numpy arrays. Over the rationals the arrays have object
dtype holding :class:`fractions.Fraction`; over GF(p) they are ``int64``
residues in ``[0, p)``. A :class:`Field` knows how to build, reduce,
contract and print such arrays, so the rest of the package never touches
the representation directly.

The :class:`Scalar` wrapper gives a checked single-element API for callers
that want field-tagged values instead of raw arrays.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable

import numpy as np

# Residues are multiplied pairwise and summed over short axes in int64.
MAX_PRIME = 1 << 20


class FieldError(ValueError):
    pass


class FieldMismatch(FieldError):
    pass


class BadFieldChar(FieldError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class Field:
    """Base class; use :data:`QQ` or :func:`GF`."""

    dtype: type | np.dtype = object
    is_finite = False

    # -- construction -----------------------------------------------------
    def coerce(self, value):
        raise NotImplementedError

    def array(self, data, shape=None) -> np.ndarray:
        raw = np.asarray(data, dtype=object)
        flat = [self.coerce(v) for v in raw.ravel()]
        out = np.empty(len(flat), dtype=self.dtype)
        out[:] = flat
        out = out.reshape(raw.shape)
        if shape is not None:
            out = out.reshape(shape)
        return out

    def zeros(self, shape) -> np.ndarray:
        raise NotImplementedError

    def identity(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def unit(self, n: int, i: int) -> np.ndarray:
        out = self.zeros(n)
        out[i] = self.one
        return out

    # -- arithmetic on arrays ----------------------------------------------
    def reduce(self, arr):
        return arr

    def einsum(self, subscripts: str, a, b) -> np.ndarray:
        """Exact two-operand contraction, reduced into the field."""
        return self.reduce(np.einsum(subscripts, a, b))

    def matmul(self, a, b) -> np.ndarray:
        return self.reduce(np.matmul(a, b))

    def is_zero(self, arr) -> np.ndarray:
        return self.reduce(np.asarray(arr)) == 0

    def all_zero(self, arr) -> bool:
        return bool(np.all(self.is_zero(arr)))

    def equal(self, a, b) -> bool:
        a = np.asarray(a)
        b = np.asarray(b)
        return a.shape == b.shape and self.all_zero(a - b)

    def neg(self, a):
        out = self.reduce(-np.asarray(a))
        # scalars stay scalars, so they can be stored into object arrays
        return out[()] if out.ndim == 0 else out

    # -- scalars ------------------------------------------------------------
    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.reduce(np.asarray(a) * self.inv(b))

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, value) -> str:
        raise NotImplementedError

    def random(self, rng: np.random.Generator, shape, density: float = 1.0):
        raise NotImplementedError

    def check_same(self, other: "Field") -> None:
        if self != other:
            raise FieldMismatch(f"field mismatch: {self} vs {other}")


def _integral(arr: np.ndarray):
    """(integer numerators as an object array, common denominator, max |numerator|)."""
    vals = arr.reshape(-1).tolist()
    den = math.lcm(*(v.denominator for v in vals)) if vals else 1
    nums = [v.numerator * (den // v.denominator) for v in vals]
    out = np.empty(len(nums), dtype=object)
    out[:] = nums
    return out.reshape(arr.shape), den, max(map(abs, nums), default=0)


class RationalField(Field):
    dtype = object
    zero = Fraction(0)
    one = Fraction(1)
    characteristic = 0

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"

    def describe(self) -> str:
        return "rational"

    def coerce(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, np.integer)):
            return Fraction(int(value))
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, Scalar):
            self.check_same(value.field)
            return value.value
        raise TypeError(f"cannot coerce {value!r} to a rational")

    def zeros(self, shape) -> np.ndarray:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def reduce(self, arr):
        arr = np.asarray(arr)
        if arr.dtype != object:
            return self.array(arr)
        return arr

    def einsum(self, subscripts, a, b):
        # Fraction arithmetic dominates; clear denominators and contract integers
        a, b = self.reduce(a), self.reduce(b)
        na, da, ma = _integral(a)
        nb, db, mb = _integral(b)
        if ma * mb * max(a.size, 1) * max(b.size, 1) < 1 << 62:
            prod = np.einsum(subscripts, na.astype(np.int64), nb.astype(np.int64))
        else:
            prod = np.einsum(subscripts, na, nb)
        den = da * db
        out = np.empty(np.shape(prod), dtype=object)
        flat = out.reshape(-1)
        for k, v in enumerate(np.asarray(prod).reshape(-1).tolist()):
            flat[k] = Fraction(v, den)
        return out

    def matmul(self, a, b):
        a, b = self.reduce(a), self.reduce(b)
        if a.ndim == 1 and b.ndim == 1:
            return self.einsum("i,i->", a, b)[()]
        return self.einsum("...ij,...jk->...ik" if a.ndim > 1 and b.ndim > 1 else
                           ("...j,...jk->...k" if a.ndim == 1 else "...ij,...j->...i"), a, b)

    def inv(self, a):
        a = self.coerce(a)
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return 1 / a

    def parse(self, text: str):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational literal {text!r}") from exc

    def format(self, value) -> str:
        return str(Fraction(value))

    def random(self, rng, shape, density=1.0):
        vals = rng.integers(-3, 4, size=shape)
        if density < 1.0:
            vals = vals * (rng.random(shape) < density)
        return self.array(vals)


class PrimeField(Field):
    dtype = np.int64
    is_finite = True
    zero = 0
    one = 1

    def __init__(self, p: int):
        p = int(p)
        if p in (2, 3):
            raise BadFieldChar(f"characteristic {p} is not allowed")
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        if p >= MAX_PRIME:
            raise FieldError(f"prime {p} too large (limit {MAX_PRIME})")
        self.p = p
        self.characteristic = p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"

    def describe(self) -> str:
        return f"gf {self.p}"

    def coerce(self, value):
        if isinstance(value, (int, np.integer)):
            return int(value) % self.p
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise DivisionByZero(f"{value} has no image mod {self.p}")
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, Scalar):
            self.check_same(value.field)
            return value.value
        raise TypeError(f"cannot coerce {value!r} into GF({self.p})")

    def array(self, data, shape=None) -> np.ndarray:
        raw = np.asarray(data)
        if raw.dtype.kind in "iu":
            out = (raw.astype(np.int64) % self.p)
            return out.reshape(shape) if shape is not None else out
        return super().array(data, shape)

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def reduce(self, arr):
        return np.mod(arr, self.p)

    def einsum(self, subscripts, a, b):
        return np.mod(np.einsum(subscripts, np.mod(a, self.p), np.mod(b, self.p)), self.p)

    def matmul(self, a, b):
        return np.mod(np.matmul(np.mod(a, self.p), np.mod(b, self.p)), self.p)

    def inv(self, a):
        a = self.coerce(a)
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return pow(a, -1, self.p)

    def parse(self, text: str):
        # residues may be written as fractions, e.g. 1/2 means 2^-1 mod p
        try:
            return self.coerce(Fraction(text.strip()))
        except ValueError as exc:
            raise ValueError(f"bad literal {text!r} for GF({self.p})") from exc

    def format(self, value) -> str:
        return str(int(value) % self.p)

    def elements(self) -> range:
        return range(self.p)

    def random(self, rng, shape, density=1.0):
        vals = rng.integers(0, self.p, size=shape, dtype=np.int64)
        if density < 1.0:
            vals = vals * (rng.random(shape) < density)
        return vals


QQ = RationalField()
_prime_fields: dict[int, PrimeField] = {}


def GF(p: int) -> PrimeField:
    if p not in _prime_fields:
        _prime_fields[p] = PrimeField(p)
    return _prime_fields[p]


def field_from_spec(text: str) -> Field:
    """Parse ``"rational"``, ``"QQ"``, ``"gf 7"`` or ``"7"``."""
    t = text.strip().lower()
    if t in ("rational", "qq", "q"):
        return QQ
    m = re.fullmatch(r"(?:gf\s*)?\(?(\d+)\)?", t)
    if not m:
        raise ValueError(f"unknown field {text!r}")
    return GF(int(m.group(1)))


def common_field(*fields: Field) -> Field:
    first = fields[0]
    for f in fields[1:]:
        first.check_same(f)
    return first


class Scalar:
    """A single field element tagged with its field.

    >>> Scalar(QQ, Fraction(1, 2)) + Scalar(QQ, Fraction(1, 3))
    Scalar(QQ, 5/6)
    """

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value):
        self.field = field
        self.value = field.coerce(value)

    def _other(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            self.field.check_same(other.field)
            return other
        return Scalar(self.field, other)

    def _wrap(self, value) -> "Scalar":
        return Scalar(self.field, self.field.reduce(value) if self.field.is_finite else value)

    def __add__(self, other):
        return self._wrap(self.value + self._other(other).value)

    def __sub__(self, other):
        return self._wrap(self.value - self._other(other).value)

    def __mul__(self, other):
        return self._wrap(self.value * self._other(other).value)

    def __truediv__(self, other):
        return self * self._other(other).inverse()

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.value)

    def inverse(self) -> "Scalar":
        return Scalar(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            self.field.check_same(other.field)
            return self.value == other.value
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __repr__(self):
        return f"Scalar({self.field!r}, {self.field.format(self.value)})"

    def __str__(self):
        if self.field.is_finite:
            return f"{self.value} mod {self.field.p}"
        return str(self.value)


def scalar_arith(op: str, a: Scalar, b: Scalar | None = None):
    """Dispatch ``add|sub|mul|neg|inv|eq`` on field-tagged scalars."""
    if op in ("add", "sub", "mul", "eq"):
        if b is None:
            raise TypeError(f"{op} needs two operands")
        a.field.check_same(b.field)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    if op == "eq":
        return a == b
    raise ValueError(f"unknown scalar op {op!r}")


def to_strings(field: Field, values: Iterable) -> list[str]:
    return [field.format(v) for v in values]
