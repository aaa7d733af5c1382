"""Compatibility conditions (U), (CP), (SP), (MP) as evaluable identities.

Each condition is a function of typed terms. A term carries its array of
values on all basis tuples plus the space (M or V) it lives in, so a
term that does not type-check raises immediately instead of silently
broadcasting. Conditions whose printed form does not type-check carry
the minimal repair that does and ``as_printed=False``.

Every (U) condition is one component of the four-variable Malcev
identity on M + V for one assignment of M/V variables; ``slots`` records
that assignment so a diagnostic can compare the condition with the exact
component it is meant to encode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .field import Field
from .tuples import Tuples, bil


class TypeMismatch(TypeError):
    pass


class Term:
    __slots__ = ("f", "a", "sp")

    def __init__(self, f: Field, a: np.ndarray, sp: str):
        self.f, self.a, self.sp = f, a, sp

    def _same(self, other: "Term") -> None:
        if self.sp != other.sp:
            raise TypeMismatch(f"cannot add a term in {self.sp} to one in {other.sp}")

    def __add__(self, other: "Term") -> "Term":
        self._same(other)
        return Term(self.f, self.f.reduce(self.a + other.a), self.sp)

    def __sub__(self, other: "Term") -> "Term":
        self._same(other)
        return Term(self.f, self.f.reduce(self.a - other.a), self.sp)

    def __neg__(self) -> "Term":
        return Term(self.f, self.f.neg(self.a), self.sp)


class Ops:
    """The five operations of an extending datum acting on typed terms."""

    def __init__(self, f: Field, C, tl, tr, om, bv):
        self.f, self.C, self.TL, self.TR, self.OM, self.BV = f, C, tl, tr, om, bv

    def _need(self, name, a: Term, b: Term, sa: str, sb: str):
        if a.sp != sa or b.sp != sb:
            raise TypeMismatch(f"{name} expects ({sa}, {sb}), got ({a.sp}, {b.sp})")

    def br(self, a: Term, b: Term) -> Term:
        """Bracket inside M or inside V."""
        if a.sp != b.sp:
            raise TypeMismatch(f"bracket of {a.sp} with {b.sp}")
        S = self.C if a.sp == "M" else self.BV
        return Term(self.f, bil(self.f, a.a, b.a, S), a.sp)

    def tl(self, a: Term, b: Term) -> Term:
        self._need("<|", a, b, "M", "V")
        return Term(self.f, bil(self.f, a.a, b.a, self.TL), "M")

    def tr(self, a: Term, b: Term) -> Term:
        self._need("|>", a, b, "M", "V")
        return Term(self.f, bil(self.f, a.a, b.a, self.TR), "V")

    def om(self, a: Term, b: Term) -> Term:
        self._need("omega", a, b, "V", "V")
        return Term(self.f, bil(self.f, a.a, b.a, self.OM), "M")


@dataclass(frozen=True)
class Condition:
    cid: str
    variables: tuple[str, ...]
    spaces: str            # one letter per variable, "M" or "V"
    value: str             # space of both sides
    fn: Callable
    as_printed: bool = True
    note: str = ""
    # eq3 slot (x, y, z, w) -> position in ``variables``; None when the
    # condition is not a single component of the identity
    slots: tuple[int, int, int, int] | None = None


def _space_of(name: str) -> str:
    return "M" if name in ("x", "y", "z", "t") else "V"


def _c(cid, variables, value, fn, as_printed=True, note="", slots=None):
    names = tuple(variables.split())
    spaces = "".join(_space_of(n) for n in names)
    return Condition(cid, names, spaces, value, fn, as_printed, note, slots)


ZERO = None  # marker: right-hand side is zero


# ----------------------------------------------------------------- (U) list
# Variables x, y, z, t live in M; u, v, w, p, q live in V.

def _u1(o, x, y, z, q):
    B, L, R = o.br, o.tl, o.tr
    lhs = B(B(x, z), L(y, q)) + L(B(x, z), R(y, q))
    rhs = (L(B(B(x, y), z), q) + B(L(B(y, z), q), x) - L(x, R(B(y, z), q))
           + B(B(L(z, q), x), y) - B(L(x, R(z, q)), y)
           + L(y, R(x, R(z, q)))
           - B(B(L(x, q), y), z) + B(L(y, R(x, q)), z) - L(z, R(y, R(x, q))))
    return lhs, rhs


def _u2(o, x, z, v, q):
    B, L, R, W = o.br, o.tl, o.tr, o.om
    lhs = B(B(x, z), W(v, q)) + L(B(x, z), B(v, q))
    rhs = (L(B(L(x, v), z), q) - L(L(z, R(x, v)), q) - W(R(z, R(x, v)), q)
           - B(L(L(z, v), q), x)
           - B(W(R(z, v), q), x) + L(x, B(R(z, v), q)) + L(x, R(L(z, v), q))
           + L(B(L(z, q), x), v)
           - L(L(x, R(z, q)), v) - W(R(x, R(z, q)), v) - B(L(L(x, q), v), z)
           - B(W(R(x, q), v), z)
           + L(z, B(R(x, q), v)) + L(z, R(L(x, q), v)))
    return lhs, rhs


def _u3(o, x, y, p, q):
    B, L, R, W = o.br, o.tl, o.tr, o.om
    lhs = B(L(x, p), L(y, q)) + L(L(x, p), R(y, q)) - L(L(y, q), R(x, p)) + W(R(x, p), R(y, q))
    rhs = (L(L(B(x, y), p), q) + W(R(B(x, y), p), q) + B(L(L(y, p), q), x) + B(W(R(y, p), q), x)
           - L(x, B(R(y, p), q)) - L(x, R(L(y, p), q)) + B(B(W(p, q), x), y)
           - B(L(x, B(p, q)), y)
           + L(y, R(x, B(p, q))) - L(B(L(x, q), y), p) + L(L(y, R(x, q)), p)
           + W(R(y, R(x, q)), p))
    return lhs, rhs


def _u4(o, x, v, p, q):
    B, L, R, W = o.br, o.tl, o.tr, o.om
    lhs = B(L(x, p), W(v, q)) + L(L(x, p), B(v, q)) - L(W(v, q), R(x, p)) + W(R(x, p), B(v, q))
    rhs = (L(L(L(x, v), p), q) + L(W(R(x, v), p), q) + W(B(R(x, v), p), q) + W(R(L(x, v), p), q)
           + B(L(W(v, p), q), x) + B(W(B(v, p), q), x) - L(x, B(B(v, p), q))
           - L(x, R(W(v, p), q))
           + L(B(W(p, q), x), v) - L(L(x, B(p, q)), v) - W(R(x, B(p, q)), v)
           - L(L(L(x, q), v), p)
           - L(W(R(x, q), v), p) - W(B(R(x, q), v), p) - W(R(L(x, q), v), p))
    return lhs, rhs


def _u5(o, u, y, p, q):
    B, L, R, W = o.br, o.tl, o.tr, o.om
    lhs = B(W(u, p), L(y, q)) + L(W(u, p), R(y, q)) - L(L(y, q), B(u, p)) + W(B(u, p), R(y, q))
    rhs = (-L(L(L(y, u), p), q) - L(W(R(y, u), p), q) - W(B(R(y, u), p), q)
           - W(R(L(y, u), p), q) + L(L(L(y, p), q), u) + L(W(R(y, p), q), u)
           + W(B(R(y, p), q), u) + W(R(L(y, p), q), u) + B(L(W(p, q), u), y)
           + B(W(B(p, q), u), y) - L(y, B(B(p, q), u)) - L(y, R(W(p, q), u))
           + L(B(W(q, u), y), p) - L(L(y, B(q, u)), p) - W(R(y, B(q, u)), p))
    return lhs, rhs


def _u6(o, u, v, p, q):
    B, L, R, W = o.br, o.tl, o.tr, o.om
    lhs = B(W(u, p), W(v, q)) + L(W(u, p), B(v, q)) - L(W(v, q), B(u, p)) + W(B(u, p), B(v, q))
    rhs = None
    for a, b, c, d in ((u, v, p, q), (v, p, q, u), (p, q, u, v), (q, u, v, p)):
        t = (L(L(W(a, b), c), d) + L(W(B(a, b), c), d) + W(B(B(a, b), c), d)
             + W(R(W(a, b), c), d))
        rhs = t if rhs is None else rhs + t
    return lhs, rhs


def _u7(o, x, z, v, q):
    B, L, R = o.br, o.tl, o.tr
    lhs = R(B(x, z), B(v, q))
    rhs = (-B(R(z, R(x, v)), q) + R(B(L(x, v), z), q) - R(L(z, R(x, v)), q)
           + R(x, B(R(z, v), q)) + R(x, R(L(z, v), q)) - B(R(x, R(z, q)), v)
           + R(B(L(z, q), x), v) - R(L(x, R(z, q)), v)
           + R(z, B(R(x, q), v)) + R(z, R(L(x, q), v)))
    return lhs, rhs


def _u8(o, x, y, t, p):
    B, R = o.br, o.tr
    lhs = R(B(y, t), R(x, p))
    rhs = (R(t, R(B(x, y), p)) - R(x, R(t, R(y, p)))
           + R(y, R(x, R(t, p))) - R(B(B(t, x), y), p))
    return lhs, rhs


def _u9(o, x, v, p, q):
    B, L, R, W = o.br, o.tl, o.tr, o.om
    lhs = B(R(x, p), B(v, q)) + R(L(x, p), B(v, q)) - R(W(v, q), R(x, p))
    rhs = (B(B(R(x, v), p), q) + B(R(L(x, v), p), q) + R(L(L(x, v), p), q) + R(W(R(x, v), p), q)
           - R(x, B(B(v, p), q)) - R(x, R(W(v, p), q)) - B(R(x, B(p, q)), v)
           + R(B(W(p, q), x), v)
           - R(L(x, B(p, q)), v) - B(B(R(x, q), v), p) - B(R(L(x, q), v), p)
           - R(L(L(x, q), v), p)
           - R(W(R(x, q), v), p))
    return lhs, rhs


def _u10(o, x, y, p, q):
    B, L, R = o.br, o.tl, o.tr
    lhs = B(R(x, p), R(y, q)) + R(L(x, p), R(y, q)) - R(L(y, q), R(x, p))
    rhs = (B(R(B(x, y), p), q) + R(L(B(x, y), p), q) - R(x, B(R(y, p), q))
           - R(x, R(L(y, p), q))
           + R(y, R(x, B(p, q))) + B(R(y, R(x, q)), p) - R(B(L(x, q), y), p)
           + R(L(y, R(x, q)), p))
    return lhs, rhs


def _u11(o, u, v, p, q):
    B, L, R, W = o.br, o.tl, o.tr, o.om
    lhs = B(B(u, p), B(v, q)) + R(W(u, p), B(v, q)) - R(W(v, q), B(u, p))
    rhs = None
    for a, b, c, d in ((u, v, p, q), (v, p, q, u), (p, q, u, v), (q, u, v, p)):
        t = (B(B(B(a, b), c), d) + B(R(W(a, b), c), d) + R(L(W(a, b), c), d)
             + R(W(B(a, b), c), d))
        rhs = t if rhs is None else rhs + t
    return lhs, rhs


U_CONDITIONS: tuple[Condition, ...] = (
    _c("U1", "x y z q", "M", _u1, False,
       "y(x<|(z|>q)) read as y<|(x|>(z|>q))", slots=(0, 1, 2, 3)),
    _c("U2", "x z v q", "M", _u2, False,
       "omega(z<|(x|>v),q) -> omega(z|>(x|>v),q); x<|((z<|v)<|q) -> x<|((z<|v)|>q); "
       "z<|((x<|q)<|v) -> z<|((x<|q)|>v)", slots=(0, 2, 1, 3)),
    _c("U3", "x y p q", "M", _u3, False,
       "y<|(x<|[p,q]) -> y<|(x|>[p,q]); omega(y<|(x|>q),p) -> omega(y|>(x|>q),p)",
       slots=(0, 1, 2, 3)),
    _c("U4", "x v p q", "M", _u4, False,
       "x<|(omega(v,p)<|q) -> x<|(omega(v,p)|>q)", slots=(0, 1, 2, 3)),
    _c("U5", "u y p q", "M", _u5, False,
       "omega((y<|u)<|p,q) -> omega((y<|u)|>p,q); y<|(omega(p,q)<|u) -> y<|(omega(p,q)|>u)",
       slots=(0, 1, 2, 3)),
    _c("U6", "u v p q", "M", _u6, slots=(0, 1, 2, 3)),
    _c("U7", "x z v q", "V", _u7, False,
       "[z<|(x|>v),q] -> [z|>(x|>v),q]; x|>((z<|v)<|q) -> x|>((z<|v)|>q); "
       "z|>((x<|q)<|v) -> z|>((x<|q)|>v)", slots=(0, 2, 1, 3)),
    _c("U8", "x y t p", "V", _u8, False,
       "x|>(t<|(y|>p)) -> x|>(t|>(y|>p)); y|>(x<|(t|>p)) -> y|>(x|>(t|>p))",
       slots=(1, 0, 2, 3)),
    _c("U9", "x v p q", "V", _u9, False,
       "((x<|q)|>v)|>p -> ((x<|q)<|v)|>p", slots=(0, 1, 2, 3)),
    _c("U10", "x y p q", "V", _u10, slots=(0, 1, 2, 3)),
    _c("U11", "u v p q", "V", _u11, slots=(0, 1, 2, 3)),
)


# ---------------------------------------------------------------- (CP) list
# Crossed products have no |>; printed |> terms are evaluated with |> = 0.

def _cp1(o, x, y, z, q):
    B, L = o.br, o.tl
    lhs = B(B(x, z), L(y, q))
    rhs = L(B(B(x, y), z), q) + B(L(B(y, z), q), x) + B(B(L(z, q), x), y) - B(B(L(x, q), y), z)
    return lhs, rhs


def _cp2(o, x, z, v, q):
    B, L, W, R = o.br, o.tl, o.om, o.tr
    lhs = B(B(x, z), W(v, q)) + L(B(x, z), B(v, q))
    rhs = (L(B(L(x, v), z), q) - B(L(L(z, v), q), x) + L(x, R(L(z, v), q))
           + L(B(L(z, q), x), v) - B(L(L(x, q), v), z) + L(z, R(L(x, q), v)))
    return lhs, rhs


def _cp3(o, x, y, p, q):
    B, L, W, R = o.br, o.tl, o.om, o.tr
    lhs = B(L(x, p), L(y, q))
    rhs = (L(L(B(x, y), p), q) + B(L(L(y, p), q), x) + B(B(W(p, q), x), y)
           - B(L(x, B(p, q)), y) + L(y, R(x, B(p, q))) - L(B(L(x, q), y), p))
    return lhs, rhs


def _cp4(o, x, v, p, q):
    B, L, W, R = o.br, o.tl, o.om, o.tr
    lhs = B(L(x, p), W(v, q)) + L(L(x, p), B(v, q))
    rhs = (L(L(L(x, v), p), q) - L(x, B(B(v, p), q)) - L(x, R(W(v, p), q))
           + B(L(W(v, p), q), x) + B(W(B(v, p), q), x) + L(B(W(p, q), x), v)
           - L(L(x, B(p, q)), v) - W(R(x, B(p, q)), v) - L(L(L(x, q), v), p))
    return lhs, rhs


def _cp5(o, u, y, p, q):
    B, L, W, R = o.br, o.tl, o.om, o.tr
    lhs = B(W(u, p), L(y, q)) - L(L(y, q), B(u, p))
    rhs = (-L(L(L(y, u), p), q) - W(R(L(y, u), p), q) + L(L(L(y, p), q), u)
           + B(L(W(p, q), u), y) + B(W(B(p, q), u), y) - L(y, B(B(p, q), u))
           - L(y, R(W(p, q), u)) + L(B(W(q, u), y), p) - L(L(y, B(q, u)), p))
    return lhs, rhs


def _cp6(o, u, v, p, q):
    B, L, W, R = o.br, o.tl, o.om, o.tr
    lhs = B(W(u, p), W(v, q)) + L(W(u, p), B(v, q)) - L(W(v, q), B(u, p)) + W(B(u, p), B(v, q))
    rhs = (L(L(W(u, v), p), q) + L(W(B(u, v), p), q) + W(B(B(u, v), p), q)
           + L(L(W(v, p), q), u) + L(W(B(v, p), q), u) + W(B(B(v, p), q), u)
           + L(L(W(p, q), u), v) + L(W(B(p, q), u), v) + W(B(B(p, q), u), v)
           + W(R(W(p, q), u), v)
           + L(L(W(q, u), v), p) + L(W(B(q, u), v), p) + W(B(B(q, u), v), p))
    return lhs, rhs


_NO_TR = "printed |> term evaluated with |> = 0"

CP_CONDITIONS: tuple[Condition, ...] = (
    _c("CP1", "x y z q", "M", _cp1, slots=(0, 1, 2, 3)),
    _c("CP2", "x z v q", "M", _cp2, False,
       "x<|((z<|v)<|q) and z<|((x<|q)<|v) repaired to |> inner products, hence 0",
       slots=(0, 2, 1, 3)),
    _c("CP3", "x y p q", "M", _cp3, False,
       "y<|(x<|[p,q]) repaired to y<|(x|>[p,q]), hence 0", slots=(0, 1, 2, 3)),
    _c("CP4", "x v p q", "M", _cp4, False,
       "x<|(omega(v,p)<|q) repaired to |>; " + _NO_TR, slots=(0, 1, 2, 3)),
    _c("CP5", "u y p q", "M", _cp5, False,
       "omega((y<|u)<|p,q) and y<|(omega(p,q)<|u) repaired to |>, hence 0",
       slots=(0, 1, 2, 3)),
    _c("CP6", "u v p q", "M", _cp6, False, _NO_TR, slots=(0, 1, 2, 3)),
)


# ---------------------------------------------------------------- (SP) list

def _sp1(o, x, z, v, q):
    B, W, R = o.br, o.om, o.tr
    lhs = B(B(x, z), W(v, q))
    rhs = -B(W(R(z, v), q), x) - W(R(x, R(z, q)), v) - B(W(R(x, q), v), z)
    return lhs, rhs


def _sp2(o, x, y, p, q):
    B, W, R = o.br, o.om, o.tr
    lhs = W(R(x, p), R(y, q))
    rhs = W(R(B(x, y), p), q) + B(W(R(y, p), q), x) + B(B(W(p, q), x), y)
    return lhs, rhs


def _sp3(o, x, v, p, q):
    B, W, R = o.br, o.om, o.tr
    lhs = W(R(x, p), B(v, q))
    rhs = (W(B(R(x, v), p), q) + B(W(B(v, p), q), x) - W(R(x, B(p, q)), v)
           - W(B(R(x, q), v), p))
    return lhs, rhs


def _sp4(o, u, v, p, q):
    B, W, R = o.br, o.om, o.tr
    lhs = B(W(u, p), W(v, q)) + W(B(u, p), B(v, q))
    rhs = None
    for a, b, c, d in ((u, v, p, q), (v, p, q, u), (p, q, u, v), (q, u, v, p)):
        t = W(B(B(a, b), c), d) + W(R(W(a, b), c), d)
        rhs = t if rhs is None else rhs + t
    return lhs, rhs


def _sp5(o, x, z, v, q):
    B, R = o.br, o.tr
    return R(B(x, z), B(v, q)), R(z, B(R(x, q), v)) - B(R(x, R(z, q)), v)


def _sp6(o, x, y, t, p):
    B, R = o.br, o.tr
    return R(B(y, t), R(x, p)), R(t, R(B(x, y), p)) - R(B(B(t, x), y), p)


def _sp7(o, x, v, p, q):
    B, W, R = o.br, o.om, o.tr
    lhs = B(R(x, p), B(v, q)) - R(W(v, q), R(x, p))
    rhs = (B(B(R(x, v), p), q) - R(x, B(B(v, p), q)) + R(W(R(x, v), p), q)
           - R(x, R(W(v, p), q)) - B(R(x, B(p, q)), v) - B(B(R(x, q), v), p)
           + R(B(W(p, q), x), v) - R(W(R(x, q), v), p))
    return lhs, rhs


def _sp8(o, x, y, p, q):
    B, R = o.br, o.tr
    lhs = B(R(x, p), R(y, q))
    rhs = (B(R(B(x, y), p), q) - R(x, B(R(y, p), q)) + R(y, R(x, B(p, q)))
           + B(R(y, R(x, q)), p))
    return lhs, rhs


def _sp9(o, u, v, p, q):
    B, W, R = o.br, o.om, o.tr
    lhs = R(W(u, p), B(v, q)) - R(W(v, q), B(u, p))
    rhs = None
    for a, b, c, d in ((u, v, p, q), (v, p, q, u), (p, q, u, v), (q, u, v, p)):
        t = B(R(W(a, b), c), d) + R(W(B(a, b), c), d)
        rhs = t if rhs is None else rhs + t
    return lhs, rhs


SP_CONDITIONS: tuple[Condition, ...] = (
    _c("SP1", "x z v q", "M", _sp1, slots=(0, 2, 1, 3)),
    _c("SP2", "x y p q", "M", _sp2, slots=(0, 1, 2, 3)),
    _c("SP3", "x v p q", "M", _sp3, slots=(0, 1, 2, 3)),
    _c("SP4", "u v p q", "M", _sp4, slots=(0, 1, 2, 3)),
    _c("SP5", "x z v q", "V", _sp5, slots=(0, 2, 1, 3)),
    _c("SP6", "x y t p", "V", _sp6, slots=(1, 0, 2, 3)),
    _c("SP7", "x v p q", "V", _sp7, slots=(0, 1, 2, 3)),
    _c("SP8", "x y p q", "V", _sp8, slots=(0, 1, 2, 3)),
    _c("SP9", "u v p q", "V", _sp9, slots=(0, 1, 2, 3)),
)


# ---------------------------------------------------------------- (MP) list
# Printed as "expression = 0"; V acts on M through x<|v (valued in M).

def _mp1(o, x, y, z, u):
    B, L, R = o.br, o.tl, o.tr
    e = (B(B(L(x, u), y), z) - L(B(B(y, z), x), u) - B(L(y, R(x, u)), z)
         - B(B(L(z, u), x), y) + L(z, R(y, R(x, u))) + B(B(x, z), L(y, u))
         - L(B(B(x, y), z), u) + L(B(x, z), R(y, u)) + B(L(x, R(z, u)), y)
         + L(x, R(B(y, z), u)) - L(y, R(x, R(z, u))))
    return e, ZERO


def _mp2(o, x, u, v, w):
    B, L, R = o.br, o.tl, o.tr
    e = (B(B(R(x, u), v), w) - B(R(x, B(v, w)), u) - B(R(L(x, u), v), w)
         - B(B(R(x, w), u), v) + R(L(L(x, u), v), w) + B(B(u, w), R(x, v))
         - R(x, B(B(u, v), w)) + B(R(L(x, w), u), v) + R(L(x, v), B(u, w))
         + R(L(x, B(v, w)), u) - R(L(L(x, w), u), v))
    return e, ZERO


def _mp3(o, x, y, u, v):
    B, L, R = o.br, o.tl, o.tr
    e = (L(y, R(x, B(u, v))) - L(L(y, v), R(x, u)) + L(B(L(x, v), y), u)
         - B(L(L(y, u), v), x) - B(L(x, B(u, v)), y) + L(L(x, u), R(y, v))
         - L(x, B(R(y, u), v)) - L(L(B(x, y), u), v) + B(L(x, u), L(y, v))
         - L(L(y, R(x, v)), u) + L(x, R(L(y, u), v)))
    return e, ZERO


def _mp4(o, x, y, u, v):
    B, L, R = o.br, o.tl, o.tr
    e = (R(L(B(x, y), u), v) - R(L(x, u), R(y, v)) + R(x, B(R(y, u), v))
         - B(R(y, R(x, v)), u) - B(R(B(x, y), u), v) + R(L(y, v), R(x, u))
         - R(B(L(x, v), y), u) - R(y, R(x, B(u, v))) + B(R(x, u), R(y, v))
         - R(x, R(L(y, u), v)) + R(L(y, R(x, v)), u))
    return e, ZERO


def _mp5(o, x, y, u, v):
    B, L, R = o.br, o.tl, o.tr
    e = (L(B(L(y, v), x), u) - L(y, B(R(x, v), u)) - B(L(L(x, v), u), y)
         + L(B(L(x, u), y), v) - B(L(L(y, u), v), x) - L(x, B(R(y, u), v))
         - L(L(y, R(x, u)), v) - L(L(x, R(y, v)), u) + L(B(x, y), B(u, v))
         + L(x, R(L(y, u), v)) + L(y, R(L(x, v), u)))
    return e, ZERO


def _mp6(o, x, y, u, v):
    B, L, R = o.br, o.tl, o.tr
    e = (R(x, B(R(y, v), u)) - R(B(L(y, u), x), v) - B(R(x, R(y, u)), v)
         + R(y, B(R(x, u), v)) - B(R(y, R(x, v)), u) - R(B(L(x, v), y), u)
         - R(y, R(L(x, u), v)) - R(x, R(L(y, v), u)) + R(B(x, y), B(u, v))
         + R(L(y, R(x, v)), u) + R(L(x, R(y, u)), v))
    return e, ZERO


MP_CONDITIONS: tuple[Condition, ...] = (
    _c("MP1", "x y z u", "M", _mp1),
    _c("MP2", "x u v w", "V", _mp2, False, "unbalanced parenthesis: ((x<|u)<|v)|>w"),
    _c("MP3", "x y u v", "M", _mp3, False, "[v<|x,y]<|u read as [x<|v,y]<|u"),
    _c("MP4", "x y u v", "V", _mp4),
    _c("MP5", "x y u v", "M", _mp5, False, "unbalanced parenthesis: (y<|(x|>u))<|v"),
    _c("MP6", "x y u v", "V", _mp6),
)


FAMILIES = {
    "U": U_CONDITIONS,
    "CP": CP_CONDITIONS,
    "SP": SP_CONDITIONS,
    "MP": MP_CONDITIONS,
}


def evaluate(cond: Condition, f: Field, C, tl, tr, om, bv):
    """Both sides of ``cond`` on every basis tuple of its variable pattern.

    Returns (lhs, rhs, dims) with a trailing coordinate axis.
    """
    m, v = C.shape[0], bv.shape[0]
    spaces = cond.spaces
    dims = tuple(m if s == "M" else v for s in spaces)
    tup = Tuples(f, dims)
    ops = Ops(f, C, tl, tr, om, bv)
    terms = [Term(f, tup.var(k), s) for k, s in enumerate(spaces)]
    lhs, rhs = cond.fn(ops, *terms)
    if lhs.sp != cond.value or (rhs is not None and rhs.sp != cond.value):
        raise TypeMismatch(f"{cond.cid} evaluates outside {cond.value}")
    width = m if cond.value == "M" else v
    rhs_a = tup.zero(width) if rhs is None else rhs.a
    return lhs.a, rhs_a, dims


def component_residual(cond: Condition, f: Field, E_table: np.ndarray, m: int):
    """Residual of the four-variable identity on M + V restricted to the
    variable pattern and output component of ``cond`` (axes in the
    condition's variable order)."""
    n = E_table.shape[0]
    spaces = cond.spaces
    # variable k of the condition occupies eq3 slot s where slots[s] == k
    vecs = []
    for k, s in enumerate(spaces):
        rows = range(m) if s == "M" else range(m, n)
        basis = np.stack([f.unit(n, i) for i in rows])
        vecs.append(basis)
    X = []
    for s in range(4):
        k = cond.slots[s]
        shape = [1] * 4 + [n]
        shape[k] = vecs[k].shape[0]
        X.append(vecs[k].reshape(shape))

    def br(a, b):
        return bil(f, a, b, E_table)

    x, y, z, w = X
    lhs = br(br(x, z), br(y, w))
    rhs = f.reduce(br(br(br(x, y), z), w) + br(br(br(y, z), w), x)
                   + br(br(br(z, w), x), y) + br(br(br(w, x), y), z))
    res = f.reduce(lhs - rhs)
    return res[..., :m] if cond.value == "M" else res[..., m:]

