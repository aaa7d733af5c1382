"""Line-oriented text format for algebras, extending data and twisted derivations.

An algebra document::

    # comments run to the end of the line
    field gf 5            # or: field rational
    dim 4
    basis e1 e2 e3 e4     # optional, defaults to e1 .. en
    [e1,e2] = e2
    [e2,e3] = 2*e4 - 1/2*e1

A datum document adds a second space and the four maps::

    space V { basis v }
    tl e2 v = e4          # e2 <| v, an element of M
    tr e1 v = v           # e1 |> v, an element of V
    omega v1 v2 = e1      # skew, in M
    bv [v1,v2] = v1       # bracket on V

Fragments (module actions, cocycles, twisted derivations) reuse the same
lines on top of an algebra parsed separately. Anything omitted is zero.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .algebra import MalcevAlgebra
from .field import QQ, Field, FieldError, GF
from .field import BadFieldChar as _CharError
from .flag import TwistedDerivation
from .reps import Cocycle, ModuleAction
from .unified import ExtendingDatum


class ParseError(Exception):
    """Base class; ``line`` and ``col`` are 1-based."""

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, column {col}: {msg}" if line else msg)
        # set after the base __init__: SyntaxError would overwrite msg
        self.msg, self.line, self.col = msg, line, col


class DocumentSyntaxError(ParseError, SyntaxError):
    pass


class UnknownBasisName(ParseError):
    pass


class DuplicatePair(ParseError):
    pass


class WrongCodomain(ParseError):
    pass


class BadFieldChar(ParseError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[-+*\[\],={}]))")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokens(text: str, line: int) -> list[_Tok]:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise DocumentSyntaxError(f"unexpected character {text[bad]!r}", line, bad + 1)
        kind = m.lastgroup
        out.append(_Tok(kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    return out


@dataclass
class _Cursor:
    toks: list[_Tok]
    line: int
    width: int
    i: int = 0

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, kind: str | None = None, text: str | None = None) -> _Tok:
        t = self.peek()
        want = text or kind or "token"
        if t is None:
            raise DocumentSyntaxError(f"expected {want} at end of line", self.line, self.width + 1)
        if (kind and t.kind != kind) or (text and t.text != text):
            raise DocumentSyntaxError(f"expected {want}, found {t.text!r}", self.line, t.col)
        self.i += 1
        return t

    def done(self) -> None:
        t = self.peek()
        if t is not None:
            raise DocumentSyntaxError(f"unexpected {t.text!r}", self.line, t.col)


@dataclass
class Document:
    """Raw contents of a document before it is turned into objects."""

    field: Field | None = None
    dim: int | None = None
    names: tuple[str, ...] | None = None
    v_names: tuple[str, ...] | None = None
    brackets: dict = dc_field(default_factory=dict)     # (i, j) -> {k: coef}
    tl: dict = dc_field(default_factory=dict)           # (i, a) -> M comb
    tr: dict = dc_field(default_factory=dict)           # (i, a) -> V comb
    omega: dict = dc_field(default_factory=dict)        # (a, b) -> M comb
    cocycle: dict = dc_field(default_factory=dict)      # (i, j) -> V comb
    bv: dict = dc_field(default_factory=dict)           # (a, b) -> V comb
    lam: dict = dc_field(default_factory=dict)          # i -> scalar
    D: dict = dc_field(default_factory=dict)            # i -> M comb


_DIRECTIVES = {
    "algebra": {"field", "dim", "basis", "["},
    "datum": {"field", "dim", "basis", "[", "space", "tl", "tr", "omega", "bv"},
    "action": {"space", "tr"},
    "cocycle": {"omega"},
    "derivation": {"lambda", "D"},
}


class _Parser:
    def __init__(self, mode: str, base: MalcevAlgebra | None = None,
                 v_names: tuple[str, ...] | None = None):
        self.mode = mode
        self.doc = Document()
        if base is not None:
            self.doc.field, self.doc.dim, self.doc.names = base.field, base.dim, base.names
        if v_names is not None:
            self.doc.v_names = tuple(v_names)
        self.in_space = False
        self.seen_body = False

    # ------------------------------------------------------------ helpers
    @property
    def f(self) -> Field:
        if self.doc.field is None:
            self.doc.field = QQ
        return self.doc.field

    def m_names(self, line: int, col: int) -> tuple[str, ...]:
        d = self.doc
        if d.names is None:
            if d.dim is None:
                raise DocumentSyntaxError("dim must be declared before use", line, col)
            d.names = tuple(f"e{i + 1}" for i in range(d.dim))
        return d.names

    def v_list(self, line: int, col: int) -> tuple[str, ...]:
        if self.doc.v_names is None:
            raise DocumentSyntaxError("space V must be declared before use", line, col)
        return self.doc.v_names

    def index(self, tok: _Tok, space: str, line: int) -> int:
        names = self.m_names(line, tok.col) if space == "M" else self.v_list(line, tok.col)
        if tok.text in names:
            return names.index(tok.text)
        other = self.doc.v_names if space == "M" else self.doc.names
        where = "M" if space == "M" else "V"
        if other and tok.text in other:
            raise UnknownBasisName(f"{tok.text!r} is not a basis name of {where}", line, tok.col)
        raise UnknownBasisName(f"unknown basis name {tok.text!r}", line, tok.col)

    def scalar(self, tok: _Tok, line: int, neg: bool = False):
        try:
            v = self.f.parse(tok.text)
        except (ValueError, ZeroDivisionError, FieldError) as exc:
            raise DocumentSyntaxError(str(exc), line, tok.col) from exc
        return self.f.neg(v) if neg else v

    def combination(self, cur: _Cursor, space: str) -> dict[int, object]:
        """``[sign] [coef *] name {(+|-) [coef *] name}`` or ``0``."""
        f, line = self.f, cur.line
        out: dict[int, object] = {}
        first = True
        t = cur.peek()
        if t is not None and t.kind == "num" and t.text == "0":
            cur.take()
            cur.done()
            return out
        while True:
            t = cur.peek()
            neg = False
            if t is not None and t.kind == "op" and t.text in ("+", "-"):
                neg = t.text == "-"
                cur.take()
            elif not first:
                break
            t = cur.peek()
            coef = f.one
            if t is not None and t.kind == "num":
                coef = self.scalar(cur.take(), line)
                cur.take("op", "*")
            name = cur.take("name")
            try:
                k = self.index(name, space, line)
            except UnknownBasisName as exc:
                other = self.doc.v_names if space == "M" else self.doc.names
                if other and name.text in other:
                    raise WrongCodomain(
                        f"{name.text!r} lies in the wrong space; expected a combination in "
                        f"{space}", line, name.col) from exc
                raise
            c = f.neg(coef) if neg else coef
            out[k] = f.reduce(out.get(k, f.zero) + c) if f.is_finite else out.get(k, f.zero) + c
            first = False
            if cur.peek() is None:
                break
        cur.done()
        return out

    def vector(self, comb: dict, n: int) -> np.ndarray:
        v = self.f.zeros(n)
        for k, c in comb.items():
            v[k] = c
        return v

    # ------------------------------------------------------------ lines
    def feed(self, raw: str, line: int) -> None:
        text = raw.split("#", 1)[0].rstrip()
        if not text.strip():
            return
        toks = _tokens(text, line)
        cur = _Cursor(toks, line, len(text))
        head = toks[0]
        key = head.text
        if self.in_space:
            self.space_line(cur)
            return
        allowed = _DIRECTIVES[self.mode]
        if key not in allowed:
            raise DocumentSyntaxError(f"unexpected {key!r} in a {self.mode} document", line, head.col)
        getattr(self, "d_" + ("bracket" if key == "[" else key))(cur)

    def _header(self, cur: _Cursor, what: str) -> None:
        if self.seen_body:
            raise DocumentSyntaxError(f"{what} must come before bracket lines", cur.line,
                                      cur.toks[0].col)

    def d_field(self, cur: _Cursor) -> None:
        self._header(cur, "field")
        cur.take()
        kind = cur.take("name")
        if kind.text == "rational":
            cur.done()
            self.doc.field = QQ
            return
        if kind.text != "gf":
            raise DocumentSyntaxError(f"unknown field {kind.text!r}", cur.line, kind.col)
        p = cur.take("num")
        cur.done()
        try:
            self.doc.field = GF(int(p.text))
        except _CharError as exc:
            raise BadFieldChar(str(exc), cur.line, p.col) from exc
        except (FieldError, ValueError) as exc:
            raise DocumentSyntaxError(str(exc), cur.line, p.col) from exc

    def d_dim(self, cur: _Cursor) -> None:
        self._header(cur, "dim")
        cur.take()
        n = cur.take("num")
        cur.done()
        if "/" in n.text or int(n.text) < 1:
            raise DocumentSyntaxError("dim must be a positive integer", cur.line, n.col)
        if self.doc.dim is not None:
            raise DocumentSyntaxError("dim declared twice", cur.line, n.col)
        if self.doc.names is not None and len(self.doc.names) != int(n.text):
            raise DocumentSyntaxError("dim does not match the basis", cur.line, n.col)
        self.doc.dim = int(n.text)

    def _names(self, cur: _Cursor) -> tuple[str, ...]:
        names = []
        while cur.peek() is not None and cur.peek().kind == "name":
            t = cur.take("name")
            if t.text in names or (self.doc.names and t.text in self.doc.names
                                   and self.in_space):
                raise DocumentSyntaxError(f"basis name {t.text!r} repeated", cur.line, t.col)
            names.append(t.text)
        if not names:
            raise DocumentSyntaxError("basis needs at least one name", cur.line, cur.width + 1)
        return tuple(names)

    def d_basis(self, cur: _Cursor) -> None:
        self._header(cur, "basis")
        head = cur.take()
        names = self._names(cur)
        cur.done()
        if self.doc.names is not None:
            raise DocumentSyntaxError("basis declared twice", cur.line, head.col)
        if self.doc.dim is not None and self.doc.dim != len(names):
            raise DocumentSyntaxError(f"basis has {len(names)} names but dim is {self.doc.dim}",
                                      cur.line, head.col)
        self.doc.dim = len(names)
        self.doc.names = names

    def _pair(self, cur: _Cursor, space: str) -> tuple[int, int, _Tok]:
        open_ = cur.take("op", "[")
        a = cur.take("name")
        cur.take("op", ",")
        b = cur.take("name")
        cur.take("op", "]")
        i, j = self.index(a, space, cur.line), self.index(b, space, cur.line)
        if i == j:
            raise DocumentSyntaxError("diagonal bracket: [x,x] is always zero", cur.line, open_.col)
        return i, j, open_

    def _store_skew(self, table: dict, i: int, j: int, comb, cur: _Cursor, col: int) -> None:
        if (i, j) in table or (j, i) in table:
            raise DuplicatePair("pair already given (in some order)", cur.line, col)
        table[(i, j)] = comb

    def d_bracket(self, cur: _Cursor) -> None:
        self.seen_body = True
        i, j, open_ = self._pair(cur, "M")
        cur.take("op", "=")
        comb = self.combination(cur, "M")
        self._store_skew(self.doc.brackets, i, j, comb, cur, open_.col)

    def d_space(self, cur: _Cursor) -> None:
        head = cur.take()
        name = cur.take("name")
        if name.text != "V":
            raise DocumentSyntaxError("only 'space V' is supported", cur.line, name.col)
        if self.doc.v_names is not None:
            raise DocumentSyntaxError("space V declared twice", cur.line, head.col)
        cur.take("op", "{")
        self.in_space = True
        self.space_open = (cur.line, head.col)
        if cur.peek() is not None:
            self.space_line(cur)

    def space_line(self, cur: _Cursor) -> None:
        t = cur.peek()
        if t.kind == "op" and t.text == "}":
            cur.take()
            cur.done()
            self.close_space(cur, t)
            return
        if t.text != "basis":
            raise DocumentSyntaxError("expected 'basis' inside space V", cur.line, t.col)
        if self.doc.v_names is not None:
            raise DocumentSyntaxError("space V has two basis lines", cur.line, t.col)
        cur.take()
        names = self._names(cur)
        if self.doc.names is not None:
            for nm in names:
                if nm in self.doc.names:
                    raise DocumentSyntaxError(f"{nm!r} is already a basis name of M",
                                              cur.line, t.col)
        self.doc.v_names = names
        if cur.peek() is not None:
            close = cur.take("op", "}")
            cur.done()
            self.close_space(cur, close)

    def close_space(self, cur: _Cursor, tok: _Tok) -> None:
        if self.doc.v_names is None:
            raise DocumentSyntaxError("space V needs a basis", cur.line, tok.col)
        self.in_space = False

    def _mv(self, cur: _Cursor, s1: str, s2: str):
        head = cur.take()
        a = cur.take("name")
        b = cur.take("name")
        i, j = self.index(a, s1, cur.line), self.index(b, s2, cur.line)
        cur.take("op", "=")
        return i, j, head

    def d_tl(self, cur: _Cursor) -> None:
        i, a, head = self._mv(cur, "M", "V")
        comb = self.combination(cur, "M")
        if (i, a) in self.doc.tl:
            raise DuplicatePair("tl entry given twice", cur.line, head.col)
        self.doc.tl[(i, a)] = comb

    def d_tr(self, cur: _Cursor) -> None:
        i, a, head = self._mv(cur, "M", "V")
        comb = self.combination(cur, "V")
        if (i, a) in self.doc.tr:
            raise DuplicatePair("tr entry given twice", cur.line, head.col)
        self.doc.tr[(i, a)] = comb

    def d_omega(self, cur: _Cursor) -> None:
        dom, cod = ("M", "V") if self.mode == "cocycle" else ("V", "M")
        i, j, head = self._mv(cur, dom, dom)
        if i == j:
            raise DocumentSyntaxError("omega is skew: diagonal entries must vanish",
                                      cur.line, head.col)
        comb = self.combination(cur, cod)
        self._store_skew(self.doc.cocycle if self.mode == "cocycle" else self.doc.omega,
                         i, j, comb, cur, head.col)

    def d_bv(self, cur: _Cursor) -> None:
        head = cur.take()
        i, j, _ = self._pair(cur, "V")
        cur.take("op", "=")
        comb = self.combination(cur, "V")
        self._store_skew(self.doc.bv, i, j, comb, cur, head.col)

    def d_lambda(self, cur: _Cursor) -> None:
        head = cur.take()
        i = self.index(cur.take("name"), "M", cur.line)
        cur.take("op", "=")
        neg = False
        if cur.peek() is not None and cur.peek().text == "-":
            cur.take()
            neg = True
        val = self.scalar(cur.take("num"), cur.line, neg)
        cur.done()
        if i in self.doc.lam:
            raise DuplicatePair("lambda entry given twice", cur.line, head.col)
        self.doc.lam[i] = val

    def d_D(self, cur: _Cursor) -> None:
        head = cur.take()
        i = self.index(cur.take("name"), "M", cur.line)
        cur.take("op", "=")
        comb = self.combination(cur, "M")
        if i in self.doc.D:
            raise DuplicatePair("D entry given twice", cur.line, head.col)
        self.doc.D[i] = comb

    def finish(self, nlines: int) -> Document:
        if self.in_space:
            raise DocumentSyntaxError("unterminated space block", *self.space_open)
        if self.mode in ("algebra", "datum"):
            if self.doc.dim is None:
                raise DocumentSyntaxError("missing dim or basis line", max(nlines, 1), 1)
            self.m_names(nlines, 1)
        if self.mode in ("datum", "action") and self.doc.v_names is None:
            raise DocumentSyntaxError("missing 'space V { basis ... }' block", max(nlines, 1), 1)
        if self.doc.field is None:
            self.doc.field = QQ
        return self.doc


def parse_document(text: str, mode: str = "datum", base: MalcevAlgebra | None = None,
                   v_names=None) -> Document:
    if mode not in _DIRECTIVES:
        raise ValueError(f"unknown document mode {mode!r}")
    p = _Parser(mode, base, v_names)
    lines = text.splitlines()
    for n, raw in enumerate(lines, start=1):
        p.feed(raw, n)
    return p.finish(len(lines))


def _table(f: Field, entries: dict, n: int, d: int) -> np.ndarray:
    t = f.zeros((n, n, d))
    for (i, j), comb in entries.items():
        for k, c in comb.items():
            t[i, j, k] = c
            t[j, i, k] = f.neg(c)
    return t


def _algebra(doc: Document) -> MalcevAlgebra:
    f = doc.field
    return MalcevAlgebra(f, doc.names, _table(f, doc.brackets, doc.dim, doc.dim))


def parse_algebra(text: str) -> MalcevAlgebra:
    return _algebra(parse_document(text, "algebra"))


def _datum_from(doc: Document, M: MalcevAlgebra) -> ExtendingDatum:
    f, m, v = M.field, M.dim, len(doc.v_names)
    tl = f.zeros((m, v, m))
    tr = f.zeros((m, v, v))
    for (i, a), comb in doc.tl.items():
        for k, c in comb.items():
            tl[i, a, k] = c
    for (i, a), comb in doc.tr.items():
        for k, c in comb.items():
            tr[i, a, k] = c
    return ExtendingDatum(M, doc.v_names, tl, tr, _table(f, doc.omega, v, m), _table(f, doc.bv, v, v))


def parse_datum(text: str) -> ExtendingDatum:
    doc = parse_document(text, "datum")
    return _datum_from(doc, _algebra(doc))


def parse_action(text: str, A: MalcevAlgebra) -> ModuleAction:
    doc = parse_document(text, "action", base=A)
    f, m, v = A.field, A.dim, len(doc.v_names)
    rho = f.zeros((m, v, v))
    for (i, a), comb in doc.tr.items():
        for k, c in comb.items():
            rho[i, a, k] = c
    return ModuleAction(rho, doc.v_names)


def parse_cocycle(text: str, A: MalcevAlgebra, act: ModuleAction) -> Cocycle:
    doc = parse_document(text, "cocycle", base=A, v_names=act.names)
    f = A.field
    return Cocycle(f, _table(f, doc.cocycle, A.dim, act.carrier_dim))


def parse_derivation(text: str, M: MalcevAlgebra) -> TwistedDerivation:
    doc = parse_document(text, "derivation", base=M)
    f, n = M.field, M.dim
    lam = f.zeros(n)
    D = f.zeros((n, n))
    for i, c in doc.lam.items():
        lam[i] = c
    for i, comb in doc.D.items():
        for k, c in comb.items():
            D[i, k] = c
    return TwistedDerivation(lam, D)


def parse_assignment(text: str, M: MalcevAlgebra) -> np.ndarray:
    """``e1=1,e3=-2/3`` as a vector (used for ``--lambda``)."""
    f = M.field
    vec = f.zeros(M.dim)
    if not text.strip():
        return vec
    seen = set()
    for col, part in _split_commas(text):
        if "=" not in part:
            raise DocumentSyntaxError(f"expected name=value, got {part!r}", 1, col)
        name, val = (s.strip() for s in part.split("=", 1))
        if name not in M.names:
            raise UnknownBasisName(f"unknown basis name {name!r}", 1, col)
        if name in seen:
            raise DuplicatePair(f"{name!r} given twice", 1, col)
        seen.add(name)
        try:
            vec[M.names.index(name)] = f.parse(val)
        except (ValueError, ZeroDivisionError, FieldError) as exc:
            raise DocumentSyntaxError(str(exc), 1, col) from exc
    return vec


def _split_commas(text: str):
    col = 1
    for part in text.split(","):
        yield col, part
        col += len(part) + 1


# ------------------------------------------------------------------ serialize

def _fmt_comb(f: Field, vec, names) -> str:
    terms = []
    for k, c in enumerate(vec):
        if f.is_finite:
            c = int(c) % f.p
            if c == 0:
                continue
            terms.append(("+", names[k] if c == 1 else f"{c}*{names[k]}"))
        else:
            c = Fraction(c)
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            terms.append((sign, names[k] if a == 1 else f"{a}*{names[k]}"))
    if not terms:
        return "0"
    head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return " ".join([head] + [f"{s} {t}" for s, t in terms[1:]])


def _field_line(f: Field) -> str:
    return f"field {f.describe()}"


def _algebra_lines(A: MalcevAlgebra) -> list[str]:
    f = A.field
    lines = [_field_line(f), f"dim {A.dim}", "basis " + " ".join(A.names)]
    for i in range(A.dim):
        for j in range(i + 1, A.dim):
            if not f.all_zero(A.table[i, j]):
                lines.append(f"[{A.names[i]},{A.names[j]}] = {_fmt_comb(f, A.table[i, j], A.names)}")
    return lines


def serialize_algebra(A: MalcevAlgebra) -> str:
    return "\n".join(_algebra_lines(A)) + "\n"


def serialize_datum(d: ExtendingDatum) -> str:
    f, M = d.field, d.M
    mn, vn = M.names, d.names_v
    lines = _algebra_lines(M) + ["space V { basis " + " ".join(vn) + " }"]
    for i in range(M.dim):
        for a in range(d.dim_v):
            if not f.all_zero(d.tl[i, a]):
                lines.append(f"tl {mn[i]} {vn[a]} = {_fmt_comb(f, d.tl[i, a], mn)}")
    for i in range(M.dim):
        for a in range(d.dim_v):
            if not f.all_zero(d.tr[i, a]):
                lines.append(f"tr {mn[i]} {vn[a]} = {_fmt_comb(f, d.tr[i, a], vn)}")
    for a in range(d.dim_v):
        for b in range(a + 1, d.dim_v):
            if not f.all_zero(d.omega[a, b]):
                lines.append(f"omega {vn[a]} {vn[b]} = {_fmt_comb(f, d.omega[a, b], mn)}")
    for a in range(d.dim_v):
        for b in range(a + 1, d.dim_v):
            if not f.all_zero(d.bv[a, b]):
                lines.append(f"bv [{vn[a]},{vn[b]}] = {_fmt_comb(f, d.bv[a, b], vn)}")
    return "\n".join(lines) + "\n"


def serialize_action(A: MalcevAlgebra, act: ModuleAction) -> str:
    f = A.field
    lines = ["space V { basis " + " ".join(act.names) + " }"]
    for i in range(A.dim):
        for a in range(act.carrier_dim):
            if not f.all_zero(act.rho[i, a]):
                lines.append(f"tr {A.names[i]} {act.names[a]} = "
                             f"{_fmt_comb(f, act.rho[i, a], act.names)}")
    return "\n".join(lines) + "\n"


def serialize_derivation(M: MalcevAlgebra, td: TwistedDerivation) -> str:
    f = M.field
    td = td.validate(M)
    lines = []
    for i in range(M.dim):
        if not f.all_zero(td.lam[i:i + 1]):
            lines.append(f"lambda {M.names[i]} = {f.format(td.lam[i])}")
    for i in range(M.dim):
        if not f.all_zero(td.D[i]):
            lines.append(f"D {M.names[i]} = {_fmt_comb(f, td.D[i], M.names)}")
    return "\n".join(lines) + "\n"
