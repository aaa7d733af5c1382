from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from malcevext import dsl
from malcevext.field import GF, QQ
from malcevext.sampling import m4, random_datum, random_malcev

CORPUS = sorted((Path(__file__).parent / "corpus").glob("*.txt"))


def _header(text: str, key: str) -> str | None:
    for line in text.splitlines():
        if line.startswith(f"# {key}:"):
            return line.split(":", 1)[1].strip()
    return None


def _parse(path: Path):
    """Parse, serialize, reparse; returns (object, first serialization, second)."""
    text = path.read_text()
    kind = path.name.split("_")[0]
    if _header(text, "base") == "m4":
        M = m4(GF(5))
        if kind == "action":
            obj = dsl.parse_action(text, M)
            s1 = dsl.serialize_action(M, obj)
            obj2 = dsl.parse_action(s1, M)
            return obj.rho, obj2.rho, s1, dsl.serialize_action(M, obj2)
        obj = dsl.parse_derivation(text, M)
        s1 = dsl.serialize_derivation(M, obj)
        obj2 = dsl.parse_derivation(s1, M)
        return (np.concatenate([obj.lam[:, None], obj.D], 1),
                np.concatenate([obj2.lam[:, None], obj2.D], 1), s1, dsl.serialize_derivation(M, obj2))
    if kind == "datum":
        d = dsl.parse_datum(text)
        s1 = dsl.serialize_datum(d)
        d2 = dsl.parse_datum(s1)
        assert d.same_as(d2)
        return d.tl, d2.tl, s1, dsl.serialize_datum(d2)
    A = dsl.parse_algebra(text)
    s1 = dsl.serialize_algebra(A)
    A2 = dsl.parse_algebra(s1)
    assert A.same_as(A2)
    return A.table, A2.table, s1, dsl.serialize_algebra(A2)


def test_corpus_size():
    assert len(CORPUS) >= 30
    kinds = {_header(p.read_text(), "expect") == "ok" for p in CORPUS}
    assert kinds == {True, False}


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_corpus_document(path):
    expect = _header(path.read_text(), "expect")
    if expect == "ok":
        a, b, s1, s2 = _parse(path)
        assert np.array_equal(a, b)
        assert s1 == s2
        return
    err, line, col = expect.split()
    with pytest.raises(dsl.ParseError) as info:
        _parse(path)
    assert type(info.value).__name__ == err
    assert (info.value.line, info.value.col) == (int(line), int(col))


def test_diagonal_bracket_is_a_syntax_error():
    with pytest.raises(SyntaxError):
        dsl.parse_algebra("dim 2\n[e1,e1] = e2\n")


def test_assignment():
    M = m4(QQ)
    v = dsl.parse_assignment("e1=1, e3=-2/3", M)
    assert [str(x) for x in v] == ["1", "0", "-2/3", "0"]
    with pytest.raises(dsl.UnknownBasisName):
        dsl.parse_assignment("e9=1", M)
    with pytest.raises(dsl.DuplicatePair):
        dsl.parse_assignment("e1=1,e1=2", M)
    with pytest.raises(dsl.DocumentSyntaxError):
        dsl.parse_assignment("e1", M)


def test_cocycle_fragment():
    M = m4(GF(5))
    act = dsl.parse_action("space V { basis q }\n", M)
    w = dsl.parse_cocycle("omega e1 e2 = 2*q\n", M, act)
    assert w.omega[0, 1].tolist() == [2] and w.omega[1, 0].tolist() == [3]


@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 2))
def test_random_datum_roundtrip(seed, m, v):
    rng = np.random.default_rng(seed)
    for F in (GF(5), QQ):
        d = random_datum(random_malcev(F, rng, m), rng, v, density=0.5)
        text = dsl.serialize_datum(d)
        assert dsl.parse_datum(text).same_as(d)
        assert dsl.serialize_datum(dsl.parse_datum(text)) == text
