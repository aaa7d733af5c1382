"""Verification reports: per-condition verdicts with counterexample witnesses."""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field as dc_field
from typing import Any, Iterator, Sequence

import numpy as np

from .field import Field

DEFAULT_WITNESS_CAP = 16
_witness_cap = DEFAULT_WITNESS_CAP


def witness_cap() -> int:
    return _witness_cap


@contextlib.contextmanager
def witness_cap_set(cap: int) -> Iterator[None]:
    global _witness_cap
    old = _witness_cap
    _witness_cap = max(1, int(cap))
    try:
        yield
    finally:
        _witness_cap = old


@dataclass(frozen=True)
class Witness:
    index: tuple[int, ...]
    labels: tuple[str, ...]
    lhs: np.ndarray
    rhs: np.ndarray


@dataclass
class Check:
    condition_id: str
    passed: bool
    witnesses: list[Witness] = dc_field(default_factory=list)
    failures: int = 0
    as_printed: bool = True
    note: str = ""


@dataclass
class VerificationReport:
    field: Field
    checks: list[Check] = dc_field(default_factory=list)
    extras: dict[str, Any] = dc_field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self) -> bool:
        return self.overall

    def __getitem__(self, condition_id: str) -> Check:
        for c in self.checks:
            if c.condition_id == condition_id:
                return c
        raise KeyError(condition_id)

    def __contains__(self, condition_id: str) -> bool:
        return any(c.condition_id == condition_id for c in self.checks)

    def failed(self) -> list[str]:
        return [c.condition_id for c in self.checks if not c.passed]

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        self.field.check_same(other.field)
        for c in other.checks:
            if prefix:
                c = Check(prefix + c.condition_id, c.passed, c.witnesses, c.failures,
                          c.as_printed, c.note)
            self.checks.append(c)


def compare(
    field: Field,
    condition_id: str,
    lhs: np.ndarray,
    rhs: np.ndarray,
    axis_labels: Sequence[Sequence[str]],
    *,
    as_printed: bool = True,
    note: str = "",
) -> Check:
    """Build a :class:`Check` from both sides evaluated on every basis tuple.

    ``lhs``/``rhs`` carry one leading axis per identity variable and a
    trailing coordinate axis; ``axis_labels[k]`` names the basis vectors of
    variable ``k``.
    """
    lhs, rhs = np.broadcast_arrays(lhs, rhs)
    nvars = len(axis_labels)
    full = tuple(len(a) for a in axis_labels) + lhs.shape[nvars:]
    lhs = np.broadcast_to(lhs, full)
    rhs = np.broadcast_to(rhs, full)
    residual = field.reduce(lhs - rhs)
    bad = residual != 0
    if residual.ndim > nvars:
        bad = bad.reshape(bad.shape[:nvars] + (-1,)).any(axis=-1)
    idx = np.argwhere(bad)
    witnesses = []
    for row in idx[: witness_cap()]:
        t = tuple(int(i) for i in row)
        witnesses.append(Witness(
            t,
            tuple(axis_labels[k][i] for k, i in enumerate(t)),
            field.reduce(np.array(lhs[t])),
            field.reduce(np.array(rhs[t])),
        ))
    return Check(condition_id, len(idx) == 0, witnesses, len(idx), as_printed, note)
