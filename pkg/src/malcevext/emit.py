"""Text and JSON rendering of verification reports.

Field elements are written as strings ("2/3", "4 mod 7") so nothing is
lost in transport. Key order and check order are fixed, so two runs on the
same input produce byte-identical output.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field as dc_field
from typing import Any

import numpy as np

from .field import Field
from .report import Check, VerificationReport


@dataclass
class ReportDocument:
    command: list[str]
    field: Field | None = None
    checks: list[Check] = dc_field(default_factory=list)
    data: dict[str, Any] = dc_field(default_factory=dict)
    timing: float | None = None

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, rep: VerificationReport, prefix: str = "") -> None:
        for c in rep.checks:
            if prefix:
                c = Check(prefix + c.condition_id, c.passed, c.witnesses, c.failures,
                          c.as_printed, c.note)
            self.checks.append(c)

    def flag(self, condition_id: str, passed: bool, note: str = "") -> None:
        """A yes/no check with no tuple witnesses."""
        self.checks.append(Check(condition_id, bool(passed), [], 0 if passed else 1, True, note))


def scalar_str(f: Field | None, v) -> str:
    if f is None:
        return str(v)
    if f.is_finite:
        return f"{int(v) % f.p} mod {f.p}"
    return f.format(v)


def to_jsonable(f: Field | None, obj):
    """Recursively turn report payloads into JSON-ready values."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, str) or obj is None:
        return obj
    if isinstance(obj, np.ndarray):
        if obj.dtype == np.bool_:
            return obj.tolist()
        if obj.ndim == 0:
            return scalar_str(f, obj.item())
        return [to_jsonable(f, x) for x in obj]
    if hasattr(obj, "as_dict"):
        try:
            return to_jsonable(f, obj.as_dict(f))
        except TypeError:
            return to_jsonable(f, obj.as_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(f, v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(f, x) for x in obj]
    return scalar_str(f, obj)


def _vec(f, arr) -> list[str]:
    return [scalar_str(f, x) for x in np.asarray(arr).reshape(-1)]


def check_dict(f: Field | None, c: Check) -> dict:
    return {
        "condition_id": c.condition_id,
        "passed": bool(c.passed),
        "as_printed": bool(c.as_printed),
        "note": c.note or "",
        "failures": int(c.failures),
        "witnesses": [{"labels": list(w.labels), "lhs": _vec(f, w.lhs), "rhs": _vec(f, w.rhs)}
                      for w in c.witnesses],
    }


def document_dict(doc: ReportDocument) -> dict:
    out = {
        "command": list(doc.command),
        "field": repr(doc.field) if doc.field is not None else None,
        "overall": doc.overall,
        "checks": [check_dict(doc.field, c) for c in doc.checks],
        "data": to_jsonable(doc.field, doc.data),
    }
    if doc.timing is not None:
        out["timing_seconds"] = round(doc.timing, 6)
    return out


def _color(enabled: bool, text: str, code: str) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if enabled else text


def use_color(stream=None) -> bool:
    stream = stream or sys.stdout
    if "NO_COLOR" in os.environ:
        return False
    return bool(getattr(stream, "isatty", lambda: False)())


def _text_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return "[" + ", ".join(_text_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_text_value(x)}" for k, x in v.items()) + "}"
    return str(v)


def emit_report(doc: ReportDocument, fmt: str = "text", *, color: bool = False) -> str:
    if fmt == "json":
        return json.dumps(document_dict(doc), indent=2, ensure_ascii=False) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    f = doc.field
    lines = ["command: " + " ".join(doc.command)]
    if f is not None:
        lines.append(f"field: {f!r}")
    for c in doc.checks:
        tag = _color(color, "PASS", "32") if c.passed else _color(color, "FAIL", "31")
        extra = "" if c.as_printed else "  (repaired: " + (c.note or "see notes") + ")"
        count = "" if c.passed or not c.witnesses else f"  {c.failures} failing tuple(s)"
        lines.append(f"[{tag}] {c.condition_id}{count}{extra}")
        for w in c.witnesses:
            lines.append(f"    at ({', '.join(w.labels)}): lhs = ({', '.join(_vec(f, w.lhs))})"
                         f"  rhs = ({', '.join(_vec(f, w.rhs))})")
    data = to_jsonable(f, doc.data)
    for k, v in data.items():
        if isinstance(v, str) and "\n" in v:
            lines.append(f"{k}:")
            lines.extend("    " + s for s in v.rstrip("\n").split("\n"))
        else:
            lines.append(f"{k}: {_text_value(v)}")
    lines.append("overall: " + ("PASS" if doc.overall else "FAIL"))
    if doc.timing is not None:
        lines.append(f"time: {doc.timing:.3f}s")
    return "\n".join(lines) + "\n"
