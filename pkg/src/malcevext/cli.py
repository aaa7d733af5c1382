"""Command-line driver.

Exit codes: 0 all checks passed, 1 some check failed (the report is still
written), 2 usage or parse error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import dsl
from .algebra import MalcevAlgebra, check_algebra, check_malcev_eq3, jacobiator
from .emit import ReportDocument, emit_report, use_color
from .field import Field, FieldError, GF
from .flag import (ResourceLimit, TwistedDerivation, check_twisted_derivation,
                   flag_product, solve_twisted)
from .linalg import DimensionMismatch
from .report import witness_cap_set
from .reps import ModuleAxiomFailed, check_cocycle, check_module, cocycle_extension, semidirect

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ helpers

def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _algebra(path: str) -> MalcevAlgebra:
    return dsl.parse_algebra(_read(path))


def _over(A: MalcevAlgebra, p: int | None) -> MalcevAlgebra:
    """Reinterpret the structure constants over GF(p)."""
    if p is None:
        return A
    F = GF(p)
    if A.field == F:
        return A
    if A.field.is_finite:
        raise UsageError(f"algebra is over {A.field!r}, cannot move it to {F!r}")
    table = np.array([F.coerce(x if isinstance(x, Fraction) else int(x)) for x in A.table.reshape(-1)],
                     dtype=np.int64).reshape(A.table.shape)
    return MalcevAlgebra(F, A.names, table)


def _vector(A: MalcevAlgebra, text: str) -> np.ndarray:
    p = dsl._Parser("algebra", base=A)
    toks = dsl._tokens(text, 1)
    comb = p.combination(dsl._Cursor(toks, 1, len(text)), "M")
    return p.vector(comb, A.dim)


def _fmt_vec(A: MalcevAlgebra, v) -> str:
    return dsl._fmt_comb(A.field, v, A.names)


# ------------------------------------------------------------------ commands

def cmd_check(a, doc: ReportDocument) -> None:
    A = _algebra(a.file)
    doc.field = A.field
    rep = check_algebra(A)
    doc.add(rep)
    doc.data.update(malcev=rep.extras["malcev"], lie=rep.extras["lie"], dim=A.dim)


def cmd_jacobiator(a, doc: ReportDocument) -> None:
    A = _algebra(a.file)
    doc.field = A.field
    J = jacobiator(A, _vector(A, a.x), _vector(A, a.y), _vector(A, a.z))
    doc.data["jacobiator"] = _fmt_vec(A, J)
    doc.data["coordinates"] = J


def cmd_semidirect(a, doc: ReportDocument) -> None:
    A = _algebra(a.alg)
    doc.field = A.field
    act = dsl.parse_action(_read(a.action), A)
    mod = check_module(A, act)
    doc.add(mod)
    E = semidirect(A, act)
    doc.add(check_malcev_eq3(E), prefix="semidirect:")
    doc.data["algebra"] = dsl.serialize_algebra(E)


def cmd_cocycle(a, doc: ReportDocument) -> None:
    A = _algebra(a.alg)
    doc.field = A.field
    act = dsl.parse_action(_read(a.action), A)
    w = dsl.parse_cocycle(_read(a.omega), A, act)
    try:
        rep = check_cocycle(A, act, w)
    except ModuleAxiomFailed:
        doc.add(check_module(A, act))
        return
    doc.add(rep)
    E = cocycle_extension(A, act, w)
    doc.add(check_malcev_eq3(E), prefix="extension:")
    doc.data["algebra"] = dsl.serialize_algebra(E)


def cmd_unified(a, doc: ReportDocument) -> None:
    from .unified import diagnose_U, verify_unified_direct

    d = dsl.parse_datum(_read(a.datum))
    doc.field = d.field
    direct = verify_unified_direct(d)
    if a.diagnose:
        diag = diagnose_U(d)
        # the verdict is the direct one; the (U) table is informational
        doc.data["conditions"] = [{"condition_id": c.condition_id, "passed": c.passed,
                                   "as_printed": c.as_printed} for c in diag.checks]
        doc.data["conjunction"] = diag.extras["conjunction"]
        doc.data["agree"] = diag.extras["agree"]
        doc.data["triage"] = diag.extras["triage"]
    doc.add(direct)


def cmd_extract(a, doc: ReportDocument) -> None:
    from .unified import NotASubalgebra, NotMalcev, Projection, extract_datum, phi_iso_check

    A = _algebra(a.file)
    doc.field = A.field
    names = [s.strip() for s in a.sub.split(",") if s.strip()]
    for nm in names:
        if nm not in A.names:
            raise dsl.UnknownBasisName(f"unknown basis name {nm!r}")
    if len(names) == A.dim:
        raise UsageError("--sub must leave a nonzero complement")
    pr = Projection(A, tuple(A.names.index(nm) for nm in names))
    try:
        d = extract_datum(pr)
    except NotASubalgebra as exc:
        doc.flag("subalgebra", False, str(exc))
        return
    except NotMalcev as exc:
        doc.flag("malcev", False, str(exc))
        return
    doc.flag("subalgebra", True)
    doc.flag("phi_iso", bool(phi_iso_check(A, pr, d)))
    text = dsl.serialize_datum(d)
    doc.data["datum"] = text
    if a.output:
        try:
            Path(a.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write {a.output}: {exc.strerror or exc}") from exc


def _special(a, doc: ReportDocument, kind: str) -> None:
    from . import special

    d = dsl.parse_datum(_read(a.file))
    doc.field = d.field
    f, V = d.field, d.v_algebra()
    if kind == "crossed":
        if not f.all_zero(d.tr):
            raise UsageError("a crossed system has no |> action; remove the tr lines")
        E, rep = special.crossed_product(special.CrossedSystem(d.M, V, d.tl, d.omega))
    elif kind == "skew":
        if not f.all_zero(d.tl):
            raise UsageError("a skew crossed system has no <| action; remove the tl lines")
        E, rep = special.skew_crossed_product(special.SkewCrossedSystem(d.M, V, d.tr, d.omega))
    else:
        if not f.all_zero(d.omega):
            raise UsageError("a matched pair has omega = 0; remove the omega lines")
        mp = special.MatchedPairData(d.M, V, d.tr, d.tl)
        rep, E = special.matched_pair_check(mp), special.bicrossed_product(mp)
    # conditions are shown; the verdict comes from the direct checks
    doc.data["conditions"] = [{"condition_id": c.condition_id, "passed": c.passed,
                               "as_printed": c.as_printed}
                              for c in rep.checks if c.condition_id != "eq3"]
    doc.data["agree"] = rep.extras["agree"]
    doc.data["triage"] = rep.extras["triage"]
    doc.checks.extend(c for c in rep.checks if c.condition_id == "eq3")
    doc.data["algebra"] = dsl.serialize_algebra(E)


def cmd_flag(a, doc: ReportDocument) -> None:
    M = _algebra(a.alg)
    doc.field = M.field
    td = dsl.parse_derivation(_read(a.D), M)
    lam = dsl.parse_assignment(a.lam, M) if a.lam is not None else td.lam
    td = TwistedDerivation(lam, td.D)
    rep = check_twisted_derivation(M, td, reading=a.reading)
    doc.data["conditions"] = [{"condition_id": c.condition_id, "passed": c.passed,
                               "as_printed": c.as_printed} for c in rep.checks]
    doc.data["conjunction"] = rep.extras["conjunction"]
    doc.data["agree"] = rep.extras["agree"]
    doc.data["triage"] = rep.extras["triage"]
    doc.flag("flag_product_malcev", rep.extras["direct"])
    doc.data["algebra"] = dsl.serialize_algebra(flag_product(M, td))


def cmd_solve_flag(a, doc: ReportDocument) -> None:
    M = _over(_algebra(a.alg), a.field)
    doc.field = M.field
    if not M.field.is_finite:
        raise UsageError("solve-flag needs --field p or a document over GF(p)")
    lam = dsl.parse_assignment(a.lam or "", M)
    res = solve_twisted(M, lam, seed=a.seed, parallel=a.parallel == "on",
                        samples=a.samples, strict_lambda=False)
    doc.flag("T6", res.lambda_valid, "" if res.lambda_valid else "no D can work for this lambda")
    doc.data["linear_dim"] = res.linear_dim
    doc.data["stage2_size"] = res.stage2_size
    doc.data["solutions"] = len(res.solutions) if res.solutions is not None else None
    fams: dict[str, dict] = {}
    for s in res.family_checks:
        e = fams.setdefault(s.family, {"samples": 0, "conditions_pass": 0, "direct_pass": 0,
                                       "agree": 0})
        e["samples"] += 1
        e["conditions_pass"] += s.conditions
        e["direct_pass"] += s.direct
        e["agree"] += s.conditions == s.direct
    doc.data["families"] = fams
    doc.data["family_samples"] = [
        {"family": s.family, "params": {k: s.params[k] for k in sorted(s.params)},
         "conditions": s.conditions, "direct": s.direct, "failed": list(s.failed)}
        for s in res.family_checks]
    for name, e in fams.items():
        doc.flag(f"family:{name}:paths_agree", e["agree"] == e["samples"])


def cmd_classify(a, doc: ReportDocument) -> None:
    from .equivalence import classify_flag

    if a.dimV != 1:
        raise UsageError("only --dimV 1 is supported")
    M = _over(_algebra(a.alg), a.field)
    doc.field = M.field
    res = classify_flag(M, a.relation, parallel=a.parallel == "on")
    doc.data["total_data"] = res.total_data
    if a.relation in ("equiv", "both"):
        doc.data["classes_equiv"] = len(res.classes_equiv)
    if a.relation in ("cohom", "both"):
        doc.data["classes_cohom"] = len(res.classes_cohom)
    doc.data["cross_check"] = res.cross_check
    if a.list:
        if a.relation in ("equiv", "both"):
            doc.data["representatives_equiv"] = res.classes_equiv
        if a.relation in ("cohom", "both"):
            doc.data["representatives_cohom"] = res.classes_cohom
    doc.flag("routes_agree", res.agree)
    doc.flag("cohom_refines_equiv", res.refines)


# ------------------------------------------------------------------ parser

def _common(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--format", choices=("text", "json"), default=d("text"))
    p.add_argument("--witness-cap", type=int, default=d(None), metavar="N")
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--parallel", choices=("on", "off"), default=d("off"))
    p.add_argument("--timing", action="store_true", default=d(False),
                   help="append wall time to the report (breaks byte-identical output)")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="malcevext", description=__doc__.split("\n")[0])
    _common(top, suppress=False)
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        _common(p, suppress=True)
        p.set_defaults(func=func)
        return p

    p = add("check", cmd_check, "anticommutativity, both Malcev forms, Lie flag")
    p.add_argument("file")
    p = add("jacobiator", cmd_jacobiator, "J(x, y, z) for basis names or combinations")
    p.add_argument("file")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("z")
    p = add("semidirect", cmd_semidirect, "module check and semidirect product")
    p.add_argument("alg")
    p.add_argument("action")
    p = add("cocycle", cmd_cocycle, "cocycle check and twisted semidirect product")
    p.add_argument("alg")
    p.add_argument("action")
    p.add_argument("omega")
    p = add("unified", cmd_unified, "direct Malcev verdict of a unified product")
    p.add_argument("datum")
    p.add_argument("--diagnose", action="store_true", help="also evaluate U1-U11")
    p = add("extract", cmd_extract, "extending datum of a coordinate projection")
    p.add_argument("file")
    p.add_argument("--sub", required=True, help="comma separated basis names spanning M")
    p.add_argument("--output", "-o", default=None, help="also write the datum document here")
    for name, kind in (("crossed", "crossed"), ("skew", "skew"), ("matched", "matched")):
        p = add(name, lambda a, doc, k=kind: _special(a, doc, k), f"{name} product of a datum file")
        p.add_argument("file")
    p = add("flag", cmd_flag, "check a twisted derivation and build the flag product")
    p.add_argument("alg")
    p.add_argument("--lambda", dest="lam", default=None, help="name=value,...")
    p.add_argument("--D", dest="D", required=True, help="derivation file (D and lambda lines)")
    p.add_argument("--reading", choices=("printed", "derived"), default="printed")
    p = add("solve-flag", cmd_solve_flag, "solve for D given lambda over GF(p)")
    p.add_argument("alg")
    p.add_argument("--lambda", dest="lam", default="")
    p.add_argument("--field", type=int, default=None)
    p.add_argument("--samples", type=int, default=20)
    p = add("classify", cmd_classify, "classes of flag extensions over GF(p)")
    p.add_argument("alg")
    p.add_argument("--dimV", type=int, default=1)
    p.add_argument("--field", type=int, default=None)
    p.add_argument("--relation", choices=("equiv", "cohom", "both"), default="both")
    p.add_argument("--list", action="store_true", help="include class representatives")
    return top


def run_command(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    from .equivalence import FieldNotAllowed

    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    doc = ReportDocument([a.command] + _echo(argv, a))
    t0 = time.perf_counter()
    try:
        if a.witness_cap is not None:
            with witness_cap_set(a.witness_cap):
                a.func(a, doc)
        else:
            a.func(a, doc)
    except (dsl.ParseError, UsageError, FieldError, FieldNotAllowed, DimensionMismatch,
            ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=stderr)
        return EXIT_LIMIT
    if a.timing:
        doc.timing = time.perf_counter() - t0
    stdout.write(emit_report(doc, a.format, color=a.format == "text" and use_color(stdout)))
    return EXIT_OK if doc.overall else EXIT_FAIL


def _echo(argv: list[str], a) -> list[str]:
    """The arguments after the subcommand name, as given."""
    i = argv.index(a.command)
    return argv[i + 1:]


def main(argv: list[str] | None = None) -> None:
    sys.exit(run_command(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
