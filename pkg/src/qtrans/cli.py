"""Command-line entry point.

    qtrans run FILE                      # execute every task in a problem file
    qtrans --preset a1                   # execute a preset's own task list
    qtrans --preset a1 qt-check          # one subcommand against a preset
    qtrans --file FILE relations H dmax=3

Subcommand arguments use the task syntax of problem files: positional names
of declarations plus ``key=value`` options.  Vectors are written
``1,0,0,0,0`` and matrices ``1,0;0,1``.

Exit status: 0 when every verdict is ``pass``, 1 when some verdict is
``fail``, 2 on parse errors, 3 on precondition failures, 4 when a
theorem-violation alarm fired.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass

from . import gn5, qt
from .errors import (
    BoundExhausted,
    ParseError,
    PreconditionError,
    ResourceCapExceeded,
    TheoremViolation,
)
from .parse import format_expr
from .poly import NEG_INF, Poly, PolyMap
from .problem import PRESETS, ProblemFile, Task, make_task, parse_expression, parse_problem, preset
from .relations import DEFAULT_ENTRY_CAP, find_relations, linear_relations

log = logging.getLogger("qtrans")

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_PRECONDITION, EXIT_ALARM = 0, 1, 2, 3, 4


@dataclass
class Settings:
    dmax: int | None = None
    verify_all: bool = False
    cap: int = DEFAULT_ENTRY_CAP


# -- argument resolution ------------------------------------------------------

def _fmt(p) -> str:
    return format_expr(p)


def _fmt_map(H) -> list[str]:
    return [_fmt(c) for c in H]


def _deg(d):
    return "-inf" if d is NEG_INF else d


def _subject(problem: ProblemFile, task: Task, kind: str) -> tuple[str, object]:
    if task.args:
        name = task.args[0]
    else:
        name = "H" if kind == "map" else "h"
    return name, _lookup(problem, name, kind)


def _lookup(problem: ProblemFile, name: str, kind: str):
    val = problem.declarations.get(name)
    if val is None:
        if kind == "poly":
            return parse_expression(name, problem)
        raise ParseError(f"no declaration named {name!r}")
    want = PolyMap if kind == "map" else Poly
    if not isinstance(val, want):
        raise ParseError(f"{name!r} is not a {kind}")
    return val


def _int_opt(task: Task, key: str, default=None):
    raw = task.kwargs.get(key)
    if raw is None:
        return default
    if not raw.isdigit():
        raise ParseError(f"option {key}={raw!r} is not a natural number")
    return int(raw)


def _vector(problem: ProblemFile, text: str) -> list:
    out = []
    for part in text.split(","):
        p = parse_expression(part, problem)
        if not p.is_constant():
            raise ParseError(f"vector entry {part!r} is not a constant")
        out.append(p.constant_value())
    return out


def _matrix(problem: ProblemFile, text: str) -> list[list]:
    return [_vector(problem, row) for row in text.split(";")]


def _required(task: Task, key: str) -> str:
    v = task.kwargs.get(key)
    if v is None:
        raise ParseError(f"task {task.command!r} needs option {key}=...")
    return v


def _dmax(task: Task, settings: Settings):
    return _int_opt(task, "dmax", settings.dmax)


# -- task handlers ------------------------------------------------------------

def _result(verdict: bool, witnesses=None, bounds=None, notes=None):
    return {
        "verdict": "pass" if verdict else "fail",
        "witnesses": witnesses or {},
        "bounds": bounds or {},
        "notes": notes or [],
    }


def task_qt_check(problem, task, settings):
    name, H = _subject(problem, task, "map")
    report = qt.check_qt_equivalences(H)
    if not report.agree:
        raise TheoremViolation(f"quasi-translation criteria disagree on {name}: {report.as_dict()}")
    return _result(
        report.cond_JHH,
        {"H": _fmt_map(H), "JH_H": _fmt_map(qt.jh_times_h(H)), "qt_report": report.as_dict()},
    )


def task_qt_equivalences(problem, task, settings):
    name, H = _subject(problem, task, "map")
    report = qt.check_qt_equivalences(H)
    if not report.agree:
        raise TheoremViolation(f"quasi-translation criteria disagree on {name}")
    return _result(report.agree, {"H": _fmt_map(H), "qt_report": report.as_dict()})


def task_invariants(problem, task, settings):
    _, H = _subject(problem, task, "map")
    names = list(task.args[1:]) + [v for k, v in task.options if k == "f"]
    if not names:
        raise ParseError("invariants needs at least one polynomial")
    out = {}
    ok = True
    for nm in names:
        f = _lookup(problem, nm, "poly")
        inv = qt.is_invariant(f, H, verify=settings.verify_all)
        ok &= inv
        out[nm] = {"f": _fmt(f), "Jf_H": _fmt(qt.invariant_defect(f.embed(H.ctx), H)), "invariant": inv}
    return _result(ok, {"H": _fmt_map(H), "invariants": out})


def task_linear_invariants(problem, task, settings):
    _, H = _subject(problem, task, "map")
    forms = qt.linear_invariants(H)
    return _result(True, {"H": _fmt_map(H), "linear_invariants": [_fmt(l) for l in forms]},
                   notes=[f"{len(forms)} independent linear invariant(s)"])


def task_gcd_split(problem, task, settings):
    _, H = _subject(problem, task, "map")
    g, Ht = qt.qt_gcd_split(H)
    return _result(True, {"H": _fmt_map(H), "g": _fmt(g), "Ht": _fmt_map(Ht)})


def task_conjugate(problem, task, settings):
    _, H = _subject(problem, task, "map")
    T = _matrix(problem, _required(task, "T"))
    C = qt.qt_conjugate_linear(H, T)
    return _result(qt.is_quasi_translation(C), {
        "H": _fmt_map(H), "T": [[str(c) for c in r] for r in T], "conjugate": _fmt_map(C)})


def task_conjugation_criterion(problem, task, settings):
    _, H = _subject(problem, task, "map")
    F = _lookup(problem, _required(task, "F"), "map")
    G = _lookup(problem, _required(task, "G"), "map")
    res = qt.qt_conjugation_criterion(H, F, G)
    w = {"H": _fmt_map(H), "F": _fmt_map(F), "G": _fmt_map(G),
         "t_degrees": [_deg(d) for d in res.t_degrees]}
    if res.conjugate is not None:
        w["conjugate"] = _fmt_map(res.conjugate)
    return _result(res.holds, w)


def task_homogenize(problem, task, settings):
    _, H = _subject(problem, task, "map")
    deg = H.degree()
    d = _int_opt(task, "d", 0 if deg is NEG_INF else deg)
    out = qt.qt_homogenize(H, d)
    return _result(True, {"H": _fmt_map(H), "homogenized": _fmt_map(out)}, bounds={"d": d})


def task_dehomogenize(problem, task, settings):
    _, H = _subject(problem, task, "map")
    out = qt.qt_dehomogenize(H)
    lin = linear_relations(out)
    return _result(
        qt.is_quasi_translation(out),
        {"H": _fmt_map(H), "dehomogenized": _fmt_map(out), "linear_relations": [_fmt(r.R) for r in lin]},
        notes=[f"{len(lin)} linear relation(s) on the dehomogenized map"],
    )


def task_homogeneous_checks(problem, task, settings):
    _, H = _subject(problem, task, "map")
    rep = qt.homogeneous_qt_checks(H)
    return _result(rep.passed, {"H": _fmt_map(H), "checks": rep.as_dict()})


def task_relations(problem, task, settings):
    _, H = _subject(problem, task, "map")
    basis = find_relations(H, _dmax(task, settings), settings.cap)
    notes = []
    if basis.minimal_degree is None:
        notes.append(f"bound exhausted: no relation of degree <= {basis.degree_bound}")
    return _result(
        True,
        {"H": _fmt_map(H), "relations": [_fmt(r.R) for r in basis.generators],
         "minimal_degree": basis.minimal_degree,
         "dims": {str(k): v for k, v in basis.dims.items()}},
        bounds={"dmax": basis.degree_bound, "homogeneous_search": basis.homogeneous, "entries": basis.entries},
        notes=notes,
    )


def task_hessian_pipeline(problem, task, settings):
    _, h = _subject(problem, task, "poly")
    dmax = _dmax(task, settings)
    try:
        res = gn5.hessian_to_qt(h, dmax, settings.cap)
    except BoundExhausted as exc:
        return _result(False, {"h": _fmt(h)}, bounds={"dmax": exc.dmax}, notes=[str(exc)])
    return _result(
        res.passed,
        {"h": _fmt(res.h), "R": _fmt(res.R.R), "R_degree": res.R.degree, "H": _fmt_map(res.H),
         "checks": res.checks, "dims": {str(k): v for k, v in res.basis.dims.items()}},
        bounds={"dmax": res.basis.degree_bound},
    )


def task_gradient_dependence(problem, task, settings):
    _, h = _subject(problem, task, "poly")
    rels = gn5.gradient_linear_dependence(h)
    return _result(True, {"h": _fmt(h), "relations": [_fmt(r.R) for r in rels]})


def task_gn_plane(problem, task, settings):
    _, H = _subject(problem, task, "map")
    u = _vector(problem, _required(task, "u"))
    v = _vector(problem, _required(task, "v"))
    ok = gn5.is_gn_plane(H, u, v)
    return _result(ok, {"H": _fmt_map(H), "u": [str(c) for c in u], "v": [str(c) for c in v]})


def task_apex(problem, task, settings):
    _, H = _subject(problem, task, "map")
    p = _vector(problem, _required(task, "p"))
    cert = gn5.apex_certificate(H, p, _dmax(task, settings), settings.cap)
    w = {"H": _fmt_map(H), "p": [str(c) for c in p], "relations_checked": cert.relations_checked}
    if cert.breaking_relation is not None:
        w["breaking_relation"] = _fmt(cert.breaking_relation.R)
    return _result(cert.holds, w, bounds={"dmax": cert.degree_bound},
                   notes=["certificate is relative to the relation-degree bound"])


def task_gn_form_verify(problem, task, settings):
    _, h = _subject(problem, task, "poly")
    T = _matrix(problem, _required(task, "T"))
    f = _lookup(problem, _required(task, "f"), "poly")
    a = [_lookup(problem, _required(task, k), "poly") for k in ("a1", "a2", "a3")]
    ok = gn5.gn_form_verify(h, T, f, *a)
    return _result(ok, {"h": _fmt(h), "T": [[str(c) for c in r] for r in T], "f": _fmt(f),
                        "a1": _fmt(a[0]), "a2": _fmt(a[1]), "a3": _fmt(a[2])})


def task_fallb_verify(problem, task, settings):
    _, H = _subject(problem, task, "map")
    dist = _int_opt(task, "dist")
    if dist is None:
        raise ParseError("fallb-verify needs dist=<index>")
    g, p, q = (_lookup(problem, _required(task, k), "poly") for k in ("g", "p", "q"))
    hvec = _lookup(problem, _required(task, "h"), "map")
    ok = gn5.fall_b_form_verify(H, dist, g, hvec, p, q)
    return _result(ok, {"H": _fmt_map(H), "dist": dist, "g": _fmt(g), "p": _fmt(p), "q": _fmt(q),
                        "h": _fmt_map(hvec)})


def task_degree_report(problem, task, settings):
    _, H = _subject(problem, task, "map")
    rep = gn5.degree_report(H)
    return _result(True, {"H": _fmt_map(H), "report": rep.as_dict()})


COMMANDS = {
    "qt-check": task_qt_check,
    "qt-equivalences": task_qt_equivalences,
    "invariants": task_invariants,
    "linear-invariants": task_linear_invariants,
    "gcd-split": task_gcd_split,
    "conjugate": task_conjugate,
    "conjugation-criterion": task_conjugation_criterion,
    "homogenize": task_homogenize,
    "dehomogenize": task_dehomogenize,
    "homogeneous-checks": task_homogeneous_checks,
    "relations": task_relations,
    "hessian-pipeline": task_hessian_pipeline,
    "gradient-dependence": task_gradient_dependence,
    "gn-plane": task_gn_plane,
    "apex": task_apex,
    "gn-form-verify": task_gn_form_verify,
    "fallb-verify": task_fallb_verify,
    "degree-report": task_degree_report,
}


# -- execution ------------------------------------------------------------------

def run_task(problem: ProblemFile, task: Task, settings: Settings) -> tuple[dict, int]:
    handler = COMMANDS.get(task.command)
    start = time.perf_counter()
    code = EXIT_OK
    try:
        if handler is None:
            raise ParseError(f"unknown subcommand {task.command!r}", task.line or 1, 1)
        out = handler(problem, task, settings)
        if out["verdict"] != "pass":
            code = EXIT_FAIL
    except ParseError as exc:
        out, code = _error("parse-error", exc), EXIT_PARSE
    except TheoremViolation as exc:
        out, code = _error("alarm", exc), EXIT_ALARM
    except (PreconditionError, ResourceCapExceeded) as exc:
        out, code = _error("precondition-failed", exc), EXIT_PRECONDITION
    report = {"task": task.echo(), **out, "timing": {"seconds": round(time.perf_counter() - start, 6)}}
    return report, code


def _error(kind, exc):
    return {"verdict": kind, "witnesses": {}, "bounds": {}, "notes": [str(exc)]}


def _severity(code):
    return {EXIT_OK: 0, EXIT_FAIL: 1, EXIT_PARSE: 2, EXIT_PRECONDITION: 3, EXIT_ALARM: 4}[code]


def run(problem: ProblemFile, settings: Settings | None = None, tasks=None) -> tuple[dict, int]:
    """Execute tasks in order; returns the JSON-ready report and the exit code."""
    settings = settings or Settings()
    tasks = problem.tasks if tasks is None else tasks
    reports, code = [], EXIT_OK
    for task in tasks:
        rep, c = run_task(problem, task, settings)
        reports.append(rep)
        if _severity(c) > _severity(code):
            code = c
    return {"dimension": problem.dimension, "reports": reports, "exit_code": code}, code


# -- re-verification ------------------------------------------------------------

def _ctx_problem(dimension: int) -> ProblemFile:
    return ProblemFile(dimension)


def _map_from(problem: ProblemFile, comps) -> PolyMap:
    polys = [parse_expression(c, problem) for c in comps]
    ys = [p for p in polys if p.ctx == problem.yctx and not p.is_constant()]
    ctx = problem.yctx if ys else problem.xctx
    return PolyMap([p.embed(ctx) if p.ctx != ctx else p for p in polys], ctx=ctx)


def _rows_from(problem: ProblemFile, rows):
    return [[parse_expression(c, problem).constant_value() for c in r] for r in rows]


def reverify_report(rep: dict, dimension: int) -> bool | None:
    """Recheck one task report from its witnesses alone.

    Returns None when the task kind carries nothing to re-verify.
    """
    if rep["verdict"] not in ("pass", "fail"):
        return None
    command = rep["task"].split()[0]
    w = rep["witnesses"]
    pb = _ctx_problem(dimension)
    passed = rep["verdict"] == "pass"
    if command in ("qt-check", "qt-equivalences"):
        H = _map_from(pb, w["H"])
        return qt.is_quasi_translation(H) == (w["qt_report"]["cond_JHH"]) and (
            command == "qt-equivalences" or qt.is_quasi_translation(H) == passed)
    if command == "invariants":
        H = _map_from(pb, w["H"])
        return all(
            qt.is_invariant(parse_expression(e["f"], pb), H) == e["invariant"]
            for e in w["invariants"].values())
    if command == "linear-invariants":
        H = _map_from(pb, w["H"])
        return all(qt.is_invariant(parse_expression(f, pb), H) for f in w["linear_invariants"])
    if command == "homogeneous-checks":
        rep2 = qt.homogeneous_qt_checks(_map_from(pb, w["H"]))
        return rep2.as_dict() == w["checks"]
    if command == "relations":
        H = _map_from(pb, w["H"])
        return all(parse_expression(r, pb).compose(list(H)).is_zero() for r in w["relations"])
    if command == "hessian-pipeline":
        if "R" not in w:
            return None
        h = parse_expression(w["h"], pb)
        grad = list(h.gradient())
        R = parse_expression(w["R"], pb)
        H = _map_from(pb, w["H"])
        return (R.compose(grad).is_zero() and R.gradient().compose(grad) == H
                and qt.is_quasi_translation(H))
    if command == "gn-plane":
        H = _map_from(pb, w["H"])
        u = [parse_expression(c, pb) for c in w["u"]]
        v = [parse_expression(c, pb) for c in w["v"]]
        return gn5.is_gn_plane(H, u, v) == passed
    if command == "gn-form-verify":
        args = [parse_expression(w[k], pb) for k in ("f", "a1", "a2", "a3")]
        ok = gn5.gn_form_verify(parse_expression(w["h"], pb), _rows_from(pb, w["T"]), *args)
        return ok == passed
    if command == "fallb-verify":
        g, p, q = (parse_expression(w[k], pb) for k in ("g", "p", "q"))
        ok = gn5.fall_b_form_verify(_map_from(pb, w["H"]), w["dist"], g, _map_from(pb, w["h"]), p, q)
        return ok == passed
    if command == "conjugate":
        C = _map_from(pb, w["conjugate"])
        H = _map_from(pb, w["H"])
        return qt.qt_conjugate_linear(H, _rows_from(pb, w["T"])) == C
    return None


def reverify(doc: dict) -> list:
    """Re-verify every report of a ``run`` document; one entry per report."""
    return [reverify_report(rep, doc["dimension"]) for rep in doc["reports"]]


def render_text(doc: dict) -> str:
    lines = []
    for rep in doc["reports"]:
        lines.append(f"[{rep['verdict']}] {rep['task']}")
        for k, v in rep["witnesses"].items():
            lines.append(f"    {k}: {json.dumps(v)}")
        for k, v in rep["bounds"].items():
            lines.append(f"    bound {k} = {v}")
        for n in rep["notes"]:
            lines.append(f"    note: {n}")
    lines.append(f"exit code {doc['exit_code']}")
    return "\n".join(lines)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dmax", type=int, help="degree bound for relation searches")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--verify-all", action="store_true", help="run the expensive cross-checks too")
    common.add_argument("--cap", type=int, default=DEFAULT_ENTRY_CAP, help="entry cap for relation systems")
    common.add_argument("-v", "--verbose", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qtrans",
        description="Exact checks for quasi-translations and singular Hessians.",
        epilog="subcommands: run FILE, " + ", ".join(COMMANDS),
        parents=[_common_options()],
    )
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(PRESETS), help="use a built-in example as input")
    src.add_argument("--file", help="problem file providing the declarations")
    ap.add_argument("command", nargs="?", help="subcommand, or 'run'")
    ap.add_argument("args", nargs=argparse.REMAINDER)
    return ap


def build_run_parser() -> argparse.ArgumentParser:
    rp = argparse.ArgumentParser(prog="qtrans run", parents=[_common_options()],
                                 description="Execute every task of a problem file.")
    rp.add_argument("problem", help="problem file")
    return rp


def _read_problem(path: str) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    ns = ap.parse_args(argv)
    if ns.command == "run":
        if ns.preset or ns.file:
            ap.error("run takes its input from the problem file")
        # options may follow the file name, so parse them again
        k = argv.index("run")
        ns = build_run_parser().parse_args(argv[:k] + argv[k + 1:])
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING)
    settings = Settings(dmax=ns.dmax, verify_all=ns.verify_all, cap=ns.cap)
    tasks = None
    try:
        if hasattr(ns, "problem"):
            problem = _read_problem(ns.problem)
        else:
            if ns.preset:
                problem = preset(ns.preset)
            elif ns.file:
                problem = _read_problem(ns.file)
            elif ns.command is None:
                ap.error("nothing to do: give a subcommand, --preset or --file")
            else:
                ap.error("a subcommand needs --preset or --file for its declarations")
            if ns.command is not None:
                if ns.command not in COMMANDS:
                    ap.error(f"unknown subcommand {ns.command!r}")
                tasks = [make_task([ns.command, *ns.args])]
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    doc, code = run(problem, settings, tasks)
    text = json.dumps(doc, indent=2) if ns.format == "json" else render_text(doc)
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
