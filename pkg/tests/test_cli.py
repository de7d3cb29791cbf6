from __future__ import annotations

import json

import pytest

from qtrans.cli import EXIT_ALARM, EXIT_FAIL, EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, main, reverify, run
from qtrans.errors import ParseError
from qtrans.parse import format_expr, parse_poly
from qtrans.poly import VarContext
from qtrans.problem import PRESETS, parse_problem, preset

from conftest import X5, P, generated_singular_hessians, qt_corpus


def _run_main(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


# -- expression parser ------------------------------------------------------------

@pytest.mark.parametrize(
    "text,line,col,fragment",
    [
        ("x1 x2", 1, 4, "implicit multiplication"),
        ("x1 + x9", 1, 6, "index exceeds"),
        ("x1 + ", 1, 6, "end of input"),
        ("(x1 + x2", 1, 9, "expected ')'"),
        ("x1 $ x2", 1, 4, "unexpected character"),
        ("1/0", 1, 1, "zero denominator"),
    ],
)
def test_parse_errors_carry_position(text, line, col, fragment):
    with pytest.raises(ParseError) as info:
        parse_poly(text, X5)
    assert (info.value.line, info.value.col) == (line, col)
    assert fragment in str(info.value)


def test_parse_precedence():
    assert parse_poly("-x1^2", X5) == P("0 - x1*x1")
    assert parse_poly("2*x1^2*x2", X5) == P("x1*x1*x2*2")
    assert parse_poly("x1 - x2 - x3", X5) == P("x1 - (x2 + x3)")


def test_round_trip_on_corpus():
    polys = [c for _, H, _ in qt_corpus() for c in H] + generated_singular_hessians(10)
    for p in polys:
        assert parse_poly(format_expr(p), p.ctx) == p


# -- problem files ------------------------------------------------------------

def test_problem_file_parses_presets():
    for name in PRESETS:
        pb = preset(name)
        assert pb.dimension == 5 and pb.tasks
    b = preset("b")
    assert b.declarations["q"] == b.declarations["b"]
    assert b.declarations["hvec"].ctx == VarContext.y(5)


def test_problem_file_error_positions():
    with pytest.raises(ParseError) as info:
        parse_problem("dim 2\ndef f = x1 + x3\n")
    assert info.value.line == 2 and info.value.col == 14
    with pytest.raises(ParseError):
        parse_problem("def f = x1\n")
    with pytest.raises(ParseError):
        parse_problem("dim 2\ndef f = x1\ndef f = x2\n")
    with pytest.raises(ParseError):
        parse_problem("dim 2\ndef f = x1 + y1\n")


def test_empty_task_list():
    doc, code = run(parse_problem("dim 3\ndef f = x1\n"))
    assert code == EXIT_OK and doc["reports"] == []


# -- command line -----------------------------------------------------------

def test_preset_qt_check_json(capsys):
    code, out = _run_main(capsys, "--preset", "a1", "qt-check")
    assert code == EXIT_OK
    doc = json.loads(out)
    (rep,) = doc["reports"]
    assert rep["verdict"] == "pass"
    assert set(rep) == {"task", "verdict", "witnesses", "bounds", "notes", "timing"}
    assert all(rep["witnesses"]["qt_report"][k] for k in ("cond_inverse", "cond_Ht", "cond_JHH"))
    assert reverify(doc) == [True]


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_pass_and_reverify(name):
    doc, code = run(preset(name))
    assert code == EXIT_OK
    assert all(r["verdict"] == "pass" for r in doc["reports"])
    assert False not in reverify(json.loads(json.dumps(doc)))


def test_hessian_pipeline_task_report():
    doc, _ = run(preset("perazzo"))
    w = doc["reports"][0]["witnesses"]
    assert w["R"] == "y1*y3 - y2^2"
    assert w["H"] == ["x5^2", "-2*x4*x5", "x4^2", "0", "0"]
    assert all(w["checks"].values())


def _file(tmp_path, text):
    path = tmp_path / "problem.txt"
    path.write_text(text)
    return str(path)


def test_exit_code_fail(tmp_path, capsys):
    path = _file(tmp_path, "dim 2\nmap H = [x2, x1]\ntask qt-check H\n")
    code, out = _run_main(capsys, "run", path)
    assert code == EXIT_FAIL
    assert json.loads(out)["reports"][0]["verdict"] == "fail"


def test_exit_code_parse(tmp_path, capsys):
    path = _file(tmp_path, "dim 2\nmap H = [x2 x1]\n")
    assert main(["run", path]) == EXIT_PARSE


def test_exit_code_precondition(tmp_path, capsys):
    path = _file(tmp_path, "dim 2\nmap H = [x2, x1]\ntask gcd-split H\n")
    code, _ = _run_main(capsys, "run", path)
    assert code == EXIT_PRECONDITION


def test_exit_code_alarm(monkeypatch, tmp_path, capsys):
    from qtrans import cli, errors

    def boom(*a, **k):
        raise errors.TheoremViolation("forced")

    monkeypatch.setitem(cli.COMMANDS, "qt-check", boom)
    path = _file(tmp_path, "dim 2\nmap H = [x2^2, 0]\ntask qt-check H\n")
    code, _ = _run_main(capsys, "run", path)
    assert code == EXIT_ALARM


def test_relations_subcommand_with_dmax(capsys):
    code, out = _run_main(capsys, "--preset", "b", "--dmax", "2", "relations", "H")
    assert code == EXIT_OK
    rep = json.loads(out)["reports"][0]
    assert rep["bounds"]["dmax"] == 2
    assert "y1*y3 - y2^2" in rep["witnesses"]["relations"]


def test_text_format_and_out_file(tmp_path, capsys):
    target = tmp_path / "report.txt"
    code = main(["--preset", "a2", "--format", "text", "--out", str(target), "linear-invariants"])
    assert code == EXIT_OK
    text = target.read_text()
    assert text.startswith("[pass] linear-invariants")
    assert "x5" in text


def test_output_is_deterministic():
    def strip(doc):
        for r in doc["reports"]:
            r.pop("timing")
        return json.dumps(doc, sort_keys=True)

    first, _ = run(preset("b"))
    second, _ = run(preset("b"))
    assert strip(first) == strip(second)


def test_reverify_detects_tampering():
    doc, _ = run(preset("b"))
    doc = json.loads(json.dumps(doc))
    rep = next(r for r in doc["reports"] if r["task"].startswith("fallb-verify"))
    rep["witnesses"]["q"] = "x1*x3 - x2^2 + x4*x5 + x1*x2"
    assert False in reverify(doc)


def test_run_accepts_options_after_file(tmp_path, capsys):
    path = _file(tmp_path, "dim 2\nmap H = [x2^2, 0]\ntask qt-check H\n")
    code, out = _run_main(capsys, "run", path, "--format", "text")
    assert code == EXIT_OK
    assert out.startswith("[pass] qt-check H")
