import io
import json

import pytest

from lamexam.cli import main
from lamexam.syntax import parse
from lamexam.trace import Trace

from conftest import OMEGA


def run(argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, stdin=io.StringIO(stdin), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_reduce_stdin_with_comments():
    code, out, _ = run(["reduce"], "-- the running example\nx ((\\y. y) z) ((\\w. w w) z)  -- trailing\n")
    assert code == 0
    assert "result: x z (z z)" in out and "beta: 2" in out


@pytest.mark.parametrize("machine", ["mam", "bmam", "exam"])
def test_reduce_each_machine(machine):
    code, out, _ = run(["reduce", "--machine", machine], "(\\x. x) y")
    assert code == 0 and "result: y" in out


def test_reduce_file(tmp_path):
    f = tmp_path / "t.lam"
    f.write_text("(\\x. \\y. x) z ((\\u. u u) (\\u. u u))\n", encoding="utf-8")
    code, out, _ = run(["reduce", str(f), "--template", "set", "--seed", "3"])
    assert code == 0 and "result: z" in out and "beta: 2" in out


def test_fuel_exhaustion_exits_2():
    code, out, _ = run(["reduce", "--fuel", "50"], OMEGA)
    assert code == 2 and "outcome: fuel_exhausted" in out


def test_usage_and_parse_errors_exit_1(tmp_path):
    assert run(["reduce"], "(\\x. x")[0] == 1
    assert run(["reduce", "--machine", "krivine"], "x")[0] == 1
    assert run(["reduce", "--fuel", "-1"], "x")[0] == 1
    assert run(["reduce", str(tmp_path / "missing")])[0] == 1
    assert run([])[0] == 1
    assert run(["gen", "--size", "0"])[0] == 1


def test_trace_levels():
    _, labels, _ = run(["reduce", "--trace", "labels"], "(\\x. x) y")
    assert labels.splitlines()[0].split() == ["1", "sea_app", "α0"]
    _, full, _ = run(["reduce", "--trace", "full"], "(\\x. x) y")
    assert "||" in full and len(full.splitlines()) > len(labels.splitlines())


def test_records_round_trip():
    code, out, _ = run(["reduce", "--format", "records", "--trace", "full"], "x ((\\y. y) z)")
    assert code == 0
    trace = Trace.loads(out)
    assert trace.result == parse("x z") and trace.beta_count == 1
    for line in out.splitlines():
        json.loads(line)


def test_records_on_fuel_exhaustion():
    code, out, _ = run(["reduce", "--format", "records", "--fuel", "20"], OMEGA)
    assert code == 2
    assert json.loads(out.splitlines()[-1])["outcome"] == "fuel_exhausted"


def test_interactive_reads_choices_from_stdin(tmp_path):
    f = tmp_path / "t.lam"
    f.write_text("x ((\\y. y) z)", encoding="utf-8")
    code, out, err = run(["reduce", str(f), "--template", "interactive"], "0\nα0\nbogus\n2\nα2\n2\n2\n")
    assert code == 0 and "result: x z" in out
    assert "select>" in err and "not a job name: 'bogus'" in err


def test_interactive_needs_a_file():
    assert run(["reduce", "--template", "interactive"], "x")[0] == 1


def test_interactive_eof_is_an_error(tmp_path):
    f = tmp_path / "t.lam"
    f.write_text("x y", encoding="utf-8")
    assert run(["reduce", str(f), "--template", "interactive"], "")[0] == 1


def test_gen_is_reproducible():
    a = run(["gen", "--count", "5", "--size", "8", "--seed", "4"])
    b = run(["gen", "--count", "5", "--size", "8", "--seed", "4"])
    assert a == b and a[0] == 0 and len(a[1].splitlines()) == 5
    for line in a[1].splitlines():
        parse(line)
    code, out, _ = run(["gen", "--count", "3", "--format", "records", "--mode", "open"])
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and all(r["size"] >= 1 for r in rows)


def test_check_suite():
    code, out, _ = run(["check", "--suite", "invariants", "--count", "5", "--size", "8", "--fuel", "100"])
    assert code == 0 and out.startswith("PASS invariants: 5 cases")
    code, out, _ = run(["check", "--suite", "fair", "--count", "3", "--format", "records"])
    report = json.loads(out)
    assert code == 0 and report["ok"] and report["cases"] == 3
    assert run(["check", "--suite", "nope"])[0] == 1
