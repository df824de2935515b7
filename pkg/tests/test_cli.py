import io
import json

import pytest

from mapring import cli
from mapring import presentations as pres


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_verify_lemma31_flag():
    code, out, _ = call("verify", "lemma31", "--d", "1", "--n", "3")
    assert code == 0
    data = json.loads(out)
    assert data["passed"] and len(data["checks"]) == 1
    assert data["checks"][0]["status"] == "pass"


def test_schedule_d5():
    code, out, _ = call("schedule", "--d", "5", "--m", "0", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["blow_downs"] == 2


def test_verify_example36_reports_printed_failures():
    # the printed f-square relation, k form, S-recurrence and Y matrix do not hold for n=2
    code, out, _ = call("verify", "example36", "--n", "2")
    data = json.loads(out)
    assert len(data["checks"]) >= 10
    assert code == 1 and not data["passed"]
    failed = [c for c in data["checks"] if c["status"] == "fail"]
    assert failed and all(c.get("witness") for c in failed)
    assert all(c["status"] == "pass" for c in data["checks"] if "(corrected)" in c["check"])


def test_verify_list_names_every_suite():
    code, out, _ = call("verify", "--list")
    assert code == 0
    names = {row["suite"] for row in json.loads(out)}
    assert {"lemma31", "example36", "d2relations", "groebner", "schedules", "all"} <= names
    code, out, _ = call("verify", "--list", "--format", "table")
    assert code == 0 and "example36" in out


@pytest.mark.parametrize("argv", [
    ("frobnicate",),
    ("verify", "nosuch"),
    ("verify",),
    ("verify", "lemma31", "--k", "1"),
    ("build", "m01_pn_d2"),
    ("build", "m01_pn_d2", "--n", "-1"),
    ("schedule",),
    ("schedule", "--d", "4", "--k", "9"),
    ("hilbert", "projective_space", "--n", "x"),
    ("invariants", "--n", "0"),
    ("build", "lemma31", "--d", "0"),
])
def test_usage_errors(argv):
    code, out, err = call(*argv)
    assert code == 2 and out == ""


def test_pinning_failure_exit_code(monkeypatch):
    def boom(*a, **k):
        raise pres.ConventionPinningError("no candidate passed", [("I={1}", False, "witness")])
    monkeypatch.setattr(pres, "pin_convention", boom)
    code, out, err = call("verify", "d2relations", "--n", "1")
    assert code == 3
    data = json.loads(err)
    assert data["error"] == "convention pinning failed"
    code, _, _ = call("build", "relation3", "--n", "1")
    assert code == 3


@pytest.mark.parametrize("argv", [
    ("build", "m01_pn_d2", "--n", "2"),
    ("hilbert", "grassmannian_lines", "--n", "3"),
    ("verify", "coefficients", "--format", "table"),
    ("schedule", "--d", "3", "--m", "2"),
    ("invariants", "--n", "2"),
])
def test_byte_identical_output(argv):
    assert call(*argv) == call(*argv)


def test_hilbert_values():
    code, out, _ = call("hilbert", "flag_d1", "--n", "2")
    assert json.loads(out)["hilbert"] == [1, 2, 2, 1]
    code, out, _ = call("hilbert", "grassmannian_lines", "--n", "3", "--format", "table")
    assert code == 0 and out.splitlines()[0]


def test_invariants_verb():
    code, out, _ = call("invariants", "--n", "2")
    data = json.loads(out)
    assert data["invariant_hilbert"] == [1, 3, 6, 7, 6, 3, 1] and data["palindromic"]


def test_out_path(tmp_path):
    p = tmp_path / "m.json"
    code, out, _ = call("build", "flag_d1", "--n", "2", "--out", str(p))
    assert code == 0 and out == ""
    data = json.loads(p.read_text())
    assert data == json.loads(call("build", "flag_d1", "--n", "2")[1])


def test_build_list_and_tables():
    code, out, _ = call("build", "--list")
    assert "psi_sum" in json.loads(out)
    code, out, _ = call("build", "thm_m", "--d", "2", "--m", "1", "--format", "table")
    assert code == 0 and "relation" in out
    code, out, _ = call("build", "psi_sum", "--d", "2", "--m", "2", "--k", "1")
    assert code == 0


def test_timings_flag():
    _, plain, _ = call("verify", "lemma31", "--d", "1", "--n", "2")
    _, timed, _ = call("verify", "lemma31", "--d", "1", "--n", "2", "--timings")
    assert "ms" not in json.loads(plain)["checks"][0]
    assert "ms" in json.loads(timed)["checks"][0]


def test_console_script_entry(monkeypatch, capsys):
    monkeypatch.setattr("sys.argv", ["mapring", "schedule", "--d", "2"])
    with pytest.raises(SystemExit) as e:
        cli.main()
    assert e.value.code == 0
    assert json.loads(capsys.readouterr().out)["d"] == 2
