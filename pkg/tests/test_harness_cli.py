import json
import re
import subprocess
import sys

import jsonschema
import pytest

import ksverify.harness as hz
from ksverify.cli import main
from ksverify.fixtures import builtin_path
from ksverify.harness import (
    REPORT_SCHEMA,
    CheckRecord,
    ConfigError,
    SuiteConfig,
    VerificationReport,
    check_rng,
    default_digits,
    emit_report,
    load_report,
    report_json,
    report_text,
    run_suite,
)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_empty_suite_gives_empty_report():
    report = run_suite(SuiteConfig(suites=()))
    assert report.checks == [] and report.passed
    data = json.loads(report_json(report))
    assert data["checks"] == [] and data["passed"]
    assert report_text(report).endswith("0 checks, 0 failed (seed 0, 40 digits)\n")


def test_siegel_run_twice_byte_identical(capsys):
    argv = ["verify", "siegel", "--r", "1", "--g", "1", "--samples", "10", "--seed", "7"]
    code1, out1, _ = run(argv, capsys)
    code2, out2, _ = run(argv, capsys)
    assert code1 == code2 == 0
    assert out1 == out2
    data = json.loads(out1)
    jsonschema.validate(data, REPORT_SCHEMA)
    assert {c["id"] for c in data["checks"]} == {
        "siegel.main[r=1,g=1]",
        "siegel.covolume[r=1,g=1]",
        "siegel.standard_point[r=1,g=1]",
        "siegel.riemann_axioms[r=1,g=1]",
        "siegel.riemann_form[r=1]",
    }


def test_bad_mu_fixture_exit_2(tmp_path, capsys):
    data = json.loads(builtin_path("split_q").read_text())
    data["mu"] = ["0", "1", "0", "0"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, out, err = run(["verify", "twisted", "--fixture", str(path)], capsys)
    assert code == 2 and out == ""
    assert "precondition on mu failed" in err and "totally negative" in err


def test_inadmissible_grid_and_bad_prime_exit_2(capsys):
    assert run(["verify", "cech", "--grid", "2"], capsys)[0] == 2
    assert run(["verify", "local", "--p", "2", "--k", "2"], capsys)[0] == 2
    assert run(["verify", "local", "--p", "5", "--k", "1", "--bad"], capsys)[0] == 2


def test_failing_check_exit_1_with_witness(monkeypatch, capsys):
    monkeypatch.setattr(hz.sg, "verify_siegel_main", lambda z: 1.0)
    code, out, _ = run(["verify", "siegel", "--r", "1", "--samples", "3", "--format", "text"], capsys)
    assert code == 1
    assert re.search(r"siegel\.main\[r=1,g=1\]\s+FAIL\s+1\.00e\+00", out)
    assert out.strip().endswith("5 checks, 2 failed (seed 0, 40 digits)")
    report = run_suite(SuiteConfig(suites=("siegel",), samples=3, siegel_shapes=((1, 1),)))
    failed = [c.to_dict() for c in report.checks if not c.passed]
    assert failed and all(c["witness"] is not None for c in failed)
    passing = [c.to_dict() for c in report.checks if c.passed]
    assert all(c["witness"] is None for c in passing)


def test_text_table_one_pass_row():
    rep = VerificationReport(seed=1, digits=40)
    rep.add(CheckRecord("demo", True, residual=1.234e-13, tolerance=1e-10))
    text = emit_report(rep, "text")
    lines = text.splitlines()
    assert lines[2].split() == ["demo", "PASS", "1.23e-13"]
    assert lines[-1] == "1 checks, 0 failed (seed 1, 40 digits)"


def test_residual_format_three_significant_digits():
    rec = CheckRecord("x", True, residual=0.000123456, tolerance=1e-10).to_dict()
    assert rec["residual"] == "1.23e-04" and rec["tolerance"] == "1.00e-10"
    assert "runtime" not in rec
    assert CheckRecord("x", True, runtime=0.5).to_dict(timing=True)["runtime"] == 0.5


def test_duplicate_ids_rejected():
    rep = VerificationReport(seed=0, digits=40)
    rep.add(CheckRecord("a", True))
    with pytest.raises(ValueError):
        rep.add(CheckRecord("a", True))


def test_json_round_trip_and_report_command(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, stdout, _ = run(["verify", "local", "--p", "5", "--k", "2", "--out", str(out)], capsys)
    assert code == 0 and "2 checks, 0 failed" in stdout
    data = load_report(out)
    assert json.loads(report_json(data)) == data
    code, text, _ = run(["report", "--in", str(out)], capsys)
    assert code == 0 and "local.bad[p=5,k=2]" in text and "local.good[p=5,k=2]" in text
    code, js, _ = run(["report", "--in", str(out), "--format", "json"], capsys)
    assert json.loads(js) == data
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert run(["report", "--in", str(bad)], capsys)[0] == 2


def test_unwritable_path(tmp_path):
    with pytest.raises(OSError, match="cannot write"):
        emit_report(VerificationReport(0, 40), "json", str(tmp_path / "missing" / "r.json"))


def test_env_digits(monkeypatch):
    monkeypatch.setenv("KS_VERIFY_DIGITS", "60")
    assert default_digits() == 60
    assert SuiteConfig().digits == 60
    monkeypatch.setenv("KS_VERIFY_DIGITS", "8")
    with pytest.raises(ConfigError):
        default_digits()
    monkeypatch.setenv("KS_VERIFY_DIGITS", "abc")
    with pytest.raises(ConfigError):
        default_digits()
    monkeypatch.delenv("KS_VERIFY_DIGITS")
    assert default_digits() == 40


def test_unknown_suite_rejected():
    with pytest.raises(ConfigError):
        SuiteConfig(suites=("nope",))


def test_rng_split_by_label_is_stable():
    a = check_rng(7, "siegel[r=1,g=1]").random(3)
    b = check_rng(7, "siegel[r=1,g=1]").random(3)
    c = check_rng(7, "siegel[r=2,g=1]").random(3)
    assert (a == b).all() and not (a == c).all()


def test_adding_a_check_does_not_perturb_others(capsys):
    _, one, _ = run(["verify", "siegel", "--r", "2", "--samples", "5", "--seed", "3"], capsys)
    _, two, _ = run(["verify", "siegel", "--r", "1,2", "--samples", "5", "--seed", "3"], capsys)
    pick = lambda s: [c for c in json.loads(s)["checks"] if "r=2" in c["id"]]
    assert pick(one) == pick(two)


def test_twisted_report_flags_norm_convention(capsys):
    code, out, _ = run(["verify", "twisted", "--fixture", "split_qsqrt2", "--samples", "5"], capsys)
    assert code == 0
    checks = {c["id"]: c for c in json.loads(out)["checks"]}
    assert checks["twisted.split_qsqrt2.volume"]["info"]["Nm_d_B"] == "1"


def test_console_script_entry_point(tmp_path):
    out = tmp_path / "c.json"
    proc = subprocess.run(
        [sys.executable, "-m", "ksverify.cli", "verify", "cech", "--out", str(out), "--format", "json"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert load_report(out)["passed"]


def test_every_check_carries_a_witness_for_failures():
    report = run_suite(SuiteConfig(suites=hz.SUITES, samples=3, ks_points=2))
    assert report.passed
    assert [c.id for c in report.checks if c.witness is None] == []
