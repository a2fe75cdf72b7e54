from __future__ import annotations

import json

import pytest

from friable.cli import fmt, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_examples(capsys):
    assert run(capsys, "compute", "--fn", "rho", "--u", "2.0")[:2] == (0, "0.306852819440055\n")
    assert run(capsys, "compute", "--fn", "psi", "--x", "30", "--y", "5")[:2] == (0, "18\n")
    assert run(capsys, "compute", "--fn", "phi", "--x", "30", "--y", "5")[:2] == (0, "8\n")


def test_fmt_shortest_round_trip():
    assert fmt(0.1) == "0.1"
    assert fmt(18) == "18"
    assert fmt(1 / 3) == "0.333333333333333"


def test_table_output_is_csv(capsys):
    code, out, _ = run(capsys, "table", "--fn", "psi,phi", "--x", "10,20", "--y", "3")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "x,y,u,psi,phi" and len(lines) == 3


def test_domain_error_exit_code(capsys):
    assert run(capsys, "compute", "--fn", "psi", "--x", "10", "--y", "1")[0] == 3
    assert run(capsys, "compute", "--fn", "lambda", "--x", "0.5", "--y", "7")[0] == 3
    assert run(capsys, "verify", "--suite", "thm1eq1", "--x", "0.5,10", "--y", "5")[0] == 3


def test_usage_error_exit_code(capsys):
    assert run(capsys, "compute", "--fn", "nope", "--x", "1", "--y", "2")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 2


def test_verify_pass_and_report(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "factorization", "--x-max", "2000",
                       "--y", "2,3,5", "--no-timestamp")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] is True and rep["max_scaled_residual"] == 0
    assert set(rep) >= {"suite", "grid", "tol", "max_scaled_residual", "worst", "pass",
                        "metadata"}
    assert "timestamp" not in rep["metadata"]


def test_verify_is_byte_identical(capsys):
    argv = ["verify", "--suite", "thm1eq1_star", "--x", "10:1000:5log", "--y", "5,13",
            "--no-timestamp"]
    first = run(capsys, *argv)
    second = run(capsys, *argv, "--workers", "2")
    assert first[0] == 0 and first[1] == second[1]


def test_verify_truncated_tail_is_inconclusive(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "thm1eq2", "--x", "100", "--y", "7",
                       "--tail", "truncate", "--no-timestamp")
    rep = json.loads(out)
    assert code == 4 and rep["status"] == "inconclusive" and rep["inconclusive_budget"] > 1e-5
    code, out, _ = run(capsys, "verify", "--suite", "thm1eq2", "--x", "100", "--y", "7",
                       "--no-timestamp")
    assert code == 0


def test_verify_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "thm1eq1_star", "--x", "1000",
                       "--y", "5", "--tol", "0", "--no-timestamp")
    assert code == 1 and json.loads(out)["pass"] is False


def test_audit_csv_and_summary(capsys, tmp_path):
    summary = tmp_path / "s.json"
    code, out, _ = run(capsys, "audit", "--bound", "rh", "--y", "30000", "--x", "10:1e5:8log",
                       "--summary", str(summary), "--no-timestamp")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "x,y,observed,bound,margin,trivial_flag"
    assert len(lines) == 9
    data = json.loads(summary.read_text())
    assert data["all_within_bound"] is True and data["label"].startswith("observation")


def test_audit_implication_exit_codes(capsys):
    code, _, err = run(capsys, "audit", "--bound", "corexact2", "--y", "7", "--X", "2000",
                       "--no-timestamp")
    assert code == 0 and json.loads(err)["reports"][0]["status"] == "pass"
    code, _, _ = run(capsys, "audit", "--bound", "corexact2", "--y", "7", "--X", "2000",
                     "--f", "1e-6", "--no-timestamp")
    assert code == 4


def test_verify_all_suites(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "all", "--x", "10,100.5", "--y", "7",
                       "--no-timestamp")
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "pass" and rep["n_errors"] == 0
