"""End-to-end tests of the command-line interface.

Everything goes through main(argv) in-process: stdout must carry only the
report, stderr the diagnostics, and the exit code must follow the
0 = pass / 1 = check failed / 2 = usage-or-input-error contract.
"""

import io
import json

import pytest

from empcalc.cli import main


FOUR_ROWS = "1,1\n2,3\n3,2\n4,4\n"


def write_csv(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --------------------------------------------------------------- estimate

def test_estimate_four_row_file(tmp_path, capsys):
    path = write_csv(tmp_path, FOUR_ROWS)
    with pytest.warns(UserWarning, match="normal approximation"):  # n = 4
        code, out, err = run_cli(capsys, "estimate", "--input", path)
    assert code == 0
    report = json.loads(out)
    assert list(report.keys()) == ["command", "config", "results", "checks", "seed"]
    assert report["command"] == "estimate"
    assert report["results"]["rho_n"] == pytest.approx(0.8, rel=1e-14)
    assert report["results"]["n"] == 4
    lo, hi = report["results"]["ci95"]
    assert lo < 0.8 < hi
    assert 0.0 <= report["results"]["p_value"] <= 1.0


def test_estimate_reads_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(FOUR_ROWS))
    with pytest.warns(UserWarning, match="normal approximation"):
        code, out, _ = run_cli(capsys, "estimate", "--input", "-")
    assert code == 0
    assert json.loads(out)["results"]["rho_n"] == pytest.approx(0.8, rel=1e-14)


def test_estimate_reports_bad_line_number(tmp_path, capsys):
    path = write_csv(tmp_path, "1,2\n3,4\noops,5\n")
    code, out, err = run_cli(capsys, "estimate", "--input", path)
    assert code == 2
    assert out == ""
    assert "error: line 3: non-numeric value 'oops'" in err


def test_estimate_rejects_constant_column(tmp_path, capsys):
    path = write_csv(tmp_path, "1,7\n2,7\n3,7\n")
    code, out, err = run_cli(capsys, "estimate", "--input", path)
    assert code == 2
    assert "degenerated marginal" in err


def test_estimate_missing_file(tmp_path, capsys):
    code, _, err = run_cli(capsys, "estimate", "--input", str(tmp_path / "nope.csv"))
    assert code == 2
    assert "error:" in err


# --------------------------------------------------------------- variance

def test_variance_gaussian_half(capsys):
    code, out, _ = run_cli(capsys, "variance", "--law", "gaussian", "--rho", "0.5")
    assert code == 0
    report = json.loads(out)
    assert report["results"]["sigma2"] == pytest.approx(0.5625, rel=1e-12)
    assert report["results"]["abs_difference"] < 1e-9
    assert report["checks"][0]["name"] == "pipeline_agreement"
    assert report["checks"][0]["pass"] is True


def test_variance_independent_normals_is_one(capsys):
    code, out, _ = run_cli(capsys, "variance", "--law", "independent",
                           "--mx", "standard_normal", "--my", "standard_normal")
    assert code == 0
    assert json.loads(out)["results"]["sigma2"] == pytest.approx(1.0, rel=1e-12)


def test_variance_affine_rho_is_usage_error(capsys):
    code, out, err = run_cli(capsys, "variance", "--law", "gaussian", "--rho", "1")
    assert code == 2
    assert out == ""
    assert "affine dependence, asymptotics excluded" in err


def test_variance_requires_a_law(capsys):
    code, _, err = run_cli(capsys, "variance")
    assert code == 2
    assert "requires --law" in err


def test_variance_gaussian_requires_rho(capsys):
    code, _, err = run_cli(capsys, "variance", "--law", "gaussian")
    assert code == 2
    assert "--rho" in err


def test_variance_mixture_via_law_json(capsys):
    spec = json.dumps({
        "kind": "mixture",
        "components": [{"kind": "gaussian", "rho": 0.8},
                       {"kind": "gaussian", "rho": -0.2}],
        "weights": [0.3, 0.7],
    })
    code, out, _ = run_cli(capsys, "variance", "--law-json", spec)
    assert code == 0
    assert json.loads(out)["results"]["rho"] == pytest.approx(0.1, rel=1e-12)


def test_variance_invalid_law_json(capsys):
    code, _, err = run_cli(capsys, "variance", "--law-json", "{not json")
    assert code == 2
    assert "invalid JSON" in err


def test_variance_mixture_flag_needs_json(capsys):
    code, _, err = run_cli(capsys, "variance", "--law", "mixture")
    assert code == 2
    assert "--law-json" in err


# --------------------------------------------------------------- simulate

def test_simulate_gaussian_reference_run(capsys):
    code, out, _ = run_cli(capsys, "simulate", "--law", "gaussian", "--rho", "0.5",
                           "--n", "2000", "--reps", "5000", "--seed", "42")
    assert code == 0
    report = json.loads(out)
    assert 0.506 <= report["results"]["empirical_variance"] <= 0.619
    assert report["results"]["predicted_sigma2"] == pytest.approx(0.5625, rel=1e-12)
    assert all(c["pass"] for c in report["checks"])


def test_simulate_rejects_small_reps(capsys):
    code, out, err = run_cli(capsys, "simulate", "--law", "gaussian", "--rho", "0.5",
                             "--n", "100", "--reps", "50")
    assert code == 2
    assert "reps ≥ 100 required" in err


def test_simulate_failed_check_exits_one(capsys):
    # n=2 is legal but cannot pass; the report must still be emitted
    code, out, _ = run_cli(capsys, "simulate", "--law", "gaussian", "--rho", "0.5",
                           "--n", "2", "--reps", "100", "--seed", "7")
    assert code == 1
    report = json.loads(out)
    assert any(not c["pass"] for c in report["checks"])


# ----------------------------------------------------------------- lemma1

def test_lemma1_small_run(capsys):
    # a quick flow check: reps=400 needs wider bands than the defaults,
    # which are sized for reps=5000
    code, out, _ = run_cli(capsys, "lemma1", "--law", "gaussian", "--rho", "0.3",
                           "--n", "400", "--reps", "400", "--seed", "3",
                           "--functions", "pi1,pi2,p",
                           "--cov-atol", "0.25", "--ks-tol", "0.15")
    assert code == 0
    report = json.loads(out)
    assert report["config"]["functions"] == ["pi1", "pi2", "p"]
    assert report["config"]["cov_atol"] == 0.25
    assert report["results"]["degenerate_coordinates"] == []


def test_lemma1_unknown_function(capsys):
    code, _, err = run_cli(capsys, "lemma1", "--law", "gaussian", "--rho", "0.3",
                           "--n", "100", "--reps", "100", "--functions", "pi3")
    assert code == 2
    assert "unknown function" in err and "pi1" in err


# ------------------------------------------------------------------ check

def test_check_subset_is_byte_identical_across_runs(capsys):
    args = ("check", "--criteria", "1,4,6", "--seed", "42")
    code1, out1, err1 = run_cli(capsys, *args)
    code2, out2, err2 = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    for err in (err1, err2):
        assert "criterion 1 (" in err and "pass" in err


def test_check_subset_thread_budget_does_not_change_bytes(monkeypatch, capsys):
    args = ("check", "--criteria", "1,4,6", "--seed", "42")
    monkeypatch.delenv("EMPCALC_THREADS", raising=False)
    _, out_default, _ = run_cli(capsys, *args)
    monkeypatch.setenv("EMPCALC_THREADS", "4")
    _, out_threaded, _ = run_cli(capsys, *args)
    assert out_default == out_threaded


def test_check_unknown_criterion(capsys):
    code, _, err = run_cli(capsys, "check", "--criteria", "9")
    assert code == 2
    assert "error:" in err


def test_check_non_integer_criteria(capsys):
    code, _, err = run_cli(capsys, "check", "--criteria", "one")
    assert code == 2
    assert "comma-separated integers" in err


# ----------------------------------------------------------- output modes

def test_output_flag_writes_file_and_keeps_stdout_clean(tmp_path, capsys):
    dest = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "variance", "--law", "gaussian", "--rho", "0.5",
                           "--output", str(dest))
    assert code == 0
    assert out == ""
    report = json.loads(dest.read_text())
    assert report["command"] == "variance"


def test_csv_format_output(capsys):
    code, out, _ = run_cli(capsys, "variance", "--law", "gaussian", "--rho", "0.5",
                           "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "section,name,value,threshold,pass"
    assert any(line.startswith("result,sigma2,0.5625") for line in lines)
    assert any(line.startswith("check,pipeline_agreement,") and line.endswith(",pass")
               for line in lines)


def test_unwritable_output_is_io_error(tmp_path, capsys):
    dest = tmp_path / "missing_dir" / "report.json"
    code, _, err = run_cli(capsys, "variance", "--law", "gaussian", "--rho", "0.5",
                           "--output", str(dest))
    assert code == 2
    assert "error:" in err
