import json
import math
import subprocess
import sys

import pytest

from symmwave.cli import main

A2_FILE = "catalog = A2\npreset = normal\nlabel = a2\n"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gwp_exponents_three_dimensions(capsys):
    code, out, _ = run(capsys, "gwp", "exponents", "--d", "3")
    assert code == 0
    data = json.loads(out)
    assert abs(data["gamma_0"] - (1 + math.sqrt(2))) <= 1e-12
    assert out.count("\n") == 1


def test_unknown_flag_is_usage_error(capsys):
    code, out, err = run(capsys, "gwp", "exponents", "--d", "3", "--bogus")
    assert code == 2 and out == ""
    assert err.count("\n") == 1


def test_unknown_subcommand(capsys):
    assert run(capsys, "rootsys", "draw")[0] == 2


def test_missing_system(capsys):
    code, _, err = run(capsys, "rootsys", "info")
    assert code == 2 and "--system" in err


def test_bad_catalog(capsys):
    assert run(capsys, "rootsys", "info", "--system", "E8")[0] == 2


def test_chamber_verify_from_file(capsys, tmp_path):
    sys_file = tmp_path / "a2.sys"
    sys_file.write_text(A2_FILE)
    code, out, _ = run(capsys, "chamber", "verify", "--system", str(sys_file), "--samples", "10000")
    report = json.loads(out)
    assert code == 0 and report["pass"]
    assert report["system"] == "a2" and report["support_violations"] == 0
    assert report["partition_residual_max"] <= 1e-10


def test_rootsys_info(capsys):
    code, out, _ = run(capsys, "rootsys", "info", "--system", "G2")
    info = json.loads(out)
    assert code == 0 and info["weyl_order"] == 12 and info["dimension"] == 8


def test_plancherel_csv(capsys, tmp_path):
    pts = tmp_path / "lam.csv"
    pts.write_text("l1\n0.7\n2.0\n")
    code, out, _ = run(capsys, "plancherel", "eval", "--system", "H5", "--lambda", str(pts))
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "lambda_1,density,factor_root0"
    assert float(lines[2].split(",")[1]) == pytest.approx(0.5555555555555562, rel=1e-12)


def test_plancherel_rank_mismatch(capsys):
    assert run(capsys, "plancherel", "eval", "--system", "A2", "--lambda", "1,2,3")[0] == 2


def test_kernel_eval_columns(capsys):
    code, out, err = run(capsys, "kernel", "eval", "--system", "H3", "--kind", "I", "--s", "0.5", "--t", "1,2")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "t,re,im,abs,abs_error" and len(lines) == 3
    assert "symmwave:" in err


def test_kernel_decay_footer(capsys, tmp_path):
    target = tmp_path / "decay.csv"
    code, out, _ = run(capsys, "kernel", "decay", "--system", "H3", "--kind", "infty", "--sigma", "1",
                       "--t-range", "4:60:10", "--out", str(target))
    assert code == 0 and out == ""
    lines = target.read_text().strip().splitlines()
    assert len(lines) == 12
    footer = json.loads(lines[-1])
    assert set(footer) == {"exponent", "r2", "target", "tolerance", "pass"}
    assert footer["pass"] and footer["target"] == -1.5


def test_kernel_budget_exit_code(capsys):
    code, _, err = run(capsys, "kernel", "eval", "--system", "H3", "--kind", "I", "--s", "0.01",
                       "--t", "100", "--budget", "1000")
    assert code == 1 and "budget" in err


def test_parametrix_table(capsys):
    code, out, _ = run(capsys, "parametrix", "table", "--system", "H3", "--K", "1", "--grid", "0.25:1.3")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "H_1,r,omega,U0,U1" and len(lines) == 6
    assert float(lines[1].split(",")[3]) == pytest.approx(1 / math.pi, rel=1e-15)


def test_parametrix_checks(capsys):
    code, out, _ = run(capsys, "parametrix", "checks", "--system", "B2", "--samples", "20")
    assert code == 0 and json.loads(out)["pass"]


def test_strichartz_commands(capsys):
    code, out, _ = run(capsys, "strichartz", "admissible", "--d", "4", "--p", "inf", "--q", "2")
    assert code == 0 and json.loads(out) == {"admissible": True, "d": 4, "p": "inf", "q": 2.0}
    code, out, _ = run(capsys, "strichartz", "sigma", "--d", "4", "--p", "inf", "--q", "4")
    assert json.loads(out)["sigma"] == 1.0
    assert run(capsys, "strichartz", "sigma", "--d", "4", "--p", "1", "--q", "4")[0] == 2


def test_gwp_sigma(capsys):
    code, out, _ = run(capsys, "gwp", "sigma", "--d", "5", "--gamma", "1.2")
    assert code == 0 and json.loads(out)["case"] == "subcritical"


def test_output_overwritten_not_appended(capsys, tmp_path):
    target = tmp_path / "fam.json"
    for _ in range(2):
        assert run(capsys, "gwp", "exponents", "--d", "5", "--out", str(target))[0] == 0
    assert target.read_text().count("\n") == 1
    assert [p.name for p in tmp_path.iterdir()] == ["fam.json"]


def test_verify_subset_exit_code(capsys):
    code, out, err = run(capsys, "verify", "all", "--only", "2,12")
    report = json.loads(out)
    assert code == 0 and report["all_pass"]
    assert [c["criterion"] for c in report["criteria"]] == [2, 12]
    assert "seconds" not in out


def test_verify_unknown_criterion(capsys):
    assert run(capsys, "verify", "all", "--only", "99")[0] == 2


def test_thread_cap_validated(capsys, monkeypatch):
    monkeypatch.setenv("SYMMWAVE_THREADS", "zero")
    assert run(capsys, "gwp", "exponents", "--d", "4")[0] == 2
    monkeypatch.setenv("SYMMWAVE_THREADS", "2")
    assert run(capsys, "gwp", "exponents", "--d", "4")[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "symmwave", "gwp", "exponents", "--d", "4"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["d"] == 4
