import json
import subprocess
import sys

import pytest

from polysplit.bench import CSV_HEADER
from polysplit.cli import main
from polysplit.schemes import builtin_scheme, save_scheme_file


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_builtins(capsys):
    code, out, err = run(["validate"], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("scheme,kind,order")
    assert len(out.splitlines()) == 6
    assert "QA19_8" in err  # declared l1 printed with fewer digits than recomputed


def test_validate_json(capsys):
    code, out, _ = run(["validate", "--scheme", "CA22_10", "--format", "json"], capsys)
    rows = json.loads(out)
    assert code == 0 and rows[0]["symmetry_ok"] and rows[0]["accepted"]


def test_validate_rejects_bad_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "bad", "order": 2, "stages": 1, "kind": "ABA", "a": [0.5, 0.6], "b": [1.0]}))
    code, _, err = run(["validate", "--scheme-file", str(path)], capsys)
    assert code == 2 and "palindromic" in err


def test_unknown_scheme_is_validation_failure(capsys):
    code, _, err = run(["run", "--scheme", "XX", "--h", "0.1", "--tf", "1"], capsys)
    assert code == 2 and "unknown scheme" in err


def test_order_json(capsys):
    code, out, _ = run(["order", "--scheme", "strang", "--h-range", "0.0125:0.1:4", "--tf", "10"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["omega"]["w31"] == pytest.approx(-1 / 24, abs=1e-15)
    assert abs(data["slope"] - 2) < 0.1
    assert data["design_class"] == "ok"


def test_order_window_error(capsys):
    code, _, err = run(["order", "--scheme", "CA22_10", "--h-range", "0.0125:0.1:4", "--tf", "10"], capsys)
    assert code == 1 and "asymptotic window" in err


def test_run_writes_trajectory(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, _, err = run(["run", "--scheme", "CA11_6", "--h", "0.3", "--tf", "3", "--output", str(out)], capsys)
    assert code == 0
    assert out.read_text().splitlines()[0] == "t,E,rel_energy_error"
    meta = json.loads((tmp_path / "t.csv.json").read_text())
    assert meta["steps"] == 10 and meta["force_evals"] == 110
    assert json.loads(err)["h_actual"] == pytest.approx(0.3)


def test_bench_csv_and_determinism(tmp_path, capsys):
    args = ["bench", "--scheme", "strang", "--scheme", "CA11_6", "--h", "0.2", "--h-range", "0.05:0.1:2",
            "--tf", "20", "--no-timing"]
    code, first, err = run(args, capsys)
    assert code == 0
    lines = first.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 2 * 3
    assert "comparison methods not loaded" in err and "SS19_8" in err
    _, second, _ = run(args + ["--jobs", "2"], capsys)
    assert first == second


def test_bench_json_and_summary(tmp_path, capsys):
    summary = tmp_path / "sum.csv"
    code, out, _ = run(["bench", "--problem", "random_quartic", "--seed", "4", "--seed", "5", "--h", "0.1",
                        "--tf", "5", "--format", "json", "--summary", str(summary)], capsys)
    data = json.loads(out)
    assert code == 0 and len(data["results"]) == 2
    text = summary.read_text().splitlines()
    assert text[0].endswith("mean_error") and len(text) == 2


def test_bench_spec_error(capsys):
    code, _, err = run(["bench", "--h", "0"], capsys)
    assert code == 1
    code, _, _ = run(["bench", "--tf", "10"], capsys)
    assert code == 1


def test_bench_all_diverged(capsys):
    code, out, _ = run(["bench", "--problem", "random_cubic", "--dim", "10", "--seed", "0", "--h", "0.1",
                        "--tf", "100", "--no-timing"], capsys)
    assert code == 3
    assert out.splitlines()[1].split(",")[8] == "inf"


def test_bench_loads_synthetic_comparator(tmp_path, capsys):
    path = tmp_path / "ss.json"
    path.write_text(json.dumps({"name": "SS19_8", "order": 2, "design": "general", "alphas": [1 / 19] * 19}))
    code, out, err = run(["bench", "--scheme", "strang", "--scheme-file", str(path), "--h", "0.5", "--tf", "10",
                          "--no-timing"], capsys)
    assert code == 0
    assert any(line.startswith("SS19_8,") for line in out.splitlines())
    assert "SS19_8" not in err.split(":")[-1]


def test_bench_scheme_file_round_trip(tmp_path, capsys):
    path = tmp_path / "ca.json"
    save_scheme_file(builtin_scheme("CA12_8"), path)
    _, from_file, _ = run(["bench", "--scheme-file", str(path), "--h", "0.5", "--tf", "10", "--no-timing"], capsys)
    _, builtin, _ = run(["bench", "--scheme", "CA12_8", "--h", "0.5", "--tf", "10", "--no-timing"], capsys)
    assert from_file == builtin


def test_sweep_alpha(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, _, _ = run(["sweep-alpha", "--scheme", "CA11_6", "--alpha-range", "0.2:0.6:3", "--tf", "50",
                      "--no-timing", "--output", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("scheme,problem,alpha,seed") and len(lines) == 4
    meta = json.loads((tmp_path / "sweep.csv.meta.json").read_text())
    assert meta["alpha_thresholds"]["chaotic_above"] == 1.0328
    code, _, _ = run(["sweep-alpha", "--alpha", "1.5"], capsys)
    assert code == 1


def test_longrun(tmp_path, capsys):
    code, _, err = run(["longrun", "--tf", "100"], capsys)
    assert code == 1 and "1e4" in err
    out = tmp_path / "long.csv"
    code, _, _ = run(["longrun", "--scheme", "CA11_6", "--tf", "1e4", "--output", str(out)], capsys)
    assert code == 0
    assert len(out.read_text().splitlines()) == 1 + 5
    stats = json.loads((tmp_path / "long.csv.json").read_text())
    assert stats[0]["drift_statistic"] <= 2


def test_schrodinger(tmp_path, capsys):
    out = tmp_path / "psi.csv"
    code, _, err = run(["schrodinger", "--scheme", "QA19_8", "--h", "0.5", "--tf", "5", "--output", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,energy,norm" and len(lines) == 12
    assert json.loads(err)["max_norm_drift"] < 1e-12
    code, _, _ = run(["schrodinger", "--n-points", "100"], capsys)
    assert code == 1
    code, _, _ = run(["schrodinger", "--swap-roles", "--h", "0.5", "--tf", "1"], capsys)
    assert code == 0


def test_lie_check(capsys):
    code, out, _ = run(["lie-check", "--degree", "2", "--dim", "1", "--trials", "3"], capsys)
    assert code == 0
    assert out.count("PASS") == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polysplit.cli", "validate", "--scheme", "strang"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "strang,ABA" in proc.stdout
