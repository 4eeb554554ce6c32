"""End-to-end command line behavior through real subprocesses."""

import csv
import subprocess
import sys

EXE = [sys.executable, "-m", "gifteq"]


def run_cli(args, cwd):
    return subprocess.run(EXE + list(args), cwd=cwd, capture_output=True,
                          text=True, timeout=300)


def test_run_writes_report_csv_and_figure(tmp_path):
    proc = run_cli(["run", "graph_II_6", "--out", "artifacts"], tmp_path)
    assert proc.returncode == 0
    assert "status: converged" in proc.stdout
    assert "equilibrium: 2.39" in proc.stdout
    assert "theorem-applies: True" in proc.stdout

    csv_path = tmp_path / "artifacts" / "graph_II_6_trajectory.csv"
    png_path = tmp_path / "artifacts" / "graph_II_6_run.png"
    assert csv_path.exists()
    assert png_path.exists() and png_path.stat().st_size > 0

    with open(csv_path, newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["step_index", "phase", "balance", "p_yield", "q_yield"]
    assert rows[1][:2] == ["1", "1"]
    assert float(rows[1][2]) == 2.0
    assert len(rows) == 51  # header + default 50 steps


def test_run_respects_steps_and_x0(tmp_path):
    proc = run_cli(["run", "graph_II_6", "--steps", "8", "--x0", "1.0",
                    "--out", "."], tmp_path)
    assert proc.returncode == 0
    with open(tmp_path / "graph_II_6_trajectory.csv", newline="") as handle:
        rows = list(csv.reader(handle))
    assert len(rows) == 9
    # First step from x0 = 1: balance 1 + (2 - 0.5) = 2.5.
    assert float(rows[1][2]) == 2.5


def test_run_divergent_scenario_exits_2(tmp_path):
    proc = run_cli(["run", "constant_drift", "--out", "."], tmp_path)
    assert proc.returncode == 2
    assert "status: diverged" in proc.stdout
    assert "translation regime" in proc.stdout
    # Artifacts still land for inspection.
    assert (tmp_path / "constant_drift_trajectory.csv").exists()
    assert (tmp_path / "constant_drift_run.png").exists()


def test_run_missing_scenario_exits_3(tmp_path):
    proc = run_cli(["run", "missing.scn"], tmp_path)
    assert proc.returncode == 3
    assert "error:" in proc.stderr


def test_run_bad_pair_exits_3(tmp_path):
    proc = run_cli(["run", "graph_II_6", "--pair", "P,Z"], tmp_path)
    assert proc.returncode == 3
    assert "unknown entity" in proc.stderr


def test_conditions_subcommand(tmp_path):
    proc = run_cli(["conditions", "graph_II_9"], tmp_path)
    assert proc.returncode == 0
    assert "invariant-interval: [-4.0, 4.0]" in proc.stdout
    assert "theorem-applies: True" in proc.stdout
    assert "witness-step: 1" in proc.stdout


def test_sweep_subcommand(tmp_path):
    proc = run_cli(["sweep", "graph_II_8", "--starts=-4:4:5", "--out", "swept"],
                   tmp_path)
    assert proc.returncode == 0
    assert "converged: 5" in proc.stdout
    assert "aligned-spread:" in proc.stdout

    csv_path = tmp_path / "swept" / "graph_II_8_sweep.csv"
    png_path = tmp_path / "swept" / "graph_II_8_sweep.png"
    assert csv_path.exists()
    assert png_path.exists() and png_path.stat().st_size > 0
    with open(csv_path, newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["start", "status", "iterations", "u_1", "u_2"]
    assert len(rows) == 6
    for row in rows[1:]:
        assert abs(float(row[3]) - 20.0 / 7.0) < 1e-6


def test_sweep_bad_range_exits_3(tmp_path):
    proc = run_cli(["sweep", "graph_II_8", "--starts", "1:2"], tmp_path)
    assert proc.returncode == 3
    proc = run_cli(["sweep", "graph_II_8", "--starts", "1:2:0"], tmp_path)
    assert proc.returncode == 3


def test_verify_scenario_file(tmp_path):
    proc = run_cli(["verify", "graph_II_7"], tmp_path)
    assert proc.returncode == 0
    assert proc.stdout.startswith("suite: graph_II_7")
    assert "summary:" in proc.stdout
    assert "FAIL" not in proc.stdout


def test_verify_divergent_scenario_exits_4(tmp_path):
    proc = run_cli(["verify", "constant_drift"], tmp_path)
    assert proc.returncode == 4
    assert "FAIL" in proc.stdout


def test_verify_negative_controls_suite(tmp_path):
    proc = run_cli(["verify", "--suite", "negative-controls", "--seed", "1"],
                   tmp_path)
    assert proc.returncode == 0
    assert "summary: 6/6 passed" in proc.stdout


def test_verify_random_suite_small_count(tmp_path):
    proc = run_cli(["verify", "--suite", "random", "--seed", "5",
                    "--count", "50"], tmp_path)
    assert proc.returncode == 0
    assert "50/50 scenarios converged" in proc.stdout


def test_verify_rejects_conflicting_targets(tmp_path):
    proc = run_cli(["verify", "graph_II_5", "--suite", "random"], tmp_path)
    assert proc.returncode == 3
    proc = run_cli(["verify"], tmp_path)
    assert proc.returncode == 3


def test_verify_writes_report_file(tmp_path):
    proc = run_cli(["verify", "--suite", "negative-controls", "--out", "rep"],
                   tmp_path)
    assert proc.returncode == 0
    saved = (tmp_path / "rep" / "negative-controls_report.txt").read_text()
    assert saved == proc.stdout


def test_verify_paper_graphs_deterministic(tmp_path):
    first = run_cli(["verify", "--suite", "paper-graphs", "--seed", "7"], tmp_path)
    second = run_cli(["verify", "--suite", "paper-graphs", "--seed", "7"], tmp_path)
    assert first.returncode == 0
    assert second.returncode == 0
    assert first.stdout == second.stdout
    assert first.stdout.encode() == second.stdout.encode()
