import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from monitored_code import cli
from monitored_code.dual_code import DualCode

SCHEDULES = Path(__file__).resolve().parent.parent / "demos" / "schedules"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_json_and_csv(capsys):
    code, out, _ = run(capsys, "analyze", "--schedule", SCHEDULES / "three_qubit_noncommuting.txt", "--subsystem", "0")
    assert code == 0
    rec = json.loads(out)
    assert rec["recoverable"] is False
    assert {"S_A", "S_AB", "S_A_given_B", "I_AB", "g", "g_A", "g_B"} <= set(rec)
    code, out, _ = run(capsys, "--format", "csv", "analyze", "--schedule", SCHEDULES / "three_qubit_noncommuting.txt",
                       "--subsystem", "0")
    header, row = out.strip().splitlines()
    assert code == 0 and "S_A" in header.split(",")


def test_recoverable_example_via_cli(capsys):
    code, out, _ = run(capsys, "analyze", "--schedule", SCHEDULES / "three_qubit_recoverable.txt", "--subsystem", "0")
    assert code == 0 and json.loads(out)["recoverable"] is True


def test_groups_text_and_json(capsys):
    code, out, _ = run(capsys, "groups", "--schedule", SCHEDULES / "logical_pair.txt")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "[stabilizer]" and "[logical]" in lines and "[logical_nontrivial_pairs]" in lines
    code, out, _ = run(capsys, "groups", "--schedule", SCHEDULES / "logical_pair.txt", "--format", "json")
    obj = json.loads(out)
    assert len(obj["logical_nontrivial_pairs"]) == 1
    assert len(obj["stabilizer"]) == 2


def test_distill_records_are_seeded(capsys):
    argv = ("distill", "--schedule", SCHEDULES / "bell_pair.txt", "--subsystem", "0", "--runs", "3", "--seed", "4")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    recs = [json.loads(line) for line in a.splitlines()]
    assert len(recs) == 3
    assert set(recs[0]) == {"m", "m_bar", "s", "feedback", "fidelity_log2", "seed"}


def test_distill_exhaustive_weights_sum_to_one(capsys):
    code, out, _ = run(capsys, "distill", "--schedule", SCHEDULES / "three_qubit_noncommuting.txt", "--exhaustive")
    recs = [json.loads(line) for line in out.splitlines()]
    assert code == 0
    assert sum(2.0 ** r["log2_weight"] for r in recs) == pytest.approx(1)


@pytest.mark.parametrize("mode", ["sysref", "gh"])
def test_distill_other_modes(capsys, mode):
    code, out, _ = run(capsys, "distill", "--schedule", SCHEDULES / "three_qubit_recoverable.txt", "--mode", mode)
    assert code == 0 and json.loads(out)


def test_sweep_is_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run(capsys, "sweep", "--n", "8", "--p", "0.1:0.3:0.1", "--samples", "2", "--seed", "3",
                   "--out", p)[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    lines = paths[0].read_text().splitlines()
    assert lines[0] == "n,p,sample,seed,S_half,S_R,tau,depth,spec_hash"
    assert len(lines) == 1 + 3 * 2


def test_profile_and_fit(tmp_path, capsys):
    code, out, _ = run(capsys, "profile", "--n", "8", "--p", "0.2", "--samples", "2")
    assert code == 0
    assert out.splitlines()[0] == "sample,seed,L,I_AR,g_A,I_AB,d_code"
    data = tmp_path / "s.csv"
    data.write_text("L,S\n" + "".join(f"{L},{0.5 * L + L ** 0.5}\n" for L in range(2, 20)))
    code, out, _ = run(capsys, "fit", "--input", data)
    assert code == 0 and json.loads(out)["gamma"] == pytest.approx(0.5, abs=1e-3)


def test_verify_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "structure", "--trials", "5")
    assert code == 0
    assert [json.loads(line)["check"] for line in out.splitlines()] == ["commutant", "recursion",
                                                                         "cleaning", "flatness"]


def test_verify_failure_exits_2(capsys, monkeypatch):
    monkeypatch.setattr(DualCode, "recoverable", lambda self, region: False)
    code, out, _ = run(capsys, "verify", "--suite", "recoverability", "--trials", "200")
    assert code == 2
    assert json.loads(out)["passed"] is False


@pytest.mark.parametrize("argv", [
    ("analyze", "--schedule", "/nonexistent.txt", "--subsystem", "0"),
    ("analyze", "--schedule", SCHEDULES / "three_qubit_recoverable.txt", "--subsystem", "7"),
    ("sweep", "--n", "8", "--p", "1.5"),
    ("fit", "--input", "/nonexistent.csv"),
    ("verify", "--suite", "nope"),
    ("bogus",),
])
def test_input_errors_exit_1(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_malformed_schedule_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("n=2\n+XQ\n")
    code, _, err = run(capsys, "analyze", "--schedule", bad, "--subsystem", "0")
    assert code == 1 and "line 2" in err


def test_too_few_points_exit_1(tmp_path, capsys):
    data = tmp_path / "s.csv"
    data.write_text("L,S\n1,1\n2,2\n")
    assert run(capsys, "fit", "--input", data)[0] == 1


@pytest.mark.skipif(shutil.which("monitored-code") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["monitored-code", "groups", "--schedule", str(SCHEDULES / "bell_pair.txt")],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("[stabilizer]")
    mod = subprocess.run([sys.executable, "-m", "monitored_code", "bogus"], capture_output=True)
    assert mod.returncode == 1


def test_recoverable_example_has_negative_conditional_entropy(capsys):
    code, out, _ = run(capsys, "analyze", "--schedule", SCHEDULES / "three_qubit_recoverable.txt", "--subsystem", "0")
    assert json.loads(out)["S_A_given_B"] == -1


def test_verify_lemmas_up_to_four_qubits(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "lemmas", "--n-max", "4", "--trials", "5")
    recs = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(recs) == 9
    assert all(r["passed"] and r["count"] > 0 for r in recs)
