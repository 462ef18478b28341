import json
from pathlib import Path

from click.testing import CliRunner

from pastlogic.cli import main

PROOFS = Path(__file__).resolve().parent.parent / "proofs"


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_bug2_json_and_figures(tmp_path):
    r = run("--json", "--plot-dir", tmp_path, "bugs", "--id", "2")
    assert r.exit_code == 0, r.output
    doc = json.loads(r.output)
    status = {row["run"]: row["status"] for row in doc["runs"]}
    assert status == {"bug2/original": "violation", "bug2/feldman": "violation",
                      "bug2/fixed": "clean"}
    assert doc["bug2/original"]["verdict"]["orders"]
    assert all(Path(f).exists() for f in doc["figures"])
    assert (tmp_path / "bugs.png").exists()


def test_explore_counter_tab_output():
    r = run("explore", "--structure", "counter", "--threads", "3")
    assert r.exit_code == 0
    header, row = r.output.splitlines()[:2]
    assert header.split("\t")[:2] == ["run", "status"]
    assert row.split("\t")[1] == "clean"


def test_explore_budget_exit_code():
    r = run("explore", "--structure", "lolist", "--threads", "2", "--max-states", "50")
    assert r.exit_code == 2


def test_explore_rejects_too_many_threads():
    r = run("explore", "--structure", "counter", "--threads", "9")
    assert r.exit_code != 0 and "threads" in r.output


def test_invariants_fault_exit_code(tmp_path):
    r = run("--plot-dir", tmp_path, "invariants", "--threads", "2", "--fault", "nomark")
    assert r.exit_code == 1
    assert "snapshot" in r.output and (tmp_path / "invariants.png").exists()


def test_check_proof_expectations():
    assert run("check-proof", PROOFS / "skip.proof").exit_code == 0
    # the ordered lock/mark proof is expected to be refused
    r = run("--json", "check-proof", PROOFS / "lockmark_ordered.proof")
    assert r.exit_code == 0
    assert json.loads(r.output)["summary"]["ok"] is False


def test_discharge_modes():
    r = run("--json", "discharge", PROOFS / "lockmark.proof", "--mode", "bounded", "--depth", 5)
    assert r.exit_code == 0, r.output
    doc = json.loads(r.output)
    assert {h["mode"] for h in doc["hypotheses"]} == {"bounded"}


def test_missing_file():
    assert run("check-proof", "/nonexistent.proof").exit_code == 2


def test_lemmas_single_suite(tmp_path):
    r = run("--json", "--bound", 2, "--plot-dir", tmp_path, "lemmas", "--suite", "interplay")
    assert r.exit_code == 0
    doc = json.loads(r.output)
    assert doc["summary"]["ok"] and doc["laws"]
    assert (tmp_path / "lemmas.png").exists()
