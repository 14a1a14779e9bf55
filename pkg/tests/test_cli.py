import json
import subprocess
import sys
from pathlib import Path

import pytest

from cohconc.cli import main

DATA = Path(__file__).resolve().parents[1] / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_monotone_on_maximally_coherent(capsys):
    code, out, _ = run(capsys, "monotone", "--state", str(DATA / "plus3.json"),
                       "--measure", "coherence_k_concurrence", "--k", "2")
    payload = json.loads(out)
    assert code == 0 and payload["schema"] == 1
    assert payload["value"] == pytest.approx(1.0, abs=1e-12)


def test_multislit_two_slit_config(capsys):
    code, out, _ = run(capsys, "multislit", "--config", str(DATA / "twoslit.json"))
    assert code == 0
    assert json.loads(out)["d_q"] == pytest.approx(0.6, abs=1e-4)


def test_multislit_sweep_csv(capsys):
    code, out, _ = run(capsys, "--output", "csv", "multislit", "--config", str(DATA / "twoslit.json"),
                       "--sweep", "overlap:0.2:0.8:3")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "param,dq,l1_bound,bound1,bound2,slits" and len(lines) == 4


def test_verify_ordering(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "ordering", "--samples", "100", "--seed", "1")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and rep["seed"] == 1


def test_random_then_roof_and_convert(tmp_path, capsys):
    path = tmp_path / "r.json"
    assert run(capsys, "random", "--dim", "3", "--rank", "2", "--seed", "4", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "roof", "--state", str(path), "--measure", "coherence_k_concurrence",
                       "--k", "2", "--restarts", "2")
    est = json.loads(out)
    assert code == 0 and 0 < est["value"] <= 1
    code, out, _ = run(capsys, "roof", "--state", str(path), "--measure", "coherence_number", "--restarts", "2")
    assert code == 0 and json.loads(out)["coherence_number"] in (2, 3)
    code, out, _ = run(capsys, "convert", "--state", str(path), "--k", "2")
    assert code == 0 and json.loads(out)["delta"] <= 2e-4


def test_random_rank_one_is_pure(tmp_path, capsys):
    path = tmp_path / "p.json"
    run(capsys, "random", "--dim", "4", "--seed", "1", "--out", str(path))
    assert json.loads(path.read_text())["kind"] == "pure"


def test_quiet_prints_nothing(capsys):
    code, out, _ = run(capsys, "--quiet", "monotone", "--state", str(DATA / "plus3.json"), "--measure", "l1_coherence")
    assert code == 0 and out == ""


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["monotone", "--state", "missing.json", "--measure", "l1_coherence"],
    ["monotone", "--state", str(DATA / "plus3.json"), "--measure", "coherence_k_concurrence"],
    ["monotone", "--state", str(DATA / "plus3.json"), "--measure", "coherence_k_concurrence", "--k", "9"],
    ["multislit", "--config", str(DATA / "twoslit.json"), "--sweep", "overlap:a:b:3"],
    ["verify", "--samples", "0"],
    ["roof", "--state", str(DATA / "plus3.json"), "--measure", "l1_coherence"],
])
def test_input_errors_exit_2_with_one_line(argv, capsys):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert err.startswith("cohconc: error:") and err.count("\n") == 1


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err = run(capsys, "monotone", "--state", str(bad), "--measure", "l1_coherence")
    assert code == 2 and "malformed JSON" in err


def test_mixed_state_needs_roof(tmp_path, capsys):
    path = tmp_path / "m.json"
    run(capsys, "random", "--dim", "3", "--rank", "2", "--seed", "1", "--out", str(path))
    code, _, err = run(capsys, "monotone", "--state", str(path), "--measure", "qi_coherence_concurrence")
    assert code == 2 and "roof" in err


def test_console_entry_point_is_reproducible(tmp_path):
    argv = [sys.executable, "-m", "cohconc", "roof", "--state", str(DATA / "plus3.json"),
            "--measure", "qi_coherence_concurrence"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["value"] == pytest.approx(2.0)


def test_failed_suite_exits_1(monkeypatch, capsys):
    from cohconc import harness

    def failing(seed, samples):
        rep = harness.SuiteReport("ordering", tolerance=0.0)
        rep.record("seed=0/x/0", 1.0)
        return rep

    monkeypatch.setitem(harness.SUITES, "ordering", failing)
    code, out, _ = run(capsys, "verify", "--suite", "ordering")
    assert code == 1 and json.loads(out)["passed"] is False
