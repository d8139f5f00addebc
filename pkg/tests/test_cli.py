import csv
import json
from pathlib import Path

import pytest

from qgaudin.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(tmp_path, *args):
    out = tmp_path / "report.json"
    code = main([*args, "--out", str(out), "--no-timings"])
    data = json.loads(out.read_text()) if out.exists() else None
    return code, data


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


@pytest.mark.parametrize("name", ["rational_n3", "qdeformed_n3", "hyperbolic_n3", "trigonometric_n3"])
def test_verify_configs_pass(tmp_path, name):
    code, data = run(tmp_path, "verify", "--config", str(CONFIGS / f"{name}.json"))
    assert code == 0, [e for e in data["entries"] if not e["passed"]]
    assert data["passed"]
    assert all(e["anchor"] for e in data["entries"])


def test_duplicate_u_exit_2(tmp_path, capsys):
    cfg = write(tmp_path, {"system": {"spins": [0.5, 0.5], "u": [0.25, 0.25]}, "family": "rational"})
    assert main(["verify", "--config", cfg]) == 2
    assert "0.25" in capsys.readouterr().err


def test_q_zero_exit_2(tmp_path, capsys):
    cfg = write(tmp_path, {"system": {"spins": [0.5, 0.5], "u": [0, 1]}, "family": {"tag": "q-deformed", "param": 0}})
    assert main(["verify", "--config", cfg]) == 2
    assert "rational" in capsys.readouterr().err


def test_n_too_large_exit_2(tmp_path):
    cfg = write(tmp_path, {"system": {"spins": [0.5, 0.5], "u": [0, 1]}, "family": "rational", "n": 3})
    assert main(["bethe", "--config", cfg]) == 2


def test_missing_file_exit_2(tmp_path):
    assert main(["verify", "--config", str(tmp_path / "absent.json")]) == 2


def test_identity_failure_exit_1(tmp_path):
    # an impossible tolerance turns a passing identity into a reported failure
    cfg = write(tmp_path, {"system": {"spins": [0.5, 0.5], "u": [0, 1]}, "family": "rational",
                           "tolerances": {"gaudin_equation": 1e-300}})
    code, data = run(tmp_path, "verify", "--config", cfg)
    assert code == 1
    assert not data["passed"]


def test_bethe_demo(tmp_path):
    code, data = run(tmp_path, "bethe", "--config", str(CONFIGS / "bethe_rational_n2.json"))
    assert code == 0
    rows = data["tables"]["solutions"]
    assert len(rows) == 1
    assert abs(rows[0]["roots"][0]["re"] - 0.5) < 1e-10
    assert rows[0]["overlap"] > 1 - 1e-6


def test_bethe_no_solutions_is_clean(tmp_path):
    cfg = write(tmp_path, {"system": {"spins": [0.5, 0.5], "u": [0, 1]}, "family": "rational", "n": 2})
    code, data = run(tmp_path, "bethe", "--config", cfg)
    assert code == 0
    assert data["tables"]["solutions"] == []
    assert data["metadata"]["diagnostics"]["starts"] > 0


def test_nogo(tmp_path):
    code, data = run(tmp_path, "nogo", "--config", str(CONFIGS / "nogo.json"), "--csv", str(tmp_path / "nogo.csv"))
    assert code == 0
    rows = data["tables"]["nogo"]
    zero = [r for r in rows if r["q"] == 0.0][0]
    assert zero["residual"] < 1e-10
    for r in rows:
        if r["q"] != 0.0:
            assert r["residual"] > 0.1 * abs(r["q"])
            assert abs(r["r23_gap"]["re"] - 2 * r["q"]) < 1e-10
    with open(tmp_path / "nogo.csv") as fh:
        assert len(list(csv.DictReader(fh))) == len(rows)


def test_nogo_requires_q_family(tmp_path):
    assert main(["nogo", "--config", str(CONFIGS / "rational_n3.json")]) == 2


def test_sweep_and_spectrum(tmp_path):
    code, data = run(tmp_path, "sweep", "--config", str(CONFIGS / "sweep_q.json"))
    assert code == 0
    assert data["tables"]["sweep"]
    code, data = run(tmp_path, "spectrum", "--config", str(CONFIGS / "rational_n3.json"))
    assert code == 0
    assert len(data["tables"]["joint"]) == data["metadata"]["system"]["dim"]


def test_seed_override_changes_nothing_structural(tmp_path):
    a = run(tmp_path, "verify", "--config", str(CONFIGS / "rational_n3.json"), "--seed", "3")[1]
    b = run(tmp_path, "verify", "--config", str(CONFIGS / "rational_n3.json"), "--seed", "3")[1]
    assert a == b
    assert a["metadata"]["seed"] == 3
