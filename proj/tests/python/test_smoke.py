import json
import os
import subprocess

import numpy as np
import pytest

import safeforce


def test_presets_listed():
    names = safeforce.presets()
    assert "exp1-above" in names
    assert len(names) == 7
    doc = json.loads(safeforce.preset_json("exp2"))
    assert doc["name"] == "exp2-below"


def test_simulate_preset():
    r = safeforce.simulate("exp1")
    assert r["audit"]["pass"]
    assert r["q"].shape == (len(r["t"]), 6)
    assert abs(r["F"][-1] - r["F_d"]) < 0.1
    assert np.all(r["B"] >= -1e-9)
    assert np.all(np.diff(r["V_F"]) <= 1e-7)


def test_recovery_from_below():
    r = safeforce.simulate("exp2")
    assert r["B"][0] < 0
    first = int(np.argmax(r["B"] >= 0))
    assert r["t"][first] <= 10.0
    assert r["B"][first:].min() >= -1e-9


def test_scenario_json_and_dt_override():
    doc = json.loads(safeforce.preset_json("exp4"))
    doc["F_d"] = -2
    doc["duration"] = 5
    r = safeforce.simulate(json.dumps(doc), dt=1 / 120)
    assert r["dt"] == pytest.approx(1 / 120)
    assert len(r["t"]) == 601
    assert r["csv"].startswith("# name=")


def test_control_at_solved_task():
    doc = safeforce.preset_json("exp1")
    q = np.array([0.0, 0.0, 0.0, 0.0, 0.5, -0.5])
    pos, _ = safeforce.forward_kinematics(q, doc)
    q[:3] += np.array([0.0, 0.0, -0.01]) - pos
    c = safeforce.control(q, doc)
    assert c["feasible"]
    assert np.linalg.norm(c["u"]) <= 1e-8
    assert c["equilibrium"] == "near-success"


def test_config_errors_carry_path():
    doc = json.loads(safeforce.preset_json("exp1"))
    doc["limits"] = {"K_L": "fast"}
    with pytest.raises(safeforce.ConfigError, match="limits.K_L"):
        safeforce.simulate(json.dumps(doc))


@pytest.mark.skipif("SAFEFORCE_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_matches_module(tmp_path):
    out = tmp_path / "run"
    p = subprocess.run([os.environ["SAFEFORCE_CLI"], "run", "--preset", "exp3", "--out", str(out)],
                       capture_output=True, text=True)
    assert p.returncode == 0, p.stderr
    r = safeforce.simulate("exp3")
    assert (out / "trajectory.csv").read_text() == r["csv"]
