import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))

from backend.cli import EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_OK, main, parse_schedule
from backend.core.dynamics import forward_estimate
from backend.core.settings import reset_settings
from backend.domain import SocialSystem
from backend.exporters import write_estimation

SYSTEM = {
    "n": 2,
    "W": [[0.3, 0.2], [0.1, 0.4]],
    "s": [0.5, -0.2],
    "eps": [0.05, 0.05],
    "eta": [0.03, 0.03],
    "chi": [0.0, 0.0],
    "noise": {"seed": 11},
}


@pytest.fixture()
def system_file(tmp_path):
    path = tmp_path / "system.json"
    path.write_text(json.dumps(SYSTEM), encoding="utf-8")
    return path


def last_json(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def test_parse_schedule():
    assert parse_schedule("-1:30,1:40").segments == [(-1, 30), (1, 40)]


def test_simulate_estimate_infer_validate(tmp_path, system_file, capsys):
    traj = tmp_path / "traj.csv"
    assert main(["simulate", "--system", str(system_file), "--schedule=-1:8,1:8", "--out", str(traj)]) == EXIT_OK
    assert last_json(capsys)["steps"] == 16

    est = tmp_path / "estimation.json"
    assert main(["estimate", "--trajectory", str(traj), "--out", str(est)]) == EXIT_OK
    capsys.readouterr()
    assert json.loads(est.read_text(encoding="utf-8"))["provenance"]["source"] == "traj.csv"

    inferred = tmp_path / "inference.json"
    assert main(["infer", "--estimation", str(est), "--out", str(inferred)]) == EXIT_OK
    body = last_json(capsys)
    assert body["ok"] == [0, 1]
    rows = json.loads(inferred.read_text(encoding="utf-8"))["rows"]
    assert rows[1]["W"] == pytest.approx([0.1, 0.4], abs=1e-6)
    assert rows[1]["s"] == pytest.approx(-0.2, abs=1e-6)

    code = main(["validate", "--estimation", str(est), "--horizon", "20", "--initial-conditions", "50", "--seed", "1"])
    assert code == EXIT_OK
    assert last_json(capsys)["passed"] is True


def test_feasibility_exit_codes(tmp_path, system_file, capsys):
    assert main(["feasibility", "--system", str(system_file)]) == EXIT_OK
    assert last_json(capsys)["passed"] is True

    heavy = tmp_path / "heavy.json"
    heavy.write_text(json.dumps(dict(SYSTEM, W=[[0.45, 0.45], [0.1, 0.4]], eps=[0.1, 0.05])), encoding="utf-8")
    assert main(["feasibility", "--system", str(heavy)]) == EXIT_CHECK_FAILED
    assert last_json(capsys)["violations"][0]["index"] == 0


def test_dwell_commands(tmp_path, capsys):
    out = tmp_path / "dwell.json"
    args = ["dwell", "--n", "2", "--phi", "6", "--delta", "0.5", "--sigma-p", "0", "--out", str(out)]
    assert main(args) == EXIT_OK
    assert last_json(capsys)["tau"] == 27
    assert json.loads(out.read_text(encoding="utf-8"))["p"] == 27

    assert main(["dwell", "--n", "2", "--phi", "6", "--delta", "0.5", "--sigma-p", "0", "--p", "26"]) == EXIT_CHECK_FAILED
    assert last_json(capsys)["excitation"] is False

    assert main(["dwell", "--n", "2", "--phi", "6", "--delta", "0.5", "--sigma-p", "0", "--cap", "10"]) == EXIT_CHECK_FAILED
    assert last_json(capsys)["reachable"] is False

    assert main(["dwell", "--windows", "1", "28", "29", "69", "--require", "excitation"]) == EXIT_OK
    assert last_json(capsys)["n_max"] == 17
    assert main(["dwell", "--windows", "1", "28", "29", "69"]) == EXIT_OK
    assert last_json(capsys)["n_max"] == 0


def test_invalid_input_exit_code(tmp_path, capsys):
    assert main(["dwell", "--n", "18"]) == EXIT_INPUT
    assert main(["dwell", "--n", "2", "--delta", "3"]) == EXIT_INPUT
    assert main(["dwell"]) == EXIT_INPUT
    assert main(["estimate", "--trajectory", str(tmp_path / "absent.csv"), "--out", str(tmp_path / "e.json")]) == EXIT_INPUT
    assert "[error]" in capsys.readouterr().err


def test_ingest_and_predict(tmp_path, capsys):
    congresses = list(range(1, 25))
    parties = ["R" if (c // 4) % 2 == 0 else "D" for c in congresses]
    rng = np.random.default_rng(8)
    rows = [
        {"congress": c, "chamber": "Senate", "state_abbrev": unit, "nokken_poole_dim1": float(rng.uniform(-0.6, 0.6))}
        for unit in ("AL", "AK")
        for c in congresses
    ]
    members = tmp_path / "members.csv"
    presidents = tmp_path / "presidents.csv"
    pd.DataFrame(rows).to_csv(members, index=False)
    pd.DataFrame({"congress": congresses, "party": parties}).to_csv(presidents, index=False)

    panel_out = tmp_path / "panel.csv"
    common = ["--members", str(members), "--presidents", str(presidents)]
    assert main(["ingest", *common, "--out", str(panel_out)]) == EXIT_OK
    assert last_json(capsys)["units"] == ["AK", "AL"]
    assert panel_out.read_text(encoding="utf-8").startswith("unit,congress,value,regime")

    out_dir = tmp_path / "predict"
    code = main(["predict", *common, "--fit", "1", "20", "--horizon", "21", "24", "--out-dir", str(out_dir)])
    assert code == EXIT_OK
    body = last_json(capsys)
    assert body["units"] == ["AK", "AL"]
    assert (out_dir / "prediction_errors.csv").exists()
    assert (out_dir / "switching_estimation.json").exists()


def test_roundtrip_and_pac(capsys):
    assert main(["roundtrip", "--n", "3", "--seed", "2"]) == EXIT_OK
    assert last_json(capsys)["max_error"] <= 1e-6

    args = ["pac", "--n", "2", "--trials", "10", "--seed", "3", "--phi", "1e6", "--delta", "0.1", "--sigma-p", "0"]
    assert main(args) == EXIT_CHECK_FAILED
    body = last_json(capsys)
    assert body["tau_minus"] == 13
    assert body["success"] == {"+1": 1.0, "-1": 1.0}
    assert body["certified"] is False


@pytest.fixture()
def harness_file(tmp_path, monkeypatch):
    path = tmp_path / "harness.yaml"
    path.write_text("dwell_cap: 10\ntol_s: 10.0\nchamber: House\n", encoding="utf-8")
    monkeypatch.setenv("SOCINFER_HARNESS_CONFIG", str(path))
    reset_settings()
    yield path
    reset_settings()


def test_harness_config_from_environment(tmp_path, harness_file, capsys):
    assert main(["dwell", "--n", "2", "--phi", "6", "--delta", "0.5", "--sigma-p", "0"]) == EXIT_CHECK_FAILED
    assert last_json(capsys)["reachable"] is False

    system = SocialSystem(W=SYSTEM["W"], s=SYSTEM["s"], eps=SYSTEM["eps"], eta=SYSTEM["eta"], chi=SYSTEM["chi"])
    est = write_estimation(tmp_path / "estimation.json", forward_estimate(system))
    assert main(["infer", "--estimation", str(est), "--out", str(tmp_path / "inference.json")]) == EXIT_OK
    body = last_json(capsys)
    assert body["flagged"] == [0, 1]
    assert body["ok"] == []

    rows = [
        {"congress": c, "chamber": chamber, "state_abbrev": unit, "nokken_poole_dim1": 0.1}
        for unit, chamber in (("AL", "House"), ("AK", "Senate"))
        for c in range(1, 7)
    ]
    members = tmp_path / "members.csv"
    presidents = tmp_path / "presidents.csv"
    pd.DataFrame(rows).to_csv(members, index=False)
    pd.DataFrame({"congress": range(1, 7), "party": ["R", "R", "R", "D", "D", "D"]}).to_csv(presidents, index=False)
    common = ["--members", str(members), "--presidents", str(presidents), "--out", str(tmp_path / "panel.csv")]
    assert main(["ingest", *common]) == EXIT_OK
    assert last_json(capsys)["units"] == ["AL"]
    assert main(["ingest", *common, "--chamber", "Senate"]) == EXIT_OK
    assert last_json(capsys)["units"] == ["AK"]


def test_missing_harness_config_is_an_input_error(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SOCINFER_HARNESS_CONFIG", str(tmp_path / "absent.yaml"))
    reset_settings()
    try:
        assert main(["dwell", "--n", "2"]) == EXIT_INPUT
    finally:
        reset_settings()
    assert "config file not found" in capsys.readouterr().err


def test_out_of_domain_system_file_is_rejected(tmp_path, capsys):
    for field, value in (("s", [2.0, -0.2]), ("eps", [-0.3, 0.05]), ("eta", [0.03, -0.1]), ("chi", [-0.05, 0.0])):
        path = tmp_path / f"bad_{field}.json"
        path.write_text(json.dumps(dict(SYSTEM, **{field: value})), encoding="utf-8")
        assert main(["feasibility", "--system", str(path)]) == EXIT_INPUT
        assert main(["simulate", "--system", str(path), "--schedule=1:5", "--out", str(tmp_path / "t.csv")]) == EXIT_INPUT
    assert "[error]" in capsys.readouterr().err
