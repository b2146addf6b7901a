import sys
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

sys.path.append(str(Path(__file__).resolve().parents[1]))

from backend.core.dynamics import sample_feasible_system
from backend.core.settings import reset_settings
from backend.workers import pooled_regime_segments

SYSTEM = {
    "n": 2,
    "W": [[0.3, 0.2], [0.1, 0.4]],
    "s": [0.5, -0.2],
    "eps": [0.05, 0.05],
    "eta": [0.03, 0.03],
    "chi": [0.0, 0.0],
}


@pytest.fixture()
def client(tmp_path, monkeypatch):
    monkeypatch.setenv("SOCINFER_LOGS_ROOT", str(tmp_path / "logs"))
    reset_settings()
    from backend.app import create_app

    yield TestClient(create_app())
    reset_settings()


def test_root(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["docs"] == "/docs"


def test_feasibility_endpoint(client):
    response = client.post("/api/systems/feasibility", json={"system": SYSTEM})
    assert response.status_code == 200
    body = response.json()
    assert body["passed"] is True
    assert body["rows"][0]["margin"] == pytest.approx(1 - 0.5 - 0.1 - 0.06)

    infeasible = dict(SYSTEM, W=[[0.45, 0.45], [0.1, 0.4]], eps=[0.1, 0.05], eta=[0.0, 0.03])
    body = client.post("/api/systems/feasibility", json={"system": infeasible}).json()
    assert body["passed"] is False
    assert body["rows"][0]["margin"] == pytest.approx(-0.1)


def test_regime_endpoint(client):
    response = client.post("/api/systems/regimes", json={"system": SYSTEM, "vartheta": 1})
    assert response.status_code == 200
    body = response.json()
    assert len(body["A"]) == 2
    assert client.post("/api/systems/regimes", json={"system": SYSTEM, "vartheta": 0}).status_code == 400
    assert client.post("/api/systems/regimes", json={"vartheta": 1}).status_code == 400


def test_simulation_endpoint_is_seeded(client):
    payload = {"system": SYSTEM, "schedule": [[-1, 3], [1, 4]], "seed": 7}
    first = client.post("/api/simulations", json=payload).json()
    second = client.post("/api/simulations", json=payload).json()
    assert first == second
    assert first["vartheta"] == [-1, -1, -1, 1, 1, 1, 1]
    assert client.post("/api/simulations", json=dict(payload, schedule=[[2, 3]])).status_code == 400
    assert client.post("/api/simulations", json=dict(payload, x1=[2.0, 0.0])).status_code == 400


def test_estimation_and_inference_endpoints(client):
    rng = np.random.default_rng(3)
    system = sample_feasible_system(2, rng, s_floor=0.05)
    segs = pooled_regime_segments(system, rng, length=8, starts=1)
    y = np.vstack([seg.ys for seg in segs]).tolist()
    labels = [seg.vartheta for seg in segs for _ in range(seg.length)]

    response = client.post("/api/estimations", json={"y": y, "vartheta": labels})
    assert response.status_code == 200
    estimation = response.json()
    assert estimation["layout"] == "row-major"

    inferred = client.post("/api/inferences", json={"estimation": estimation}).json()
    assert [row["status"] for row in inferred["rows"]] == ["ok", "ok"]
    assert inferred["rows"][0]["W"] == pytest.approx(system.W[0].tolist(), abs=1e-6)


def test_estimation_endpoint_rejects_bad_input(client):
    assert client.post("/api/estimations", json={"y": [[0.1]]}).status_code == 400
    short = {"y": [[0.1], [0.2], [0.3]], "vartheta": [1, 1, 1]}
    assert client.post("/api/estimations", json=short).status_code == 400
    assert client.post("/api/inferences", json={"estimation": {"n": 1}}).status_code == 400


def test_dwell_endpoint(client):
    payload = {"n": 2, "config": {"phi": 6.0, "delta": 0.5, "sigma_p": 0.0}}
    body = client.post("/api/dwell", json=payload).json()
    assert body["tau"] == 27
    assert body["reachable"] is True
    assert body["concentration_margin"] > 0

    assert client.post("/api/dwell", json={"n": 0}).status_code == 400
    assert client.post("/api/dwell", json={"n": 18}).status_code == 400
    assert client.post("/api/dwell", json={"n": 2, "config": {"delta": 2}}).status_code == 400


def test_network_size_endpoint(client):
    payload = {"windows": [[1, 28], [29, 69]], "require": ["excitation"]}
    body = client.post("/api/network-size", json=payload).json()
    assert body["n_max"] == 17
    assert body["passing"] == [17]
    assert client.post("/api/network-size", json={"windows": [[1, 28], [29, 69]]}).json()["n_max"] == 0
    assert client.post("/api/network-size", json={"windows": [[1, 28]]}).status_code == 400



def test_estimation_endpoint_rejects_unknown_labels(client):
    y = [[0.1], [0.2], [0.4], [0.3], [0.1], [0.0]]
    assert client.post("/api/estimations", json={"y": y, "vartheta": [1, 1, 1, 0, 0, 0]}).status_code == 400
    assert client.post("/api/estimations", json={"y": y, "vartheta": 1}).status_code == 400


def test_system_endpoints_reject_out_of_domain_parameters(client):
    for field, value in (("s", [2.0, -0.2]), ("eps", [-0.3, 0.05]), ("eta", [0.03, -0.1]), ("chi", [-0.05, 0.0])):
        system = dict(SYSTEM, **{field: value})
        assert client.post("/api/systems/feasibility", json={"system": system}).status_code == 400
        payload = {"system": system, "schedule": [[1, 5]], "seed": 1}
        assert client.post("/api/simulations", json=payload).status_code == 400


def test_endpoints_follow_harness_config(client, tmp_path, monkeypatch):
    path = tmp_path / "harness.yaml"
    path.write_text("dwell_cap: 10\ntol_s: 10.0\n", encoding="utf-8")
    monkeypatch.setenv("SOCINFER_HARNESS_CONFIG", str(path))
    reset_settings()

    payload = {"n": 2, "config": {"phi": 6.0, "delta": 0.5, "sigma_p": 0.0}}
    body = client.post("/api/dwell", json=payload).json()
    assert body["reachable"] is False
    assert client.post("/api/dwell", json=dict(payload, cap=100)).json()["tau"] == 27

    estimation = {
        "n": 1,
        "A_plus": [[0.525]],
        "A_minus": [[0.575]],
        "a_plus": [0.325],
        "a_minus": [0.025],
    }
    inferred = client.post("/api/inferences", json={"estimation": estimation}).json()
    assert inferred["rows"][0]["status"] == "neutral_bias_unrecoverable"
    inferred = client.post("/api/inferences", json={"estimation": estimation, "tol_s": 1e-6}).json()
    assert inferred["rows"][0]["status"] == "ok"
