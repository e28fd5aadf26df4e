"""
HTTP surface through the FastAPI test client
"""

import sys
sys.path.append('.')

from fastapi.testclient import TestClient

from app.main import app

client = TestClient(app)


def test_health():
    """Health endpoint reports the configured precision"""
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "healthy"
    assert body["precision_bits"] >= 16


def test_router_test_endpoints():
    """Every router answers on /test"""
    for prefix in ("/api/norm", "/api/tree", "/api/params", "/api/gm"):
        response = client.get(f"{prefix}/test")
        assert response.status_code == 200
        assert response.json()["status"] == "ok"


def test_evaluate_norm():
    """POST /api/norm/evaluate returns certified enclosures"""
    response = client.post("/api/norm/evaluate", json={"vector": "1:1 2:1", "ell": 2})
    assert response.status_code == 200
    body = response.json()
    assert body["vector"] == "1:1/1 2:1/1"
    assert body["s_norm"]["lo"].startswith("1.26185950714")
    assert body["ell_norm"] is not None
    assert body["attainer"] == "2"


def test_evaluate_norm_rejects_bad_literal():
    """Parse errors surface as 400"""
    response = client.post("/api/norm/evaluate", json={"vector": "1:x"})
    assert response.status_code == 400


def test_flat_norm_range():
    """Flat vectors are limited to 64 coordinates"""
    assert client.get("/api/norm/flat/3").status_code == 200
    assert client.get("/api/norm/flat/65").status_code == 400


def test_tree_identities():
    """Identities for a small tree all pass"""
    response = client.post("/api/tree/identities", json={"tree": "(2:(3)(4))"})
    assert response.status_code == 200
    assert response.json()["verdict"] == "pass"


def test_tree_identities_needs_input():
    """Neither a tree nor a stream is a client error"""
    response = client.post("/api/tree/identities", json={})
    assert response.status_code == 400


def test_presets():
    """Both built-in systems are listed"""
    response = client.get("/api/params/presets")
    assert response.status_code == 200
    body = response.json()
    assert set(body) == {"toy", "honest"}
    assert body["toy"]["ks"] == [2, 4, 16]


def test_gm_sandwich():
    """Sandwich bounds for e_1 + e_2 on the toy system"""
    response = client.post("/api/gm/sandwich", json={"vector": "1:1 2:1", "depth": 1, "budget": 50})
    assert response.status_code == 200
    body = response.json()
    assert "lower" in body and "upper" in body


def test_gm_spreading_validation():
    """Start indices below 1 are rejected by the request model"""
    response = client.post("/api/gm/spreading", json={"lambdas": ["1", "-1/2"], "N_grid": [0]})
    assert response.status_code == 422
