import json
import math

import pytest
from fastapi.testclient import TestClient

from hugkit.main import app
from hugkit.services.oracle_service import cross_polytope_config
from hugkit.services.persistence_service import state_to_document

client = TestClient(app)

API = "/api/v1"


class TestHealth:
    def test_status(self):
        response = client.get(f"{API}/health")
        assert response.status_code == 200
        assert response.json()["status"] == "healthy"
        assert "X-Request-ID" in response.headers
        assert response.headers["X-Response-Time"].endswith("ms")

    def test_liveness(self):
        assert client.get(f"{API}/health/live").json()["status"] == "alive"

    def test_request_id_is_echoed(self):
        response = client.get(f"{API}/health/live", headers={"X-Request-ID": "abc123"})
        assert response.headers["X-Request-ID"] == "abc123"


class TestEnergy:
    def test_optimize(self):
        response = client.post(f"{API}/energy/optimize", json={"n": 3, "d": 2, "restarts": 1})
        assert response.status_code == 200
        body = response.json()
        assert body["energy"] == pytest.approx(2.0, abs=1e-8)
        assert len(body["points"]) == 3

    def test_optimize_validation(self):
        response = client.post(f"{API}/energy/optimize", json={"n": 1, "d": 2})
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "VALIDATION_ERROR"

    def test_evaluate(self):
        points = cross_polytope_config(3).points.tolist()
        response = client.post(f"{API}/energy/evaluate", json={"points": points, "s": 2.0, "epsilon": 1.0})
        assert response.status_code == 200
        body = response.json()
        assert body["riesz_energy"] == pytest.approx(13.5)
        assert body["separation"] == pytest.approx(math.sqrt(2.0))
        assert body["separation_pair"] == [0, 2]
        assert body["log_det_gram"] is not None

    def test_evaluate_off_sphere(self):
        response = client.post(f"{API}/energy/evaluate", json={"points": [[1.0, 1.0], [0.0, 1.0]]})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "INVALID_INPUT"

    def test_evaluate_coincident(self):
        response = client.post(f"{API}/energy/evaluate", json={"points": [[1.0, 0.0], [1.0, 0.0]]})
        assert response.status_code == 422
        error = response.json()["error"]
        assert error["code"] == "COINCIDENT_POINTS"
        assert (error["details"]["i"], error["details"]["j"]) == (0, 1)

    def test_evaluate_nearly_coincident_with_negative_exponent(self):
        points = [[1.0, 0.0], [1.0, 1e-13]]
        response = client.post(f"{API}/energy/evaluate", json={"points": points, "s": -1.0})
        assert response.status_code == 200
        body = response.json()
        assert body["log_energy"] is None
        assert body["riesz_energy"] == pytest.approx(0.0, abs=1e-20)
        assert body["separation"] == pytest.approx(1e-13)


class TestDiagnostics:
    def test_report(self, collapsed_state):
        document = json.loads(state_to_document(collapsed_state).model_dump_json())
        response = client.post(f"{API}/diagnostics", json=document)
        assert response.status_code == 200
        assert response.json()["acme"] == pytest.approx(1.0 / 3.0)

    def test_schema_version_mismatch(self, collapsed_state):
        document = json.loads(state_to_document(collapsed_state).model_dump_json())
        document["schema_version"] = 2
        response = client.post(f"{API}/diagnostics", json=document)
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "SCHEMA_VERSION_MISMATCH"


class TestVerify:
    def test_suite(self):
        response = client.post(f"{API}/verify/mhs_limit")
        assert response.status_code == 200
        assert response.json()["passed"] is True

    def test_unknown_suite(self):
        response = client.post(f"{API}/verify/unknown")
        assert response.status_code == 404
        assert response.json()["error"]["code"] == "NOT_FOUND"

    def test_unknown_route(self):
        response = client.get(f"{API}/nowhere")
        assert response.status_code == 404
        assert response.json()["success"] is False
