"""HTTP service: endpoints, error codes, schema conformance."""

import base64
import json
import sys
import time

import jsonschema
import pytest
from fastapi.testclient import TestClient

from verifuzz.service import SCHEMA_PATH, create_app, generate_schema

from conftest import ALL_BUGS


def wait_until(fn, timeout=30.0, poll=0.2):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        value = fn()
        if value:
            return value
        time.sleep(poll)
    raise AssertionError("condition not reached in time")


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "root")
    with TestClient(app) as c:
        yield c


def start_body(bugs=ALL_BUGS, **kw):
    body = {
        "strategy": "grammar",
        "target_cmd": f"{sys.executable} -m verifuzz.toyverifier.cli {{input}} --bugs {bugs}",
        "time_budget": 30.0,
        "master_seed": 2,
        "workers": 1,
        "grammar_path": "minipvl",
        "max_executions": 40,
    }
    body.update(kw)
    return body


def validate_against_schema(instance, schema_name):
    doc = json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))
    # Embedding components at the schema root lets the internal
    # "#/components/schemas/..." refs resolve without a custom resolver.
    schema = {**doc["components"]["schemas"][schema_name], "components": doc["components"]}
    jsonschema.validate(instance, schema)


class TestEmptyRoot:
    def test_empty_campaign_list(self, client):
        r = client.get("/api/campaigns")
        assert r.status_code == 200
        assert r.json() == {"campaigns": []}

    def test_unknown_campaign_404(self, client):
        assert client.get("/api/campaigns/nope").status_code == 404
        assert client.get("/api/campaigns/nope/coverage").status_code == 404
        assert client.get("/api/campaigns/nope/buckets").status_code == 404
        assert client.get("/api/buckets/nope/beef").status_code == 404

    def test_invalid_config_400(self, client):
        r = client.post("/api/campaigns", json={"strategy": "grammar", "target_cmd": "x {input}"})
        assert r.status_code == 400  # grammar strategy without grammar_path


class TestLifecycle:
    def test_full_flow(self, client):
        r = client.post("/api/campaigns", json=start_body())
        assert r.status_code == 200
        cid = r.json()["id"]

        stats = wait_until(
            lambda: (s := client.get(f"/api/campaigns/{cid}").json())["executions"] > 0 and s
        )
        assert stats["strategy"] == "grammar"
        validate_against_schema(stats, "StatsResponse")

        wait_until(lambda: client.get(f"/api/campaigns/{cid}").json()["status"] != "running")
        stats = client.get(f"/api/campaigns/{cid}").json()
        assert stats["executions"] == 40

        cov = client.get(f"/api/campaigns/{cid}/coverage").json()
        assert cov and all(
            cov[i]["covered"] <= cov[i + 1]["covered"] for i in range(len(cov) - 1)
        )

        listed = client.get("/api/campaigns").json()["campaigns"]
        assert [c["id"] for c in listed] == [cid]
        validate_against_schema(listed[0], "CampaignSummary")

        buckets = client.get(f"/api/campaigns/{cid}/buckets").json()
        assert buckets, "40 all-bugs executions should produce at least one bucket"
        validate_against_schema(buckets[0], "BucketSummary")
        h = buckets[0]["bucket_hash"]

        detail = client.get(f"/api/buckets/{cid}/{h}").json()
        validate_against_schema(detail, "BucketDetail")
        assert base64.b64decode(detail["input_b64"])
        assert detail["trace_text"]

        r = client.post(f"/api/buckets/{cid}/{h}/triage", json={"state": "confirmed"})
        assert r.status_code == 200 and r.json()["triage_state"] == "confirmed"
        r = client.post(f"/api/buckets/{cid}/{h}/triage", json={"state": "confirmed"})
        assert r.status_code == 200  # idempotent
        assert client.post(
            f"/api/buckets/{cid}/{h}/triage", json={"state": "bogus"}
        ).status_code == 400
        assert client.post(
            f"/api/buckets/{cid}/beef/triage", json={"state": "confirmed"}
        ).status_code == 404

    def test_stop_running_then_conflict(self, client):
        body = start_body(time_budget=60.0, max_executions=None)
        cid = client.post("/api/campaigns", json=body).json()["id"]
        wait_until(lambda: client.get(f"/api/campaigns/{cid}").json()["executions"] > 0)
        assert client.post(f"/api/campaigns/{cid}/stop").status_code == 200
        assert client.get(f"/api/campaigns/{cid}").json()["status"] == "stopped"
        assert client.post(f"/api/campaigns/{cid}/stop").status_code == 409

    def test_minimize_endpoint(self, client):
        cid = client.post(
            "/api/campaigns", json=start_body(bugs="B1", max_executions=None, max_buckets=1)
        ).json()["id"]
        wait_until(lambda: client.get(f"/api/campaigns/{cid}").json()["status"] != "running")
        buckets = client.get(f"/api/campaigns/{cid}/buckets").json()
        assert len(buckets) == 1
        h = buckets[0]["bucket_hash"]
        r = client.post(
            f"/api/buckets/{cid}/{h}/minimize",
            json={"granularity": "token", "budget": 500},
        )
        assert r.status_code == 200, r.text
        info = r.json()
        validate_against_schema(info, "MinimizeResponse")
        minimized = base64.b64decode(info["minimized_b64"])
        assert b"enum" in minimized and b"{" in minimized
        detail = client.get(f"/api/buckets/{cid}/{h}").json()
        assert detail["minimized_b64"] == info["minimized_b64"]


class TestSchemaFile:
    def test_shipped_schema_matches_app(self):
        shipped = json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))
        assert shipped == generate_schema()

    def test_documents_all_api_paths(self):
        doc = json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))
        expected = {
            "/api/campaigns",
            "/api/campaigns/{campaign_id}",
            "/api/campaigns/{campaign_id}/stop",
            "/api/campaigns/{campaign_id}/coverage",
            "/api/campaigns/{campaign_id}/buckets",
            "/api/buckets/{campaign_id}/{bucket_hash}",
            "/api/buckets/{campaign_id}/{bucket_hash}/triage",
            "/api/buckets/{campaign_id}/{bucket_hash}/minimize",
        }
        assert expected <= set(doc["paths"])
