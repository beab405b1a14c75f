"""Server half of the dashboard's end-to-end workflow, driven through the
same API sequence the browser UI performs: launch from the form, watch the
coverage chart advance across polls, inspect a bucket, record a triage
decision, run minimization, and cross-check the displayed covered count.

The browser-side rendering itself is covered by the frontend's vitest
suite (chart geometry, table sorting, form validation, API client).
"""

import base64
import sys
import time

import pytest
from fastapi.testclient import TestClient

from verifuzz.service import create_app

from conftest import ALL_BUGS


@pytest.fixture()
def client(tmp_path):
    with TestClient(create_app(tmp_path / "root")) as c:
        yield c


def test_dashboard_workflow(client):
    launch_form = {
        "strategy": "grammar",
        "target_cmd": (
            f"{sys.executable} -m verifuzz.toyverifier.cli {{input}} --bugs {ALL_BUGS}"
        ),
        "time_budget": 30.0,
        "master_seed": 4,
        "workers": 1,
        "grammar_path": "minipvl",
    }
    r = client.post("/api/campaigns", json=launch_form)
    assert r.status_code == 200
    cid = r.json()["id"]

    # The chart view polls every 2 s; the covered count must advance over
    # at least three polls while the campaign runs.
    samples = []
    for _ in range(10):
        time.sleep(2)
        cov = client.get(f"/api/campaigns/{cid}/coverage").json()
        samples.append(cov[-1]["covered"] if cov else 0)
        buckets = client.get(f"/api/campaigns/{cid}/buckets").json()
        if len(buckets) >= 1 and samples[-1] > 0 and len(samples) >= 4:
            break
    advances = sum(1 for a, b in zip(samples, samples[1:]) if b > a)
    assert advances >= 3, samples

    buckets = client.get(f"/api/campaigns/{cid}/buckets").json()
    assert len(buckets) >= 1

    # Snapshot consistency: the number the list view displays equals the
    # stats endpoint's covered count at the same instant.
    stats = client.get(f"/api/campaigns/{cid}").json()
    listed = {
        c["id"]: c for c in client.get("/api/campaigns").json()["campaigns"]
    }
    assert listed[cid]["covered"] == stats["covered"]
    assert listed[cid]["buckets_found"] == stats["buckets_found"]

    target = min(buckets, key=lambda b: b["first_seen"])
    h = target["bucket_hash"]
    r = client.post(f"/api/buckets/{cid}/{h}/triage", json={"state": "confirmed"})
    assert r.status_code == 200 and r.json()["triage_state"] == "confirmed"
    refreshed = client.get(f"/api/campaigns/{cid}/buckets").json()
    assert any(
        b["bucket_hash"] == h and b["triage_state"] == "confirmed" for b in refreshed
    )

    # Stop, then minimize from the detail pane.
    client.post(f"/api/campaigns/{cid}/stop")
    r = client.post(
        f"/api/buckets/{cid}/{h}/minimize", json={"granularity": "token", "budget": 400}
    )
    assert r.status_code == 200
    info = r.json()
    assert info["size_after"] <= info["size_before"]
    detail = client.get(f"/api/buckets/{cid}/{h}").json()
    assert detail["minimized_b64"] is not None
    assert base64.b64decode(detail["minimized_b64"])


def test_dashboard_assets_served(client):
    index = client.get("/")
    assert index.status_code == 200
    assert "verifuzz dashboard" in index.text
    assert client.get("/static/js/main.js").status_code == 200
    assert client.get("/static/style.css").status_code == 200
