"""HTTP JSON API over campaign and triage state, plus the dashboard assets.

Polling transport: every read endpoint is a cheap snapshot. All mutation
(start, stop, triage, minimize) goes through POST.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .manager import BadRequest, CampaignManager, Conflict, NotFound

STATIC_DIR = Path(__file__).with_name("static")
SCHEMA_PATH = Path(__file__).with_name("openapi.json")


class CampaignSummary(BaseModel):
    id: str
    strategy: str
    status: str
    executions: int
    buckets_found: int
    covered: int


class CampaignList(BaseModel):
    campaigns: list[CampaignSummary]


class TypedGenBody(BaseModel):
    seed: int = 0
    max_classes: int = 2
    max_methods_per_class: int = 2
    max_stmt_depth: int = 3
    features: list[str] | None = None
    illegal_old_placement: bool = False


class StartRequest(BaseModel):
    strategy: str = Field(description="blind | blind_coverage | grammar | grammar_coverage | typed")
    target_cmd: str = Field(description="target command line with an {input} placeholder")
    time_budget: float = 300.0
    master_seed: int = 0
    workers: int = 1
    timeout: float = 10.0
    grammar_path: str | None = Field(
        default=None, description="grammar file path, or 'minipvl' for the bundled grammar"
    )
    typedgen: TypedGenBody | None = None
    max_depth: int = 12
    max_executions: int | None = None
    max_buckets: int | None = None
    seed_corpus: int = 0


class StartResponse(BaseModel):
    id: str


class CoveragePointModel(BaseModel):
    t: float
    covered: int


class ClassificationCounts(BaseModel):
    verified: int
    clean_error: int
    crash: int
    timeout: int
    resource_limit: int


class StatsResponse(BaseModel):
    strategy: str
    status: str
    started_at: float
    executions: int
    classifications: ClassificationCounts
    buckets_found: int
    corpus_size: int
    covered: int
    coverage: list[list[float]]
    error: str | None = None


class BucketSummary(BaseModel):
    bucket_hash: str
    exception: str
    hit_count: int
    first_seen: float
    last_seen: float
    triage_state: str
    strategy_first: str


class BucketDetail(BaseModel):
    bucket: BucketSummary
    report: dict
    input_b64: str
    trace_text: str
    minimized_b64: str | None = None
    minimize_info: dict | None = None


class TriageRequest(BaseModel):
    state: str = Field(description="new | confirmed | duplicate | wontfix")


class MinimizeRequest(BaseModel):
    granularity: str = "token"
    budget: int = 2000


class MinimizeResponse(BaseModel):
    evaluations: int
    minimal: bool
    stable: bool
    size_before: int
    size_after: int
    granularity: str
    minimized_b64: str


def create_app(root_dir: str | Path) -> FastAPI:
    app = FastAPI(title="verifuzz service", version="0.1.0")
    manager = CampaignManager(root_dir)
    app.state.manager = manager

    def _wrap(fn, *args):
        try:
            return fn(*args)
        except NotFound as e:
            raise HTTPException(status_code=404, detail=str(e)) from None
        except Conflict as e:
            raise HTTPException(status_code=409, detail=str(e)) from None
        except BadRequest as e:
            raise HTTPException(status_code=400, detail=str(e)) from None

    @app.get("/api/campaigns", response_model=CampaignList)
    def list_campaigns():
        return {"campaigns": [_wrap(manager.summary, cid) for cid in manager.ids()]}

    @app.post("/api/campaigns", response_model=StartResponse)
    def start_campaign(body: StartRequest):
        payload = body.model_dump()
        if payload.get("typedgen") and payload["typedgen"].get("features") is None:
            payload["typedgen"].pop("features")
        return {"id": _wrap(manager.start, payload)}

    @app.get("/api/campaigns/{campaign_id}", response_model=StatsResponse)
    def campaign_stats(campaign_id: str):
        return _wrap(manager.stats, campaign_id).to_dict()

    @app.post("/api/campaigns/{campaign_id}/stop")
    def stop_campaign(campaign_id: str):
        _wrap(manager.stop, campaign_id)
        return {"stopped": campaign_id}

    @app.get("/api/campaigns/{campaign_id}/coverage", response_model=list[CoveragePointModel])
    def campaign_coverage(campaign_id: str):
        return _wrap(manager.coverage, campaign_id)

    @app.get("/api/campaigns/{campaign_id}/buckets", response_model=list[BucketSummary])
    def campaign_buckets(campaign_id: str):
        return _wrap(manager.buckets, campaign_id)

    @app.get("/api/buckets/{campaign_id}/{bucket_hash}", response_model=BucketDetail)
    def bucket_detail(campaign_id: str, bucket_hash: str):
        return _wrap(manager.bucket_detail, campaign_id, bucket_hash)

    @app.post("/api/buckets/{campaign_id}/{bucket_hash}/triage", response_model=BucketSummary)
    def bucket_triage(campaign_id: str, bucket_hash: str, body: TriageRequest):
        return _wrap(manager.triage, campaign_id, bucket_hash, body.state)

    @app.post("/api/buckets/{campaign_id}/{bucket_hash}/minimize", response_model=MinimizeResponse)
    def bucket_minimize(campaign_id: str, bucket_hash: str, body: MinimizeRequest | None = None):
        body = body or MinimizeRequest()
        return _wrap(manager.minimize_bucket, campaign_id, bucket_hash, body.granularity, body.budget)

    if STATIC_DIR.is_dir():
        @app.get("/", include_in_schema=False)
        def index():
            return FileResponse(STATIC_DIR / "index.html")

        app.mount("/static", StaticFiles(directory=STATIC_DIR), name="static")

    return app


def generate_schema() -> dict:
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        return create_app(tmp).openapi()


def write_schema(path: Path | None = None) -> Path:
    path = path or SCHEMA_PATH
    path.write_text(
        json.dumps(generate_schema(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path


def serve(root_dir: str | Path, bind: str = "127.0.0.1:8080") -> None:
    import uvicorn

    host, _, port_text = bind.partition(":")
    uvicorn.run(create_app(root_dir), host=host or "127.0.0.1", port=int(port_text or 8080))
