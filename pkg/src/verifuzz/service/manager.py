"""Campaign lifecycle management for the HTTP service.

Campaigns run in-process on daemon threads; every read goes through a
snapshot (running) or the on-disk stats (finished), so reads never block
or perturb the campaign loop. Stopping the service leaves campaign state
on disk.
"""

from __future__ import annotations

import base64
import json
import shlex
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from ..campaign import Campaign, CampaignConfig, CampaignStats, load_stats
from ..minimizer import minimize
from ..runner import TargetSpec, run_once
from ..triage import CrashStore, outcome_bucket_hash
from ..typedgen import TypedGenConfig


class NotFound(KeyError):
    pass


class Conflict(RuntimeError):
    pass


class BadRequest(ValueError):
    pass


@dataclass
class _Running:
    campaign: Campaign
    thread: threading.Thread


class CampaignManager:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._running: dict[str, _Running] = {}
        self._lock = threading.Lock()
        self._seq = 0

    # --- construction ---

    def _new_id(self, strategy: str) -> str:
        with self._lock:
            self._seq += 1
            seq = self._seq
        return f"{strategy}-{time.strftime('%Y%m%d-%H%M%S')}-{seq:03d}"

    def _resolve_grammar(self, path_text: str | None) -> str | None:
        if path_text is None or path_text == "":
            return None
        if path_text == "minipvl":
            from ..toyverifier import GRAMMAR_PATH

            return str(GRAMMAR_PATH)
        path = Path(path_text)
        if not path.is_file():
            raise BadRequest(f"grammar file not found: {path_text}")
        return str(path)

    def config_from_request(self, body: dict) -> tuple[str, CampaignConfig]:
        strategy = body.get("strategy")
        target_cmd = body.get("target_cmd")
        if not strategy or not target_cmd:
            raise BadRequest("strategy and target_cmd are required")
        command = tuple(shlex.split(target_cmd)) if isinstance(target_cmd, str) else tuple(target_cmd)
        campaign_id = self._new_id(strategy)
        try:
            target = TargetSpec(
                command=command,
                timeout=float(body.get("timeout", 10.0)),
            )
            typed_cfg = None
            if body.get("typedgen"):
                typed_cfg = TypedGenConfig.from_dict(body["typedgen"])
            elif strategy == "typed":
                typed_cfg = TypedGenConfig()
            config = CampaignConfig(
                strategy=strategy,
                target=target,
                output_dir=self.root / campaign_id,
                time_budget=float(body.get("time_budget", 300.0)),
                master_seed=int(body.get("master_seed", 0)),
                workers=int(body.get("workers", 1)),
                grammar_path=self._resolve_grammar(body.get("grammar_path")),
                typedgen=typed_cfg,
                max_depth=int(body.get("max_depth", 12)),
                max_executions=body.get("max_executions"),
                max_buckets=body.get("max_buckets"),
                seed_corpus=int(body.get("seed_corpus", 0)),
            )
        except (ValueError, TypeError) as e:
            raise BadRequest(str(e)) from e
        return campaign_id, config

    def start(self, body: dict) -> str:
        campaign_id, config = self.config_from_request(body)
        campaign = Campaign(config)
        thread = threading.Thread(
            target=campaign.run, name=f"campaign-{campaign_id}", daemon=True
        )
        with self._lock:
            self._running[campaign_id] = _Running(campaign, thread)
        thread.start()
        return campaign_id

    # --- lookup ---

    def _campaign_dir(self, campaign_id: str) -> Path:
        path = self.root / campaign_id
        if not path.is_dir():
            raise NotFound(campaign_id)
        return path

    def ids(self) -> list[str]:
        on_disk = {p.name for p in self.root.iterdir() if (p / "config.json").is_file()}
        with self._lock:
            on_disk.update(self._running)
        return sorted(on_disk)

    def stats(self, campaign_id: str) -> CampaignStats:
        with self._lock:
            running = self._running.get(campaign_id)
        if running is not None:
            snap = running.campaign.snapshot()
            if running.thread.is_alive():
                return snap
        path = self._campaign_dir(campaign_id)
        try:
            return load_stats(path)
        except FileNotFoundError:
            raise NotFound(campaign_id) from None

    def stop(self, campaign_id: str) -> None:
        with self._lock:
            running = self._running.get(campaign_id)
        if running is None or not running.thread.is_alive():
            # Known directory but nothing running: stopping is a conflict.
            self._campaign_dir(campaign_id)
            raise Conflict(f"campaign {campaign_id} is not running")
        running.campaign.stop()
        running.thread.join(timeout=30.0)

    def store_for(self, campaign_id: str) -> CrashStore:
        with self._lock:
            running = self._running.get(campaign_id)
        if running is not None and running.thread.is_alive():
            return running.campaign.store
        return CrashStore(self._campaign_dir(campaign_id) / "crashes")

    def buckets(self, campaign_id: str) -> list[dict]:
        store = self.store_for(campaign_id)
        return [b.summary() for _, b in sorted(store.buckets.items())]

    def bucket_detail(self, campaign_id: str, bucket_hash: str) -> dict:
        store = self.store_for(campaign_id)
        if bucket_hash not in store.buckets:
            raise NotFound(bucket_hash)
        report = store.report_for(bucket_hash)
        data = store.input_for(bucket_hash)
        detail = {
            "bucket": store.buckets[bucket_hash].summary(),
            "report": report,
            "input_b64": base64.b64encode(data).decode("ascii"),
            "trace_text": store.trace_text_for(bucket_hash),
            "minimized_b64": None,
            "minimize_info": None,
        }
        bdir = self._campaign_dir(campaign_id) / "crashes" / bucket_hash
        minimized = bdir / "minimized.bin"
        if minimized.is_file():
            detail["minimized_b64"] = base64.b64encode(minimized.read_bytes()).decode("ascii")
            info = bdir / "minimize.json"
            if info.is_file():
                detail["minimize_info"] = json.loads(info.read_text(encoding="utf-8"))
        return detail

    def triage(self, campaign_id: str, bucket_hash: str, state: str) -> dict:
        store = self.store_for(campaign_id)
        try:
            bucket = store.set_triage_state(bucket_hash, state)
        except KeyError:
            raise NotFound(bucket_hash) from None
        except ValueError as e:
            raise BadRequest(str(e)) from None
        return bucket.summary()

    def minimize_bucket(
        self, campaign_id: str, bucket_hash: str, granularity: str = "token",
        budget: int = 2000,
    ) -> dict:
        cdir = self._campaign_dir(campaign_id)
        result = minimize_stored_bucket(cdir, bucket_hash, granularity, budget)
        return result

    def coverage(self, campaign_id: str) -> list[dict]:
        stats = self.stats(campaign_id)
        return [{"t": p.t, "covered": p.covered} for p in stats.coverage]

    def summary(self, campaign_id: str) -> dict:
        stats = self.stats(campaign_id)
        return {
            "id": campaign_id,
            "strategy": stats.strategy,
            "status": stats.status,
            "executions": stats.executions,
            "buckets_found": stats.buckets_found,
            "covered": stats.covered,
        }


def minimize_stored_bucket(
    campaign_dir: Path, bucket_hash: str, granularity: str = "token",
    budget: int = 2000,
) -> dict:
    """Minimize a stored crash input, preserving its bucket hash."""
    campaign_dir = Path(campaign_dir)
    config_doc = json.loads((campaign_dir / "config.json").read_text(encoding="utf-8"))
    spec = TargetSpec.from_dict(config_doc["target"])
    store = CrashStore(campaign_dir / "crashes")
    if bucket_hash not in store.buckets:
        raise NotFound(bucket_hash)
    data = store.input_for(bucket_hash)

    def predicate(candidate: bytes) -> bool:
        outcome = run_once(spec, candidate)
        return (
            outcome.classification == "crash"
            and outcome_bucket_hash(outcome) == bucket_hash
        )

    grammar = None
    if config_doc.get("grammar_path"):
        from ..grammar import load_grammar

        grammar = load_grammar(config_doc["grammar_path"])

    if granularity not in ("line", "token", "char"):
        raise BadRequest(f"invalid granularity {granularity!r}")
    result = minimize(data, predicate, granularity, budget=budget, grammar=grammar)

    bdir = campaign_dir / "crashes" / bucket_hash
    (bdir / "minimized.bin").write_bytes(result.data)
    info = result.to_dict()
    (bdir / "minimize.json").write_text(
        json.dumps(info, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    info["minimized_b64"] = base64.b64encode(result.data).decode("ascii")
    return info
