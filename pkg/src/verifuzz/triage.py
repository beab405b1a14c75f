"""Crash deduplication and documentation.

Crashes are bucketed by a 64-bit hash folded over the ordered stack frames
(class name, method name, file name, line number). The exception type is
deliberately excluded from the hash: two exception types over an identical
frame sequence merge into one bucket, and the exception name is kept on
the bucket for display only. Traceless crashes (native aborts) fall back
to a key built from the exit code and the first non-empty stderr line.

The fold seed is ``rng.BUCKET_HASH_SEED`` (the FNV-1a 64 offset basis), a
published constant, so stores are portable across builds.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

from .rng import BUCKET_HASH_SEED, fnv1a
from .runner import RunOutcome, StackTrace

TRIAGE_STATES = ("new", "confirmed", "duplicate", "wontfix")

# Hash of the empty frame sequence: the documented sentinel for traces
# that parsed but carry no frames.
EMPTY_TRACE_HASH = format(BUCKET_HASH_SEED, "016x")

_FIELD_SEP = b"\x1f"
_FRAME_SEP = b"\x1e"


def bucket_hash(trace: StackTrace, top_k: int | None = None) -> str:
    """64-bit hex bucket key over the ordered frame tuples.

    ``top_k`` optionally restricts hashing to a prefix of the frames;
    the default hashes the full sequence.
    """
    h = BUCKET_HASH_SEED
    frames = trace.frames if top_k is None else trace.frames[:top_k]
    for frame in frames:
        for part in (
            frame.class_name,
            frame.method_name,
            frame.file_name or "",
            str(frame.line or 0),
        ):
            h = fnv1a(part.encode("utf-8") + _FIELD_SEP, h)
        h = fnv1a(_FRAME_SEP, h)
    return format(h, "016x")


def fallback_hash(exit_value: int | None, stderr: str) -> str:
    """Bucket key for traceless crashes: exit code + first stderr line."""
    first_line = ""
    for line in stderr.splitlines():
        if line.strip():
            first_line = line.strip()
            break
    h = fnv1a(b"exit:" + str(exit_value).encode("utf-8") + _FIELD_SEP, BUCKET_HASH_SEED)
    h = fnv1a(first_line.encode("utf-8"), h)
    return format(h, "016x")


def outcome_bucket_hash(outcome: RunOutcome, top_k: int | None = None) -> str:
    if outcome.trace is not None:
        return bucket_hash(outcome.trace, top_k)
    return fallback_hash(outcome.exit.value, outcome.stderr)


@dataclass
class CrashBucket:
    bucket_hash: str
    exception_name: str
    trace: StackTrace | None
    hit_count: int
    first_seen: float
    last_seen: float
    triage_state: str = "new"
    strategy_first: str = ""

    def summary(self) -> dict:
        return {
            "bucket_hash": self.bucket_hash,
            "exception": self.exception_name,
            "hit_count": self.hit_count,
            "first_seen": self.first_seen,
            "last_seen": self.last_seen,
            "triage_state": self.triage_state,
            "strategy_first": self.strategy_first,
        }


class StoreError(RuntimeError):
    """Persistent storage failed; crashes must never be dropped silently."""


class CrashStore:
    """Single-writer, directory-backed store.

    Layout per bucket: ``crashes/<hash>/input.bin``, ``trace.txt`` and
    ``report.json`` (UTF-8 JSON with stable key order).
    """

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.buckets: dict[str, CrashBucket] = {}
        self.root.mkdir(parents=True, exist_ok=True)
        self._load()

    def _bucket_dir(self, bucket: str) -> Path:
        return self.root / bucket

    def _load(self) -> None:
        for report_path in sorted(self.root.glob("*/report.json")):
            try:
                doc = json.loads(report_path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError):
                continue
            bucket = _bucket_from_report(doc)
            self.buckets[bucket.bucket_hash] = bucket

    def record_crash(
        self,
        outcome: RunOutcome,
        data: bytes,
        *,
        strategy: str = "",
        seed: int = 0,
        target_version: str = "unknown",
        framework_version: str = "",
        top_k: int | None = None,
    ) -> tuple[CrashBucket, bool]:
        """Document a crash; returns (bucket, is_new)."""
        if outcome.classification != "crash":
            raise ValueError("record_crash needs a crash-classified outcome")
        key = outcome_bucket_hash(outcome, top_k)
        now = time.time()
        existing = self.buckets.get(key)
        if existing is not None:
            existing.hit_count += 1
            existing.last_seen = now
            self._rewrite_report(existing)
            return existing, False

        exception = outcome.trace.exception_name if outcome.trace else "(no trace)"
        bucket = CrashBucket(
            bucket_hash=key,
            exception_name=exception,
            trace=outcome.trace,
            hit_count=1,
            first_seen=now,
            last_seen=now,
            strategy_first=strategy,
        )
        bdir = self._bucket_dir(key)
        try:
            bdir.mkdir(parents=True, exist_ok=True)
            (bdir / "input.bin").write_bytes(data)
            trace_text = outcome.trace.render() if outcome.trace else outcome.stderr
            (bdir / "trace.txt").write_text(trace_text, encoding="utf-8")
            report = {
                "bucket_hash": key,
                "exception": exception,
                "frames": [
                    {
                        "class": f.class_name,
                        "method": f.method_name,
                        "file": f.file_name,
                        "line": f.line,
                    }
                    for f in (outcome.trace.frames if outcome.trace else ())
                ],
                "message": outcome.trace.message if outcome.trace else None,
                "strategy": strategy,
                "seed": seed,
                "target_version": target_version,
                "framework_version": framework_version,
                "exit": outcome.exit.to_dict(),
                "stderr": outcome.stderr,
                "timestamps": {"first_seen": now, "last_seen": now},
                "hit_count": 1,
                "triage_state": "new",
                "triage_log": [],
                "replay_status": "untested",
            }
            _write_json(bdir / "report.json", report)
        except OSError as e:
            raise StoreError(f"cannot persist crash report under {bdir}: {e}") from e
        self.buckets[key] = bucket
        return bucket, True

    def _rewrite_report(self, bucket: CrashBucket) -> None:
        path = self._bucket_dir(bucket.bucket_hash) / "report.json"
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            doc["hit_count"] = bucket.hit_count
            doc["timestamps"]["last_seen"] = bucket.last_seen
            doc["triage_state"] = bucket.triage_state
            _write_json(path, doc)
        except OSError as e:
            raise StoreError(f"cannot update crash report {path}: {e}") from e

    def set_triage_state(self, bucket_hash_: str, state: str) -> CrashBucket:
        if state not in TRIAGE_STATES:
            raise ValueError(f"invalid triage state {state!r}")
        bucket = self.buckets.get(bucket_hash_)
        if bucket is None:
            raise KeyError(f"unknown bucket {bucket_hash_}")
        bucket.triage_state = state
        path = self._bucket_dir(bucket_hash_) / "report.json"
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            doc["triage_state"] = state
            doc.setdefault("triage_log", []).append({"state": state, "at": time.time()})
            _write_json(path, doc)
        except OSError as e:
            raise StoreError(f"cannot update triage state in {path}: {e}") from e
        return bucket

    def input_for(self, bucket_hash_: str) -> bytes:
        return (self._bucket_dir(bucket_hash_) / "input.bin").read_bytes()

    def report_for(self, bucket_hash_: str) -> dict:
        path = self._bucket_dir(bucket_hash_) / "report.json"
        return json.loads(path.read_text(encoding="utf-8"))

    def trace_text_for(self, bucket_hash_: str) -> str:
        return (self._bucket_dir(bucket_hash_) / "trace.txt").read_text(encoding="utf-8")

    def set_replay_status(self, bucket_hash_: str, status: str) -> None:
        path = self._bucket_dir(bucket_hash_) / "report.json"
        doc = json.loads(path.read_text(encoding="utf-8"))
        doc["replay_status"] = status
        _write_json(path, doc)

    def audit(self) -> list[str]:
        """Recompute every stored bucket hash; returns mismatching keys."""
        from .runner import parse_stack_trace

        bad = []
        for key in sorted(self.buckets):
            trace_text = self.trace_text_for(key)
            trace = parse_stack_trace(trace_text)
            if trace is None:
                report = self.report_for(key)
                recomputed = fallback_hash(report.get("exit", {}).get("value"), trace_text)
            else:
                recomputed = bucket_hash(trace)
            if recomputed != key:
                bad.append(key)
        return bad


def _bucket_from_report(doc: dict) -> CrashBucket:
    from .runner import StackFrame

    frames = tuple(
        StackFrame(f["class"], f["method"], f.get("file"), f.get("line"))
        for f in doc.get("frames", [])
    )
    trace = None
    if frames or doc.get("exception") not in (None, "(no trace)"):
        trace = StackTrace(doc.get("exception", ""), doc.get("message"), frames)
    ts = doc.get("timestamps", {})
    return CrashBucket(
        bucket_hash=doc["bucket_hash"],
        exception_name=doc.get("exception", ""),
        trace=trace,
        hit_count=doc.get("hit_count", 1),
        first_seen=ts.get("first_seen", 0.0),
        last_seen=ts.get("last_seen", 0.0),
        triage_state=doc.get("triage_state", "new"),
        strategy_first=doc.get("strategy", ""),
    )


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(
        json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def replay_bucket(store: CrashStore, spec, bucket_hash_: str, attempts: int = 5) -> dict:
    """Re-run a bucket's representative input; stable needs 4 of 5 matches."""
    from .runner import run_once

    data = store.input_for(bucket_hash_)
    matches = 0
    for _ in range(attempts):
        outcome = run_once(spec, data)
        if outcome.classification == "crash" and outcome_bucket_hash(outcome) == bucket_hash_:
            matches += 1
    status = "stable" if matches >= attempts - 1 else "flaky"
    store.set_replay_status(bucket_hash_, status)
    return {"attempts": attempts, "matches": matches, "status": status}
