"""Campaign orchestration: drive one fuzzing strategy against a target,
merge coverage, record crashes, keep the coverage time series, and persist
everything under the campaign directory.

One coordinator owns all mutable state (corpus, covered set, stats); W
worker slots execute the target concurrently. Inputs are generated from
seeds split per (worker, iteration), so a single-worker campaign is a pure
function of its configuration.
"""

from __future__ import annotations

import json
import logging
import shutil
import threading
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from .grammar import DerivationTree, Grammar, generate, load_grammar, mutate_tree
from .mutator import Corpus, dictionary_from_grammar, mutate_bytes
from .rng import Rng, derive_seed
from .runner import RunOutcome, TargetMissingError, TargetSpec, probe_version, run_once
from .triage import CrashStore, StoreError
from .typedgen import TypedGenConfig, generate_typed

log = logging.getLogger(__name__)

STRATEGIES = ("blind", "blind_coverage", "grammar", "grammar_coverage", "typed")

_HEARTBEAT_SECONDS = 5.0
_FLUSH_SECONDS = 2.0
_TREE_MUTATE_CHANCE = 0.5


@dataclass(frozen=True)
class CoveragePoint:
    t: float  # seconds since campaign process start
    covered: int


@dataclass
class CampaignStats:
    strategy: str
    status: str = "running"  # running | stopped | finished
    started_at: float = 0.0
    executions: int = 0
    verified: int = 0
    clean_error: int = 0
    crash: int = 0
    timeout: int = 0
    resource_limit: int = 0
    buckets_found: int = 0
    corpus_size: int = 0
    covered: int = 0
    coverage: list[CoveragePoint] = field(default_factory=list)
    error: str | None = None

    def classification_counts(self) -> dict[str, int]:
        return {
            "verified": self.verified,
            "clean_error": self.clean_error,
            "crash": self.crash,
            "timeout": self.timeout,
            "resource_limit": self.resource_limit,
        }

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "status": self.status,
            "started_at": self.started_at,
            "executions": self.executions,
            "classifications": self.classification_counts(),
            "buckets_found": self.buckets_found,
            "corpus_size": self.corpus_size,
            "covered": self.covered,
            "coverage": [[p.t, p.covered] for p in self.coverage],
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignStats":
        counts = d.get("classifications", {})
        return cls(
            strategy=d.get("strategy", ""),
            status=d.get("status", "finished"),
            started_at=d.get("started_at", 0.0),
            executions=d.get("executions", 0),
            verified=counts.get("verified", 0),
            clean_error=counts.get("clean_error", 0),
            crash=counts.get("crash", 0),
            timeout=counts.get("timeout", 0),
            resource_limit=counts.get("resource_limit", 0),
            buckets_found=d.get("buckets_found", 0),
            corpus_size=d.get("corpus_size", 0),
            covered=d.get("covered", 0),
            coverage=[CoveragePoint(t, c) for t, c in d.get("coverage", [])],
            error=d.get("error"),
        )


@dataclass(frozen=True)
class CampaignConfig:
    strategy: str
    target: TargetSpec
    output_dir: Path
    time_budget: float
    master_seed: int = 0
    workers: int = 1
    grammar_path: str | None = None
    typedgen: TypedGenConfig | None = None
    max_depth: int = 12
    max_executions: int | None = None  # optional convenience stop
    max_buckets: int | None = None
    seed_corpus: int = 0  # pre-generate N grammar sentences into the corpus

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.time_budget <= 0:
            raise ValueError("time_budget must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.strategy in ("grammar", "grammar_coverage") and not self.grammar_path:
            raise ValueError(f"strategy {self.strategy} requires grammar_path")
        if self.strategy == "typed" and self.typedgen is None:
            raise ValueError("strategy typed requires a typedgen config")
        if self.seed_corpus and not self.grammar_path:
            raise ValueError("seed_corpus requires grammar_path")

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "target": self.target.to_dict(),
            "output_dir": str(self.output_dir),
            "time_budget": self.time_budget,
            "master_seed": self.master_seed,
            "workers": self.workers,
            "grammar_path": self.grammar_path,
            "typedgen": self.typedgen.to_dict() if self.typedgen else None,
            "max_depth": self.max_depth,
            "max_executions": self.max_executions,
            "max_buckets": self.max_buckets,
            "seed_corpus": self.seed_corpus,
            "framework_version": __version__,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignConfig":
        return cls(
            strategy=d["strategy"],
            target=TargetSpec.from_dict(d["target"]),
            output_dir=Path(d["output_dir"]),
            time_budget=float(d["time_budget"]),
            master_seed=int(d.get("master_seed", 0)),
            workers=int(d.get("workers", 1)),
            grammar_path=d.get("grammar_path"),
            typedgen=TypedGenConfig.from_dict(d["typedgen"]) if d.get("typedgen") else None,
            max_depth=int(d.get("max_depth", 12)),
            max_executions=d.get("max_executions"),
            max_buckets=d.get("max_buckets"),
            seed_corpus=int(d.get("seed_corpus", 0)),
        )


@dataclass
class Provenance:
    strategy: str
    seed: int
    kind: str  # fresh | mutate | splice-pool | bootstrap
    parent: str | None = None  # content hash of the parent input

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "seed": self.seed,
            "kind": self.kind,
            "parent": self.parent,
        }


class _StrategyState:
    """Input generation for one campaign. Generation is coordinator-only."""

    def __init__(self, config: CampaignConfig) -> None:
        self.config = config
        self.grammar: Grammar | None = None
        self.dictionary: list[bytes] = []
        self.corpus = Corpus()
        self.tree_corpus: list[DerivationTree] = []
        if config.grammar_path:
            self.grammar = load_grammar(config.grammar_path)
            self.dictionary = dictionary_from_grammar(self.grammar)
            self.corpus.dictionary = self.dictionary
        if config.seed_corpus:
            assert self.grammar is not None
            for j in range(config.seed_corpus):
                seed = derive_seed(config.master_seed, 0x5EED, j)
                sentence = generate(self.grammar, seed, config.max_depth).serialize()
                self.corpus.seed(sentence.encode("utf-8"))

    def next_input(self, seed: int) -> tuple[bytes, Provenance, DerivationTree | None]:
        strategy = self.config.strategy
        if strategy in ("blind", "blind_coverage"):
            pick_rng = Rng(derive_seed(seed, 1))
            base = self.corpus.pick(pick_rng)
            if base is None:
                data = mutate_bytes(b"", self.dictionary, derive_seed(seed, 2))
                return data, Provenance(strategy, seed, "bootstrap"), None
            data = mutate_bytes(base, self.dictionary, derive_seed(seed, 2))
            parent = self.corpus.content_hash(base)
            return data, Provenance(strategy, seed, "mutate", parent), None
        if strategy == "grammar":
            tree = generate(self.grammar, seed, self.config.max_depth)
            return tree.serialize().encode("utf-8"), Provenance(strategy, seed, "fresh"), tree
        if strategy == "grammar_coverage":
            rng = Rng(derive_seed(seed, 3))
            if self.tree_corpus and rng.chance(_TREE_MUTATE_CHANCE):
                parent_tree = self.tree_corpus[rng.below(len(self.tree_corpus))]
                tree = mutate_tree(parent_tree, self.tree_corpus, self.grammar, seed)
                data = tree.serialize().encode("utf-8")
                parent = self.corpus.content_hash(parent_tree.serialize().encode("utf-8"))
                return data, Provenance(strategy, seed, "mutate", parent), tree
            tree = generate(self.grammar, seed, self.config.max_depth)
            return tree.serialize().encode("utf-8"), Provenance(strategy, seed, "fresh"), tree
        # typed
        cfg = replace(self.config.typedgen, seed=seed)
        data = generate_typed(cfg).encode("utf-8")
        return data, Provenance(strategy, seed, "fresh"), None

    def on_result(self, data: bytes, outcome: RunOutcome, tree: DerivationTree | None) -> bool:
        """Corpus evolution for coverage-guided strategies; True if accepted."""
        strategy = self.config.strategy
        if strategy == "blind_coverage":
            return self.corpus.add_if_novel(data, outcome.new_counters)
        if strategy == "grammar_coverage" and tree is not None:
            if self.corpus.add_if_novel(data, outcome.new_counters):
                self.tree_corpus.append(tree)
                return True
        return False


class Campaign:
    """One run of one strategy. Create, then call run()."""

    def __init__(self, config: CampaignConfig) -> None:
        self.config = config
        self.dir = Path(config.output_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        (self.dir / "corpus").mkdir(exist_ok=True)
        self.state = _StrategyState(config)
        self.store = CrashStore(self.dir / "crashes")
        self.stats = CampaignStats(strategy=config.strategy)
        self.covered: set[int] = set()
        self.stop_event = threading.Event()
        self._lock = threading.Lock()
        self._log_fh = None
        self._target_version = "unknown"
        self._last_point_at = 0.0

    # --- public control surface (service uses these) ---

    def stop(self) -> None:
        self.stop_event.set()

    def snapshot(self) -> CampaignStats:
        with self._lock:
            return replace(self.stats, coverage=list(self.stats.coverage))

    @property
    def campaign_id(self) -> str:
        return self.dir.name

    # --- the loop ---

    def run(self, stop_signal: threading.Event | None = None, t_origin: float | None = None) -> CampaignStats:
        if stop_signal is not None:
            self.stop_event = stop_signal
        cfg = self.config
        # Configuration errors abort before the loop ever starts; a missing
        # target must never be recorded as campaign activity.
        executable = cfg.target.command[0]
        if "{input}" not in executable and shutil.which(executable) is None \
                and not Path(executable).exists():
            raise TargetMissingError(f"target binary not found: {executable}")
        t0 = t_origin if t_origin is not None else time.monotonic()
        started = time.monotonic()
        with self._lock:
            self.stats.started_at = time.time()
        (self.dir / "config.json").write_text(
            json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        self._log_fh = open(self.dir / "log.txt", "a", encoding="utf-8")
        self._target_version = probe_version(cfg.target)
        self._log(f"start strategy={cfg.strategy} master_seed={cfg.master_seed} "
                  f"workers={cfg.workers} budget={cfg.time_budget}s target={self._target_version!r}")

        last_flush = 0.0
        self._last_point_at = 0.0
        iteration = [0] * cfg.workers

        def deadline_passed() -> bool:
            return time.monotonic() - started >= cfg.time_budget

        def hard_stop() -> bool:
            if self.stop_event.is_set() or deadline_passed():
                return True
            if cfg.max_executions is not None and dispatched[0] >= cfg.max_executions:
                return True
            if cfg.max_buckets is not None and self.stats.buckets_found >= cfg.max_buckets:
                return True
            return False

        dispatched = [0]
        try:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                in_flight = {}
                while True:
                    while len(in_flight) < cfg.workers and not hard_stop():
                        slot = self._free_slot(in_flight, cfg.workers)
                        k = iteration[slot]
                        iteration[slot] += 1
                        seed = derive_seed(cfg.master_seed, slot, k)
                        data, prov, tree = self.state.next_input(seed)
                        fut = pool.submit(run_once, cfg.target, data)
                        in_flight[fut] = (slot, k, data, prov, tree)
                        dispatched[0] += 1
                    if not in_flight:
                        if hard_stop():
                            break
                        time.sleep(0.01)
                        continue
                    done, _ = wait(in_flight, timeout=0.25, return_when=FIRST_COMPLETED)
                    for fut in done:
                        slot, k, data, prov, tree = in_flight.pop(fut)
                        outcome = fut.result()
                        self._merge(outcome, data, prov, tree, t0)
                    now = time.monotonic()
                    if now - self._last_point_at >= _HEARTBEAT_SECONDS:
                        self._append_point(t0)
                    if now - last_flush >= _FLUSH_SECONDS:
                        self.flush()
                        last_flush = now
            with self._lock:
                self.stats.status = "stopped" if self.stop_event.is_set() else "finished"
        except StoreError as e:
            log.error("campaign paused: %s", e)
            with self._lock:
                self.stats.status = "stopped"
                self.stats.error = str(e)
        finally:
            self._append_point(t0)
            self.flush()
            self._log(f"end status={self.stats.status} executions={self.stats.executions} "
                      f"buckets={self.stats.buckets_found} covered={self.stats.covered}")
            if self._log_fh:
                self._log_fh.close()
                self._log_fh = None
        return self.snapshot()

    @staticmethod
    def _free_slot(in_flight: dict, workers: int) -> int:
        busy = {slot for slot, *_ in in_flight.values()}
        for i in range(workers):
            if i not in busy:
                return i
        raise AssertionError("no free worker slot")

    def _merge(self, outcome: RunOutcome, data: bytes, prov: Provenance,
               tree: DerivationTree | None, t0: float) -> None:
        new = len(set(outcome.counters) - self.covered)
        outcome.new_counters = new
        self.covered.update(outcome.counters)

        accepted = self.state.on_result(data, outcome, tree)
        if accepted:
            name = self.state.corpus.content_hash(data)
            (self.dir / "corpus" / name).write_bytes(data)

        is_new_bucket = False
        bucket_hash = ""
        if outcome.classification == "crash":
            bucket, is_new_bucket = self.store.record_crash(
                outcome,
                data,
                strategy=prov.strategy,
                seed=prov.seed,
                target_version=self._target_version,
                framework_version=__version__,
            )
            bucket_hash = bucket.bucket_hash

        changed = False
        with self._lock:
            st = self.stats
            st.executions += 1
            setattr(st, outcome.classification, getattr(st, outcome.classification) + 1)
            if is_new_bucket:
                st.buckets_found += 1
            st.corpus_size = len(self.state.corpus)
            if len(self.covered) != st.covered:
                st.covered = len(self.covered)
                changed = True
        if changed:
            self._append_point(t0)
        self._log(
            f"exec seed={prov.seed} kind={prov.kind} class={outcome.classification}"
            f" new={new} sha256={self.state.corpus.content_hash(data)}"
            + (f" bucket={bucket_hash} novel={is_new_bucket}" if bucket_hash else "")
        )

    def _append_point(self, t0: float) -> None:
        self._last_point_at = time.monotonic()
        t = round(self._last_point_at - t0, 3)
        with self._lock:
            cov = self.stats.coverage
            point = CoveragePoint(t, len(self.covered))
            if cov and cov[-1] == point:
                return
            cov.append(point)

    def flush(self) -> None:
        snap = self.snapshot()
        tmp = self.dir / "stats.json.tmp"
        tmp.write_text(json.dumps(snap.to_dict(), indent=2, sort_keys=True) + "\n",
                       encoding="utf-8")
        tmp.replace(self.dir / "stats.json")
        write_series(snap.coverage, self.dir / "coverage.dat")
        if self._log_fh:
            self._log_fh.flush()

    def _log(self, message: str) -> None:
        if self._log_fh:
            self._log_fh.write(f"{time.time():.3f} {message}\n")


def run_campaign(config: CampaignConfig,
                 stop_signal: threading.Event | None = None,
                 t_origin: float | None = None) -> CampaignStats:
    return Campaign(config).run(stop_signal, t_origin)


# --- reporting ---


def write_series(points: list[CoveragePoint], path: Path) -> Path:
    """Two-column ``t covered`` series, one sample per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for p in points:
            fh.write(f"{p.t:.10g} {p.covered}\n")
    return path


def read_series(path: Path) -> list[CoveragePoint]:
    points = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        t_text, covered_text = line.split()
        points.append(CoveragePoint(float(t_text), int(covered_text)))
    return points


def load_stats(campaign_dir: Path) -> CampaignStats:
    doc = json.loads((Path(campaign_dir) / "stats.json").read_text(encoding="utf-8"))
    return CampaignStats.from_dict(doc)


def emit_report(campaign_dirs: list[Path], out_dir: Path) -> list[Path]:
    """Write per-campaign ``<name>_<strategy>_covered.dat`` plus summary.txt."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    rows = []
    for cdir in campaign_dirs:
        cdir = Path(cdir)
        stats = load_stats(cdir)
        data_path = out_dir / f"{cdir.name}_{stats.strategy}_covered.dat"
        write_series(stats.coverage, data_path)
        written.append(data_path)
        rows.append((cdir.name, stats.strategy, stats.executions,
                     stats.buckets_found, stats.covered))
    lines = [f"{'campaign':<28} {'strategy':<18} {'executions':>10} {'buckets':>8} {'covered':>8}"]
    for name, strategy, execs, buckets, covered in rows:
        lines.append(f"{name:<28} {strategy:<18} {execs:>10} {buckets:>8} {covered:>8}")
    summary = out_dir / "summary.txt"
    summary.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(summary)
    return written
