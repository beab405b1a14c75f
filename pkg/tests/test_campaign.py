"""Campaign orchestration: determinism, strategies, series, reports."""

import sys
import threading

import pytest

from verifuzz.campaign import (
    Campaign,
    CampaignConfig,
    CoveragePoint,
    emit_report,
    load_stats,
    read_series,
    run_campaign,
    write_series,
)
from verifuzz.runner import TargetSpec
from verifuzz.toyverifier import GRAMMAR_PATH

from conftest import ALL_BUGS, toy_command


def make_config(tmp_path, name="camp", **kw):
    defaults = dict(
        strategy="grammar",
        target=TargetSpec(command=toy_command(ALL_BUGS), timeout=10.0),
        output_dir=tmp_path / name,
        time_budget=300.0,
        master_seed=1,
        workers=1,
        grammar_path=str(GRAMMAR_PATH),
        max_executions=25,
    )
    defaults.update(kw)
    return CampaignConfig(**defaults)


class TestConfigValidation:
    def test_grammar_strategy_requires_grammar(self, tmp_path):
        with pytest.raises(ValueError, match="grammar_path"):
            make_config(tmp_path, grammar_path=None)

    def test_typed_strategy_requires_config(self, tmp_path):
        with pytest.raises(ValueError, match="typedgen"):
            make_config(tmp_path, strategy="typed", grammar_path=None)

    def test_unknown_strategy(self, tmp_path):
        with pytest.raises(ValueError, match="unknown strategy"):
            make_config(tmp_path, strategy="quantum")

    def test_round_trips_through_dict(self, tmp_path):
        config = make_config(tmp_path)
        assert CampaignConfig.from_dict(config.to_dict()) == config


class TestSmoke:
    def test_noop_target_one_second(self, tmp_path):
        config = make_config(
            tmp_path,
            strategy="blind",
            grammar_path=None,
            target=TargetSpec(command=(sys.executable, "-c", "pass", "{input}")),
            time_budget=1.0,
            max_executions=None,
        )
        stats = run_campaign(config)
        assert stats.executions >= 1
        assert stats.buckets_found == 0
        assert stats.status == "finished"
        assert stats.executions == sum(stats.classification_counts().values())

    def test_persists_layout(self, tmp_path):
        config = make_config(tmp_path, max_executions=5)
        run_campaign(config)
        cdir = config.output_dir
        for name in ("config.json", "stats.json", "coverage.dat", "corpus", "crashes", "log.txt"):
            assert (cdir / name).exists(), name

    def test_stop_signal(self, tmp_path):
        config = make_config(tmp_path, time_budget=60.0, max_executions=None)
        stop = threading.Event()
        campaign = Campaign(config)
        timer = threading.Timer(1.5, stop.set)
        timer.start()
        stats = campaign.run(stop_signal=stop)
        timer.cancel()
        assert stats.status == "stopped"
        assert stats.executions >= 1

    def test_missing_target_aborts(self, tmp_path):
        from verifuzz.runner import TargetMissingError

        config = make_config(
            tmp_path,
            target=TargetSpec(command=("/nonexistent/verifier", "{input}")),
            max_executions=3,
        )
        with pytest.raises(TargetMissingError):
            run_campaign(config)


class TestDeterminism:
    def test_identical_configs_identical_sequences_and_buckets(self, tmp_path):
        stats = []
        logs = []
        for name in ("a", "b"):
            config = make_config(tmp_path, name=name, max_executions=30)
            stats.append(run_campaign(config))
            log = (config.output_dir / "log.txt").read_text()
            logs.append(
                [line.split("sha256=")[1].split()[0]
                 for line in log.splitlines() if "sha256=" in line]
            )
        assert logs[0] == logs[1] and len(logs[0]) == 30
        buckets_a = sorted(p.name for p in (tmp_path / "a" / "crashes").iterdir())
        buckets_b = sorted(p.name for p in (tmp_path / "b" / "crashes").iterdir())
        assert buckets_a == buckets_b
        assert stats[0].buckets_found == stats[1].buckets_found

    def test_seed_split_stable_across_worker_counts(self):
        from verifuzz.rng import derive_seed

        # Input for (worker i, iteration k) never depends on worker count.
        assert derive_seed(5, 2, 9) == derive_seed(5, 2, 9)
        seeds = {derive_seed(5, i, k) for i in range(4) for k in range(4)}
        assert len(seeds) == 16


class TestStrategies:
    def test_grammar_provenance_enables_regeneration(self, tmp_path):
        from verifuzz.campaign import _StrategyState
        from verifuzz.grammar import generate, load_grammar

        config = make_config(tmp_path)
        state = _StrategyState(config)
        data, prov, tree = state.next_input(seed=1234)
        assert prov.strategy == "grammar" and prov.kind == "fresh"
        grammar = load_grammar(config.grammar_path)
        regenerated = generate(grammar, prov.seed, config.max_depth).serialize().encode()
        assert regenerated == data

    def test_blind_bootstrap_on_empty_corpus(self, tmp_path):
        from verifuzz.campaign import _StrategyState

        config = make_config(tmp_path, strategy="blind")
        state = _StrategyState(config)
        data, prov, tree = state.next_input(seed=7)
        assert prov.kind == "bootstrap" and tree is None
        assert data

    def test_grammar_coverage_falls_back_to_fresh(self, tmp_path):
        from verifuzz.campaign import _StrategyState

        config = make_config(tmp_path, strategy="grammar_coverage")
        state = _StrategyState(config)
        for seed in range(10):
            _, prov, tree = state.next_input(seed=seed)
            assert prov.kind == "fresh" and tree is not None

    def test_grammar_coverage_builds_tree_corpus(self, tmp_path):
        config = make_config(tmp_path, strategy="grammar_coverage", max_executions=40)
        stats = run_campaign(config)
        assert stats.corpus_size > 0
        corpus_files = list((config.output_dir / "corpus").iterdir())
        assert len(corpus_files) == stats.corpus_size

    def test_blind_corpus_stays_empty_without_coverage_gain(self, tmp_path):
        config = make_config(
            tmp_path, strategy="blind", grammar_path=str(GRAMMAR_PATH), max_executions=20
        )
        stats = run_campaign(config)
        assert stats.corpus_size == 0  # plain blind never accepts entries

    def test_typed_strategy_runs(self, tmp_path):
        from verifuzz.typedgen import TypedGenConfig

        config = make_config(
            tmp_path, strategy="typed", grammar_path=None,
            typedgen=TypedGenConfig(), max_executions=10,
        )
        stats = run_campaign(config)
        assert stats.executions == 10
        assert stats.verified > 0

    def test_seed_corpus_pregenerates(self, tmp_path):
        config = make_config(
            tmp_path, strategy="blind_coverage", seed_corpus=8, max_executions=5
        )
        campaign = Campaign(config)
        assert len(campaign.state.corpus) == 8
        campaign.run()


class TestCoverageSeries:
    def test_series_monotone_and_nonempty(self, tmp_path):
        config = make_config(tmp_path, max_executions=20)
        stats = run_campaign(config)
        points = stats.coverage
        assert points
        for a, b in zip(points, points[1:]):
            assert a.t <= b.t
            assert a.covered <= b.covered
        assert points[-1].covered == stats.covered
        assert points[0].t > 0  # startup gap precedes the first sample

    def test_crash_conservation(self, tmp_path):
        config = make_config(tmp_path, max_executions=40)
        stats = run_campaign(config)
        on_disk = [p for p in (config.output_dir / "crashes").iterdir() if p.is_dir()]
        assert stats.buckets_found == len(on_disk)

    def test_stats_roundtrip(self, tmp_path):
        config = make_config(tmp_path, max_executions=10)
        stats = run_campaign(config)
        loaded = load_stats(config.output_dir)
        assert loaded.executions == stats.executions
        assert [(p.t, p.covered) for p in loaded.coverage] == [
            (p.t, p.covered) for p in stats.coverage
        ]


class TestReports:
    def test_series_format_exact(self, tmp_path):
        path = tmp_path / "s.dat"
        write_series([CoveragePoint(0, 0), CoveragePoint(40, 3000)], path)
        assert path.read_text() == "0 0\n40 3000\n"

    def test_series_round_trip(self, tmp_path):
        points = [CoveragePoint(0.0, 0), CoveragePoint(1.25, 17), CoveragePoint(40.125, 3000)]
        path = write_series(points, tmp_path / "s.dat")
        assert read_series(path) == points

    def test_empty_series(self, tmp_path):
        path = write_series([], tmp_path / "empty.dat")
        assert path.read_text() == ""
        assert read_series(path) == []

    def test_report_two_campaigns_distinct_names(self, tmp_path):
        dirs = []
        for name, strategy in (("one", "grammar"), ("two", "blind")):
            config = make_config(
                tmp_path, name=name, strategy=strategy,
                grammar_path=str(GRAMMAR_PATH), max_executions=5,
            )
            run_campaign(config)
            dirs.append(config.output_dir)
        written = emit_report(dirs, tmp_path / "report")
        data_files = [p for p in written if p.name.endswith("_covered.dat")]
        assert len(data_files) == 2
        assert len({p.name for p in data_files}) == 2
        summary = (tmp_path / "report" / "summary.txt").read_text()
        assert "grammar" in summary and "blind" in summary

    def test_report_series_reparses_identically(self, tmp_path):
        config = make_config(tmp_path, max_executions=15)
        stats = run_campaign(config)
        [data_file] = [
            p for p in emit_report([config.output_dir], tmp_path / "rep")
            if p.name.endswith("_covered.dat")
        ]
        assert read_series(data_file) == stats.coverage


class TestMultiWorker:
    def test_two_workers_complete(self, tmp_path):
        config = make_config(tmp_path, workers=2, max_executions=16)
        stats = run_campaign(config)
        assert stats.executions == 16
        assert stats.executions == sum(stats.classification_counts().values())
