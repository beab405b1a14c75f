"""Acceptance suite: one test per criterion, at its stated tolerance.

The bug-discovery-ordering criterion runs ten 300-second single-worker
campaigns (grammar and blind, master seeds 1..5), so a full run of this
module takes about an hour. The campaign matrix is built once in a
session fixture and shared by the criteria that consume it. Run with
``pytest tests/test_acceptance.py -v -s`` to watch campaign progress.
"""

import subprocess
import sys
import time

import pytest

from verifuzz.campaign import CampaignConfig, emit_report, read_series, run_campaign
from verifuzz.grammar import generate
from verifuzz.minimizer import minimize, split_units
from verifuzz.mutator import Corpus, dictionary_from_grammar, mutate_bytes
from verifuzz.rng import derive_seed
from verifuzz.runner import parse_stack_trace, run_once
from verifuzz.toyverifier import GRAMMAR_PATH, check, phase_reached
from verifuzz.triage import outcome_bucket_hash
from verifuzz.typedgen import TypedGenConfig, generate_typed

from test_runner import TRACE_FIXTURES

SEEDS = (1, 2, 3, 4, 5)

CANONICAL_TRIGGERS = {
    "B1": "enum Empty {\n}",
    "B2": "void ___() {\n}",
    "B3": "class Three {\n  run {\n    label sixty ;\n  }\n}",
    "B4": "requires \\old ( true ) ;\nvoid example ( ) { }",
    "B5": "void example ( ) {\n  lock null ;\n}",
    "B6": "void spork ( ) {\n  fork null ;\n}",
    "B7": "void func_2147483648 ( ) {\n}",
    "B8": "void x ( ) {\n  sequential {\n  }\n}",
}

# Contract constants: frame sequences and the published FNV-1a fold seed
# pin these bucket keys; stores must stay portable across runs and builds.
CANONICAL_HASHES = {
    "B1": "9cae6fc67f428010",
    "B2": "73b7f8e60aeff76b",
    "B3": "a9dda3fa9d1662d3",
    "B4": "d1c87298b487d1e8",
    "B5": "14c7ca91ed094a62",
    "B6": "c514bb286c79f54e",
    "B7": "570e738d39645cda",
    "B8": "50d8f7f367bcc890",
}


def log(message: str) -> None:
    print(f"[acceptance] {message}", file=sys.stderr, flush=True)


@pytest.fixture(scope="session")
def campaign_matrix(tmp_path_factory, toy_spec_all_bugs):
    """300 s grammar and blind campaigns plus short typed campaigns,
    single worker, master seeds 1..5."""
    root = tmp_path_factory.mktemp("campaign-matrix")
    plan = [("grammar", 300.0), ("blind", 300.0), ("typed", 12.0)]
    results = {}
    for seed in SEEDS:
        for strategy, budget in plan:
            out = root / f"{strategy}-{seed}"
            config = CampaignConfig(
                strategy=strategy,
                target=toy_spec_all_bugs,
                output_dir=out,
                time_budget=budget,
                master_seed=seed,
                workers=1,
                grammar_path=str(GRAMMAR_PATH) if strategy != "typed" else None,
                typedgen=TypedGenConfig() if strategy == "typed" else None,
            )
            log(f"campaign {strategy} seed={seed} budget={budget:.0f}s ...")
            started = time.monotonic()
            stats = run_campaign(config)
            log(
                f"  done in {time.monotonic() - started:.0f}s: "
                f"executions={stats.executions} buckets={stats.buckets_found} "
                f"covered={stats.covered}"
            )
            results[(strategy, seed)] = (out, stats)
    return results


def test_c01_reparse_closure(minipvl_grammar):
    started = time.monotonic()
    failures = []
    for seed in range(1000):
        sentence = generate(minipvl_grammar, seed, 12).serialize()
        result = check(sentence, set())
        parsed = not (
            result.status == "error"
            and (result.diagnostic.startswith("error: lex:")
                 or result.diagnostic.startswith("error: parse:"))
        )
        if not parsed:
            failures.append((seed, result.diagnostic))
    elapsed = time.monotonic() - started
    log(f"reparse closure: {1000 - len(failures)}/1000 in {elapsed:.1f}s")
    assert not failures, failures[:5]
    assert elapsed < 60.0


def test_c02_typed_validity():
    started = time.monotonic()
    failures = []
    for seed in range(1000):
        program = generate_typed(TypedGenConfig(seed=seed))
        if phase_reached(program) != "encode":
            failures.append(seed)
    elapsed = time.monotonic() - started
    log(f"typed validity: {1000 - len(failures)}/1000 in {elapsed:.1f}s")
    assert not failures, failures[:5]
    assert elapsed < 120.0


def test_c03_blind_shallowness(minipvl_grammar):
    # Replays the blind_coverage loop in-process: corpus accepts inputs
    # that covered new counters; everything else mutates bootstraps.
    dictionary = dictionary_from_grammar(minipvl_grammar)
    corpus = Corpus(dictionary=dictionary)
    covered: set[int] = set()
    shallow = 0
    total = 10_000
    from verifuzz.rng import Rng

    for k in range(total):
        seed = derive_seed(42, 0, k)
        base = corpus.pick(Rng(derive_seed(seed, 1)))
        data = mutate_bytes(base if base is not None else b"", dictionary, derive_seed(seed, 2))
        result = check(data.decode("utf-8", errors="replace"), set())
        if result.phase in ("lex", "parse") and result.status == "error":
            shallow += 1
        new = len(result.coverage - covered)
        covered |= result.coverage
        corpus.add_if_novel(data, new)
    fraction = shallow / total
    log(f"blind shallowness: {fraction:.1%} stopped at lex/parse "
        f"(corpus grew to {len(corpus)})")
    assert fraction >= 0.90


def test_c04_bug_discovery_ordering(campaign_matrix):
    grammar_wins = 0
    for seed in SEEDS:
        _, grammar_stats = campaign_matrix[("grammar", seed)]
        _, blind_stats = campaign_matrix[("blind", seed)]
        log(f"seed {seed}: grammar {grammar_stats.buckets_found} buckets, "
            f"blind {blind_stats.buckets_found} buckets")
        assert grammar_stats.buckets_found >= 5, (
            f"grammar strategy found only {grammar_stats.buckets_found} buckets "
            f"in 300s at master seed {seed}"
        )
        assert blind_stats.buckets_found >= 0
        if grammar_stats.buckets_found > blind_stats.buckets_found:
            grammar_wins += 1
    log(f"grammar strictly ahead in {grammar_wins}/5 trials")
    assert grammar_wins >= 4


def test_c05_typed_head_start(campaign_matrix):
    for seed in SEEDS:
        _, typed_stats = campaign_matrix[("typed", seed)]
        _, blind_stats = campaign_matrix[("blind", seed)]
        first = next((p for p in typed_stats.coverage if p.covered > 0), None)
        assert first is not None, f"typed campaign at seed {seed} never covered anything"
        assert first.t > 0
        blind_at_t = max(
            (p.covered for p in blind_stats.coverage if p.t <= first.t), default=0
        )
        log(f"seed {seed}: typed covered {first.covered} at t={first.t:.2f}s, "
            f"blind covered {blind_at_t} at same t")
        assert first.covered >= blind_at_t


def test_c06_dedup_soundness(toy_spec_all_bugs):
    def collect_hashes() -> dict[str, str]:
        hashes = {}
        for bug, text in CANONICAL_TRIGGERS.items():
            outcome = run_once(toy_spec_all_bugs, text.encode("utf-8"))
            assert outcome.classification == "crash", bug
            hashes[bug] = outcome_bucket_hash(outcome)
        return hashes

    first, second = collect_hashes(), collect_hashes()
    assert first == second  # fresh target processes, identical keys
    assert len(set(first.values())) == 8
    assert first == CANONICAL_HASHES  # pinned: stores are portable across builds
    # The hasher itself is restart-stable: recompute in a new interpreter.
    code = (
        "from verifuzz.runner import parse_stack_trace\n"
        "from verifuzz.triage import bucket_hash\n"
        "from verifuzz.toyverifier import check\n"
        f"trigger = {CANONICAL_TRIGGERS['B1']!r}\n"
        "result = check(trigger, {'B1'})\n"
        "print(bucket_hash(parse_stack_trace(result.trace)))\n"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, timeout=60
    )
    assert out.stdout.strip() == CANONICAL_HASHES["B1"]
    log(f"dedup soundness: 8 distinct stable hashes {sorted(first.values())}")


def test_c07_coverage_series_well_formed(campaign_matrix, tmp_path):
    checked = 0
    for (strategy, seed), (cdir, stats) in campaign_matrix.items():
        series = read_series(cdir / "coverage.dat")
        assert series, (strategy, seed)
        for a, b in zip(series, series[1:]):
            assert a.t <= b.t, (strategy, seed)
            assert a.covered <= b.covered, (strategy, seed)
        [data_file] = [
            p for p in emit_report([cdir], tmp_path / f"rep-{strategy}-{seed}")
            if p.name.endswith("_covered.dat")
        ]
        assert read_series(data_file) == series
        assert [(p.t, p.covered) for p in stats.coverage] == [
            (p.t, p.covered) for p in series
        ]
        checked += 1
    log(f"coverage series well-formed for {checked} campaigns")


def _padding_declarations(n: int) -> list[str]:
    return [f"void pad{i} ( ) {{ assert true ; }}" for i in range(n)]


def test_c08_minimizer_on_canonical_triggers(toy_spec_all_bugs, minipvl_grammar):
    # The documented cascade order (lines before tokens) is what keeps the
    # whole reduction inside the evaluation budget: token-level ddmin alone
    # on ~400 tokens of syntactic input needs orders of magnitude more runs.
    for bug, trigger in CANONICAL_TRIGGERS.items():
        pads = _padding_declarations(50)
        padded = "\n".join(pads[:25] + [trigger] + pads[25:]).encode("utf-8")
        want = CANONICAL_HASHES[bug]

        def predicate(data: bytes) -> bool:
            outcome = run_once(toy_spec_all_bugs, data)
            return (
                outcome.classification == "crash"
                and outcome_bucket_hash(outcome) == want
            )

        started = time.monotonic()
        line_pass = minimize(padded, predicate, "line", budget=2000)
        result = minimize(
            line_pass.data, predicate, "token",
            budget=2000 - line_pass.evaluations, grammar=minipvl_grammar,
        )
        evaluations = line_pass.evaluations + result.evaluations
        elapsed = time.monotonic() - started
        log(f"{bug}: {line_pass.size_before} -> {result.size_after} bytes, "
            f"{evaluations} evaluations in {elapsed:.0f}s")
        assert evaluations <= 2000
        assert result.minimal and result.stable
        assert predicate(result.data)

        # Exhaustive one-token-deletion oracle on the reduced input.
        units, join = split_units(result.data, "token", minipvl_grammar)
        for i in range(len(units)):
            candidate = join(units[:i] + units[i + 1 :])
            assert not predicate(candidate), (
                f"{bug}: deleting token {i} ({units[i]!r}) still crashes -> "
                "not 1-minimal"
            )
        if bug == "B1":
            assert b"enum" in result.data and b"{" in result.data and b"}" in result.data


def test_c09_trace_parsing_fixture_corpus():
    parsed = 0
    for name, text, expected in TRACE_FIXTURES:
        trace = parse_stack_trace(text)
        if expected is None:
            assert trace is None, name
            continue
        assert trace is not None and len(trace.frames) == expected, name
        assert parse_stack_trace(trace.render()) == trace, name
        parsed += 1
    log(f"trace corpus: {parsed} parseable fixtures, "
        f"{len(TRACE_FIXTURES) - parsed} rejected, round trips exact")
    assert len(TRACE_FIXTURES) == 20


def test_c10_campaign_determinism(tmp_path, toy_spec_all_bugs):
    sequences, bucket_sets = [], []
    for name in ("run-a", "run-b"):
        out = tmp_path / name
        config = CampaignConfig(
            strategy="grammar",
            target=toy_spec_all_bugs,
            output_dir=out,
            time_budget=600.0,
            master_seed=3,
            workers=1,
            grammar_path=str(GRAMMAR_PATH),
            max_executions=120,
        )
        stats = run_campaign(config)
        assert stats.executions == 120
        hashes = [
            line.split("sha256=")[1].split()[0]
            for line in (out / "log.txt").read_text().splitlines()
            if "sha256=" in line
        ]
        sequences.append(hashes)
        bucket_sets.append(sorted(p.name for p in (out / "crashes").iterdir()))
    assert sequences[0] == sequences[1]
    assert bucket_sets[0] == bucket_sets[1]
    log(f"determinism: {len(sequences[0])} identical inputs, "
        f"{len(bucket_sets[0])} identical buckets")
