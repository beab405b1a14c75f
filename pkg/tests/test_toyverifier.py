"""Toy verifier: phase structure, seeded bugs, CLI contract, coverage."""

import os
import subprocess
import sys

import pytest

from verifuzz.grammar import generate
from verifuzz.mutator import mutate_bytes
from verifuzz.rng import derive_seed
from verifuzz.runner import parse_stack_trace
from verifuzz.toyverifier import (
    BUG_NAMES,
    COUNTER_IDS,
    check,
    parse_toggles,
    phase_reached,
)
from verifuzz.toyverifier.counters import _LITERALS
from verifuzz.triage import bucket_hash

# Canonical triggers, straight from the seeded-bug catalog.
CANONICAL = {
    "B1": "enum Empty {\n}",
    "B2": "void ___() {\n}",
    "B3": "class Three {\n  run {\n    label sixty ;\n  }\n}",
    "B4": "requires \\old ( true ) ;\nvoid example ( ) { }",
    "B5": "void example ( ) {\n  lock null ;\n}",
    "B6": "void spork ( ) {\n  fork null ;\n}",
    "B7": "void func_2147483648 ( ) {\n}",
    "B8": "void x ( ) {\n  sequential {\n  }\n}",
}

CRASH_PHASE = {
    "B1": "resolve",
    "B2": "resolve",
    "B3": "resolve",
    "B4": "encode",
    "B5": "typecheck",
    "B6": "typecheck",
    "B7": "resolve",
    "B8": "encode",
}


class TestSeededBugs:
    @pytest.mark.parametrize("bug", BUG_NAMES)
    def test_trigger_crashes_iff_toggled(self, bug):
        text = CANONICAL[bug]
        on = check(text, {bug})
        assert on.status == "crash" and on.bug == bug
        assert on.phase == CRASH_PHASE[bug]
        off = check(text, set())
        assert off.status != "crash"

    @pytest.mark.parametrize("bug", BUG_NAMES)
    def test_other_toggles_do_not_fire(self, bug):
        others = set(BUG_NAMES) - {bug}
        result = check(CANONICAL[bug], others)
        assert result.bug != bug

    def test_eight_distinct_bucket_hashes(self):
        hashes = set()
        for bug in BUG_NAMES:
            result = check(CANONICAL[bug], {bug})
            trace = parse_stack_trace(result.trace)
            assert trace is not None and len(trace.frames) >= 3
            hashes.add(bucket_hash(trace))
        assert len(hashes) == 8

    def test_b1_trace_shape(self):
        result = check(CANONICAL["B1"], {"B1"})
        trace = parse_stack_trace(result.trace)
        assert trace.exception_name == "EmptyCollectionException"
        assert any(
            f.class_name == "toy.resolve.EnumChecker" and f.method_name == "members"
            for f in trace.frames
        )

    def test_b7_numberformat_name(self):
        result = check(CANONICAL["B7"], {"B7"})
        assert "NumberFormatException" in result.trace

    def test_unknown_toggle_rejected(self):
        with pytest.raises(ValueError, match="unknown bug name"):
            parse_toggles("B1,B9")


class TestPhases:
    def test_random_bytes_stop_early(self):
        assert phase_reached("\x00\x01\x02") == "lex"
        assert phase_reached("class class (") == "parse"

    def test_grammar_sentence_reaches_parse(self, minipvl_grammar):
        for seed in range(50):
            sentence = generate(minipvl_grammar, seed, 10).serialize()
            assert phase_reached(sentence) not in ("lex",)
            result = check(sentence, set())
            if result.status == "error":
                assert "lex:" not in result.diagnostic
                assert "parse:" not in result.diagnostic

    def test_valid_program_reaches_encode(self):
        text = "class C0 { int f0 ; void m0 ( ) { int v0 = 1 ; assert true ; } }"
        assert phase_reached(text) == "encode"
        assert check(text, set()).status == "verified"

    def test_diagnostic_format(self):
        result = check("void m ( ) { lock 5 ; }", set())
        assert result.status == "error"
        assert result.diagnostic.startswith("error: typecheck: ")
        assert " at 1:" in result.diagnostic

    def test_empty_input_is_parse_error(self):
        assert phase_reached("") == "parse"

    def test_result_outside_ensures_is_clean(self):
        result = check("requires \\result ; void m ( ) { }", set())
        assert result.status == "error" and "typecheck" in result.diagnostic

    def test_old_in_ensures_is_legal(self):
        assert check("ensures \\old ( true ) ; void m ( ) { }", set()).status == "verified"

    def test_no_crash_with_all_bugs_off_on_mixed_inputs(self, minipvl_grammar):
        # The toy's own robustness claim, fuzzed at a smaller scale here;
        # the 10k-input version runs in the acceptance suite.
        dictionary = minipvl_grammar.quoted_literals()
        crashes = 0
        for k in range(1500):
            seed = derive_seed(77, 0, k)
            if k % 3 == 0:
                data = mutate_bytes(b"", dictionary, seed)
            elif k % 3 == 1:
                base = generate(minipvl_grammar, seed, 8).serialize().encode()
                data = mutate_bytes(base, dictionary, seed)
            else:
                data = generate(minipvl_grammar, seed, 10).serialize().encode()
            result = check(data.decode("utf-8", errors="replace"), set())
            if result.status == "crash":
                crashes += 1
        assert crashes == 0


class TestCoverageCounters:
    def test_counter_table_matches_grammar_literals(self, minipvl_grammar):
        assert set(_LITERALS) == set(minipvl_grammar.literals)
        assert set(minipvl_grammar.token_defs) == {"ID", "INT"}

    def test_counter_ids_stable_and_distinct(self):
        ids = list(COUNTER_IDS.values())
        assert len(ids) == len(set(ids))
        assert COUNTER_IDS["phase:lex"] == 1
        assert COUNTER_IDS["phase:encode"] == 5

    def test_phase_entry_counters_subset_relation(self):
        shallow = check("\x00garbage", set()).coverage
        deep = check("class C0 { void m0 ( ) { assert true ; } }", set()).coverage
        phase_ids = {COUNTER_IDS[f"phase:{p}"] for p in ("lex", "parse", "resolve", "typecheck", "encode")}
        assert phase_ids <= deep
        assert (shallow & phase_ids) < (deep & phase_ids)


def run_cli(args, text=None, env_extra=None, tmp_path=None):
    env = os.environ.copy()
    env.pop("TOY_BUGS", None)
    env.pop("AVALANCHE_COV", None)
    if env_extra:
        env.update(env_extra)
    if text is not None:
        input_file = tmp_path / "input.pvl"
        input_file.write_text(text, encoding="utf-8")
        args = [str(input_file)] + args
    return subprocess.run(
        [sys.executable, "-m", "verifuzz.toyverifier.cli", *args],
        capture_output=True,
        text=True,
        env=env,
        timeout=30,
    )


class TestCli:
    def test_verified_exit_zero(self, tmp_path):
        proc = run_cli(["--skip-backend"], "void m ( ) { }", tmp_path=tmp_path)
        assert proc.returncode == 0
        assert "verified (backend skipped)" in proc.stdout

    def test_clean_error_exit_one(self, tmp_path):
        proc = run_cli([], "void m ( ) { assert 5 ; }", tmp_path=tmp_path)
        assert proc.returncode == 1
        assert proc.stderr.startswith("error: typecheck:")

    def test_crash_exit_seventy_with_trace(self, tmp_path):
        proc = run_cli(["--bugs", "B1"], "enum Empty { }", tmp_path=tmp_path)
        assert proc.returncode == 70
        trace = parse_stack_trace(proc.stderr)
        assert trace is not None and trace.exception_name == "EmptyCollectionException"

    def test_env_var_toggles(self, tmp_path):
        proc = run_cli([], "enum Empty { }", env_extra={"TOY_BUGS": "B1"}, tmp_path=tmp_path)
        assert proc.returncode == 70

    def test_flag_overrides_env(self, tmp_path):
        proc = run_cli(["--bugs", ""], "enum Empty { }", env_extra={"TOY_BUGS": "B1"}, tmp_path=tmp_path)
        assert proc.returncode == 1  # clean resolve diagnostic, bug disabled

    def test_unknown_bug_exit_two(self, tmp_path):
        proc = run_cli(["--bugs", "B42"], "void m ( ) { }", tmp_path=tmp_path)
        assert proc.returncode == 2
        assert "unknown bug name" in proc.stderr

    def test_missing_file_exit_two(self):
        proc = run_cli(["/nonexistent/input.pvl"])
        assert proc.returncode == 2

    def test_coverage_file_written_even_on_crash(self, tmp_path):
        cov_path = tmp_path / "cov.txt"
        proc = run_cli(
            ["--bugs", "B1"],
            "enum Empty { }",
            env_extra={"AVALANCHE_COV": str(cov_path)},
            tmp_path=tmp_path,
        )
        assert proc.returncode == 70
        ids = {int(line) for line in cov_path.read_text().splitlines()}
        assert COUNTER_IDS["phase:lex"] in ids
        assert COUNTER_IDS["phase:resolve"] in ids

    def test_dump_counters(self, tmp_path):
        proc = run_cli(["--dump-counters"])
        assert proc.returncode == 0
        lines = proc.stdout.strip().splitlines()
        assert len(lines) == len(COUNTER_IDS)
        assert lines[0].split("\t") == ["1", "phase:lex"]

    def test_version(self):
        proc = run_cli(["--version"])
        assert proc.returncode == 0 and "toy-verifier" in proc.stdout
