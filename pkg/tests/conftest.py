from __future__ import annotations

import sys

import pytest

from verifuzz.runner import TargetSpec
from verifuzz.toyverifier import GRAMMAR_PATH


def toy_command(bugs: str = "") -> tuple[str, ...]:
    """Invoke the toy verifier through the current interpreter (PATH-proof)."""
    cmd = (sys.executable, "-m", "verifuzz.toyverifier.cli", "{input}")
    if bugs:
        cmd += ("--bugs", bugs)
    return cmd


ALL_BUGS = "B1,B2,B3,B4,B5,B6,B7,B8"


@pytest.fixture(scope="session")
def toy_spec_all_bugs() -> TargetSpec:
    return TargetSpec(command=toy_command(ALL_BUGS), timeout=10.0)


@pytest.fixture(scope="session")
def minipvl_grammar():
    from verifuzz.grammar import load_grammar

    return load_grammar(GRAMMAR_PATH)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of a run."""
    del exitstatus, config
    lines = []
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            if getattr(report, "when", "call") != "call":
                continue
            lines.append((nodeid.split("::")[-1], status.upper()))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status:<7} {name}")
