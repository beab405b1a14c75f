"""Toy mini-PVL verifier: the desk-scale fuzzing target with seeded bugs."""

from .bugs import BUG_NAMES, BUGS, parse_toggles, render_trace
from .counters import COUNTER_IDS, TOTAL_COUNTERS
from .phases import GRAMMAR_PATH, CheckResult, check, get_parser, phase_reached

__all__ = [
    "BUG_NAMES",
    "BUGS",
    "COUNTER_IDS",
    "CheckResult",
    "GRAMMAR_PATH",
    "TOTAL_COUNTERS",
    "check",
    "get_parser",
    "parse_toggles",
    "phase_reached",
    "render_trace",
]
