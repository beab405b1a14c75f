"""Delta-debugging reduction of crashing inputs.

Classic ddmin over lines, tokens or characters: the result still satisfies
the predicate (same crash bucket) and is 1-minimal at the chosen
granularity unless the evaluation budget ran out first, in which case the
best reduction so far is returned and flagged non-minimal.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable

GRANULARITIES = ("line", "token", "char")
DEFAULT_BUDGET = 2000

Predicate = Callable[[bytes], bool]


@dataclass
class MinimizeResult:
    data: bytes
    evaluations: int  # every predicate invocation, confirmations included
    minimal: bool  # False when the budget was exhausted
    stable: bool  # final 3-of-3 confirmation passed
    size_before: int
    size_after: int
    granularity: str

    def to_dict(self) -> dict:
        return {
            "evaluations": self.evaluations,
            "minimal": self.minimal,
            "stable": self.stable,
            "size_before": self.size_before,
            "size_after": self.size_after,
            "granularity": self.granularity,
        }


class _BudgetExhausted(Exception):
    pass


class _Session:
    """Counts and caches predicate evaluations; tracks the best reduction."""

    def __init__(self, predicate: Predicate, join, budget: int) -> None:
        self.predicate = predicate
        self.join = join
        self.budget = budget
        self.evaluations = 0
        self.cache: dict[str, bool] = {}
        self.best: list[bytes] | None = None

    def invoke(self, data: bytes) -> bool:
        self.evaluations += 1
        return bool(self.predicate(data))

    def holds(self, units: list[bytes]) -> bool:
        data = self.join(units)
        key = hashlib.sha256(data).hexdigest()
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if self.evaluations >= self.budget:
            raise _BudgetExhausted()
        result = self.invoke(data)
        self.cache[key] = result
        return result


def split_units(data: bytes, granularity: str, grammar=None) -> tuple[list[bytes], Callable]:
    """Split ``data`` into reduction units and return (units, join).

    Token granularity uses the grammar's lexer when one is configured and
    the input lexes; otherwise it falls back to whitespace splitting.
    Joining tokens with single spaces is loss-free for whitespace-
    insensitive languages like mini-PVL.
    """
    if granularity == "line":
        text = data.decode("utf-8", errors="surrogateescape")
        units = [ln.encode("utf-8", errors="surrogateescape") for ln in text.splitlines()]
        return units, lambda us: b"\n".join(us)
    if granularity == "token":
        if grammar is not None:
            from .grammar.lexing import LexError, Lexer

            try:
                toks = Lexer(grammar).tokenize(data.decode("utf-8", errors="replace"))
                return [t.text.encode("utf-8") for t in toks], lambda us: b" ".join(us)
            except LexError:
                pass
        return data.split(), lambda us: b" ".join(us)
    if granularity == "char":
        return [bytes([b]) for b in data], lambda us: b"".join(us)
    raise ValueError(f"unknown granularity {granularity!r}")


def _ddmin(units: list[bytes], session: _Session) -> list[bytes]:
    """Zeller's ddmin. Returns a 1-minimal sublist satisfying the predicate.

    Invariant: the predicate holds on ``units`` at every loop entry. The
    loop ends once every single-unit removal has been tried and failed.
    """
    session.best = units
    n = 2
    while len(units) >= 2:
        chunk = max(1, len(units) // n)
        subsets = [units[i : i + chunk] for i in range(0, len(units), chunk)]
        reduced = False

        for subset in subsets:
            if len(subset) < len(units) and session.holds(subset):
                units = session.best = subset
                n = 2
                reduced = True
                break
        if reduced:
            continue

        if n > 2 or len(subsets) > 2:
            for i in range(len(subsets)):
                complement = [u for j, s in enumerate(subsets) if j != i for u in s]
                if len(complement) < len(units) and session.holds(complement):
                    units = session.best = complement
                    n = max(2, n - 1)
                    reduced = True
                    break
            if reduced:
                continue

        if n >= len(units):
            break
        n = min(len(units), n * 2)
    return units


def minimize(
    data: bytes,
    predicate: Predicate,
    granularity: str = "line",
    *,
    budget: int = DEFAULT_BUDGET,
    grammar=None,
) -> MinimizeResult:
    """Reduce ``data`` while the predicate keeps holding.

    The predicate must hold on the original input (contract violation
    otherwise). Each candidate is tested once; the final result is
    confirmed with three more runs and flagged unstable if any disagrees.
    """
    if granularity not in GRANULARITIES:
        raise ValueError(f"unknown granularity {granularity!r}")

    units, join = split_units(data, granularity, grammar)
    # Reserve evaluations for the contract check and the confirmation runs.
    session = _Session(predicate, join, max(1, budget - 4))

    if not session.invoke(data):
        raise ValueError("predicate does not hold on the original input")

    minimal = True
    result = data
    if units:
        try:
            if session.holds(units):
                units = _ddmin(units, session)
                result = join(units)
            else:
                # Reassembly at this granularity changes the input in a way
                # the predicate rejects; leave the original untouched.
                minimal = False
        except _BudgetExhausted:
            minimal = False
            assert session.best is not None
            result = join(session.best)

    stable = True
    for _ in range(3):
        if not session.invoke(result):
            stable = False
    return MinimizeResult(
        data=result,
        evaluations=session.evaluations,
        minimal=minimal and stable,
        stable=stable,
        size_before=len(data),
        size_after=len(result),
        granularity=granularity,
    )


def minimize_cascade(
    data: bytes,
    predicate: Predicate,
    *,
    budget: int = DEFAULT_BUDGET,
    grammar=None,
) -> MinimizeResult:
    """Line pass first, then token, then char: classic efficiency ordering."""
    total_evals = 0
    current = data
    last: MinimizeResult | None = None
    for granularity in GRANULARITIES:
        remaining = budget - total_evals
        if remaining <= 8:
            break
        step = minimize(current, predicate, granularity, budget=remaining, grammar=grammar)
        total_evals += step.evaluations
        current = step.data
        last = step
    assert last is not None
    return MinimizeResult(
        data=current,
        evaluations=total_evals,
        minimal=last.minimal,
        stable=last.stable,
        size_before=len(data),
        size_after=len(current),
        granularity="cascade",
    )
