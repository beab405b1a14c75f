"""Seeded bug catalog for the toy verifier.

Each bug is individually toggleable (``TOY_BUGS`` env var or ``--bugs``)
and, when triggered, aborts the run with a fixed managed-runtime-style
stack trace and exit code 70. The frame sequences are pairwise distinct so
every bug lands in its own crash bucket.
"""

from __future__ import annotations

from dataclasses import dataclass

BUG_NAMES = ("B1", "B2", "B3", "B4", "B5", "B6", "B7", "B8")


@dataclass(frozen=True)
class BugSpec:
    name: str
    summary: str
    exception: str
    message: str
    frames: tuple[tuple[str, str, str, int], ...]  # (class, method, file, line)


_COMMON_TAIL = (
    ("toy.Main", "run", "Main.scala", 44),
    ("toy.Main", "main", "Main.scala", 19),
)

BUGS: dict[str, BugSpec] = {
    spec.name: spec
    for spec in (
        BugSpec(
            "B1",
            "enum with no members crashes the resolver",
            "EmptyCollectionException",
            "head of empty list",
            (
                ("toy.util.NonEmpty", "head", "NonEmpty.scala", 14),
                ("toy.resolve.EnumChecker", "members", "EnumChecker.scala", 41),
                ("toy.resolve.EnumChecker", "check", "EnumChecker.scala", 27),
                ("toy.resolve.Resolver", "declarations", "Resolver.scala", 88),
                ("toy.resolve.Resolver", "resolve", "Resolver.scala", 31),
            )
            + _COMMON_TAIL,
        ),
        BugSpec(
            "B2",
            "all-underscore name crashes the namer",
            "StringIndexOutOfBoundsException",
            "begin 0, end -1, length 0",
            (
                ("toy.resolve.Namer", "splitParts", "Namer.scala", 77),
                ("toy.resolve.Namer", "mangle", "Namer.scala", 58),
                ("toy.resolve.Namer", "declare", "Namer.scala", 33),
                ("toy.resolve.Resolver", "declarations", "Resolver.scala", 84),
                ("toy.resolve.Resolver", "resolve", "Resolver.scala", 31),
            )
            + _COMMON_TAIL,
        ),
        BugSpec(
            "B3",
            "label declaration in a run block crashes scope handling",
            "NoScopeException",
            "no label scope in this context",
            (
                ("toy.resolve.Scopes", "labelScope", "Scopes.scala", 102),
                ("toy.resolve.LabelBinder", "bind", "LabelBinder.scala", 49),
                ("toy.resolve.LabelBinder", "statement", "LabelBinder.scala", 36),
                ("toy.resolve.Resolver", "bodies", "Resolver.scala", 95),
                ("toy.resolve.Resolver", "resolve", "Resolver.scala", 32),
            )
            + _COMMON_TAIL,
        ),
        BugSpec(
            "B4",
            "old expression in a precondition is rejected downstream",
            "NodeNotSupportedException",
            "old expression outside postcondition",
            (
                ("toy.encode.ContractLowering", "old", "ContractLowering.scala", 118),
                ("toy.encode.ContractLowering", "clause", "ContractLowering.scala", 73),
                ("toy.encode.Encoder", "contracts", "Encoder.scala", 57),
                ("toy.encode.Encoder", "encode", "Encoder.scala", 24),
            )
            + _COMMON_TAIL,
        ),
        BugSpec(
            "B5",
            "lock with a literal null slips past the null check",
            "UnreachableAfterTypeCheckException",
            "lock target was checked non-null",
            (
                ("toy.check.LockChecker", "target", "LockChecker.scala", 66),
                ("toy.check.LockChecker", "statement", "LockChecker.scala", 40),
                ("toy.check.TypeChecker", "body", "TypeChecker.scala", 129),
                ("toy.check.TypeChecker", "check", "TypeChecker.scala", 45),
            )
            + _COMMON_TAIL,
        ),
        BugSpec(
            "B6",
            "fork with a literal null is cast to a runnable",
            "ClassCastException",
            "toy.ast.NullLit cannot be cast to toy.ast.ClassType",
            (
                ("toy.check.ForkJoinChecker", "runnable", "ForkJoinChecker.scala", 83),
                ("toy.check.ForkJoinChecker", "statement", "ForkJoinChecker.scala", 51),
                ("toy.check.TypeChecker", "body", "TypeChecker.scala", 131),
                ("toy.check.TypeChecker", "check", "TypeChecker.scala", 45),
            )
            + _COMMON_TAIL,
        ),
        BugSpec(
            "B7",
            "numeric name suffix larger than a 32-bit int overflows the namer",
            "NumberFormatException",
            'For input string: "2147483648"',
            (
                ("toy.util.Ints", "parse", "Ints.scala", 22),
                ("toy.resolve.Namer", "trailingIndex", "Namer.scala", 91),
                ("toy.resolve.Namer", "freshen", "Namer.scala", 64),
                ("toy.resolve.Namer", "declare", "Namer.scala", 35),
                ("toy.resolve.Resolver", "declarations", "Resolver.scala", 84),
            )
            + _COMMON_TAIL,
        ),
        BugSpec(
            "B8",
            "empty sequential block takes the tail of an empty list",
            "UnsupportedOperationException",
            "tail of empty list",
            (
                ("toy.util.NonEmpty", "tail", "NonEmpty.scala", 19),
                ("toy.encode.SeqComposer", "chain", "SeqComposer.scala", 54),
                ("toy.encode.SeqComposer", "block", "SeqComposer.scala", 37),
                ("toy.encode.Encoder", "statements", "Encoder.scala", 71),
                ("toy.encode.Encoder", "encode", "Encoder.scala", 26),
            )
            + _COMMON_TAIL,
        ),
    )
}


class SeededCrash(Exception):
    """Raised when a toggled-on seeded bug is triggered."""

    def __init__(self, bug: str) -> None:
        self.bug = bug
        super().__init__(bug)


def render_trace(bug: str) -> str:
    spec = BUGS[bug]
    lines = [f"{spec.exception}: {spec.message}"]
    lines += [
        f"\tat {cls}.{method}({file}:{line})"
        for cls, method, file, line in spec.frames
    ]
    return "\n".join(lines) + "\n"


def parse_toggles(text: str) -> set[str]:
    """Parse a comma-separated toggle list; unknown names are fatal."""
    toggles: set[str] = set()
    for part in text.split(","):
        name = part.strip()
        if not name:
            continue
        if name not in BUGS:
            raise ValueError(f"unknown bug name {name!r} (known: {', '.join(BUG_NAMES)})")
        toggles.add(name)
    return toggles
