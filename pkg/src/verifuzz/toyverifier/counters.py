"""Static coverage counter table for the toy verifier.

Counter ids are assigned once, from the ordered name list below, and never
change between runs or builds, so coverage series are comparable across
campaigns. The table has four families:

  phase:<name>   entry into a front-end phase
  tok:<kind>     lexer produced a token of this kind (literal spelling,
                 or the token-definition name for ID / INT)
  rule:<name>    parser derived this grammar rule
  <phase>:<node> a resolve/check/encode handler visited this node kind

``toy-verifier --dump-counters`` prints the full id table.
"""

from __future__ import annotations

PHASES = ("lex", "parse", "resolve", "typecheck", "encode")

# Must list exactly the quoted literals of minipvl.g (order: appearance).
_LITERALS = (
    "class", "{", "}", "run", ";", "enum", ",", "requires", "ensures",
    "context_everywhere", "(", ")", "int", "bool", "void", "=", "if", "else",
    "loop_invariant", "while", "return", "label", "assert", "lock", "fork",
    "sequential", "!", "\\old", "+", "-", "*", "==", "!=", "<", "<=", "&&",
    "||", "true", "false", "null", "\\result",
)

_RULES = (
    "Program", "Declaration", "ClassDecl", "Member", "RunBlock", "FieldDecl",
    "EnumDecl", "MethodDecl", "Contract", "Param", "Type", "Block", "Stmt",
    "VarDecl", "Assign", "If", "While", "Return", "LabelStmt", "Assert",
    "LockStmt", "ForkStmt", "SeqBlock", "Expr", "Unary", "BinOp", "Atom",
)

_NODE_KINDS = (
    "ClassDecl", "EnumDecl", "MethodDecl", "FieldDecl", "RunBlock", "Param",
    "Contract", "VarDecl", "Assign", "If", "While", "Return", "Label",
    "Assert", "Lock", "Fork", "Block", "Sequential", "Name", "IntLit",
    "BoolLit", "NullLit", "Binary", "Not", "Old", "ResultRef",
)

_ORDERED: list[str] = (
    [f"phase:{p}" for p in PHASES]
    + [f"tok:{lit}" for lit in _LITERALS]
    + ["tok:ID", "tok:INT"]
    + [f"rule:{r}" for r in _RULES]
    + [f"resolve:{k}" for k in _NODE_KINDS]
    + [f"check:{k}" for k in _NODE_KINDS]
    + [f"encode:{k}" for k in _NODE_KINDS]
)

COUNTER_IDS: dict[str, int] = {name: i for i, name in enumerate(_ORDERED, start=1)}
TOTAL_COUNTERS = len(_ORDERED)


def dump_table() -> str:
    return "\n".join(f"{i}\t{name}" for name, i in COUNTER_IDS.items()) + "\n"


class CoverageRecorder:
    """Collects the distinct counter ids hit during one check run."""

    def __init__(self) -> None:
        self.hits: set[int] = set()

    def hit(self, name: str) -> None:
        cid = COUNTER_IDS.get(name)
        if cid is not None:
            self.hits.add(cid)

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for cid in sorted(self.hits):
                fh.write(f"{cid}\n")
