"""Data model for weighted EBNF grammars and their derivation trees."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Lit:
    """A quoted terminal literal."""

    text: str


@dataclass(frozen=True)
class TokenRef:
    """Reference to a lexer token definition (identifier, integer, ...)."""

    name: str


@dataclass(frozen=True)
class RuleRef:
    """Reference to another grammar rule."""

    name: str


@dataclass(frozen=True)
class Group:
    """Parenthesised group with an EBNF suffix: ``?``, ``*`` or ``+``."""

    kind: str  # one of "?", "*", "+"
    alts: tuple["Alternative", ...]


Symbol = Union[Lit, TokenRef, RuleRef, Group]


@dataclass(frozen=True)
class Alternative:
    """One right-hand-side option of a rule. Empty symbol list = epsilon."""

    symbols: tuple[Symbol, ...]
    weight: int = 1


@dataclass(frozen=True)
class CharClass:
    """One atom of a token pattern: a set of characters plus a quantifier."""

    chars: str
    quant: str  # "" (exactly one), "?", "*" or "+"


@dataclass(frozen=True)
class TokenDef:
    """Lexer token: either a fixed literal or a character-class pattern."""

    name: str
    pattern: str
    atoms: tuple[CharClass, ...]  # empty iff the def is a plain literal
    literal: str | None = None


@dataclass
class Grammar:
    """A validated weighted context-free grammar.

    Immutable after construction (by convention; nothing mutates it), so a
    single instance is safely shared across worker threads.
    """

    rules: dict[str, list[Alternative]]
    start: str
    token_defs: dict[str, TokenDef]
    # Derived at parse time:
    literals: tuple[str, ...] = field(default_factory=tuple)
    completion_depth: dict[str, int] = field(default_factory=dict)
    overshoot: int = 0  # max completion depth over all rules

    def quoted_literals(self) -> list[bytes]:
        """All quoted terminals, as a mutation dictionary."""
        return [lit.encode("utf-8") for lit in self.literals]


@dataclass
class DerivationTree:
    """Concrete derivation: the unit of grammar-aware mutation.

    kind is "rule" (label = rule name, has children) or "token"/"literal"
    (label = leaf text). depth follows 1 + max(child depths), 0 for nodes
    without children.
    """

    kind: str
    label: str
    children: list["DerivationTree"] = field(default_factory=list)
    depth: int = 0

    def serialize(self) -> str:
        """In-order leaf concatenation with single-space separation."""
        return " ".join(self.leaf_texts())

    def leaf_texts(self) -> list[str]:
        out: list[str] = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node.kind == "rule":
                stack.extend(reversed(node.children))
            else:
                out.append(node.label)
        return out

    def rule_nodes(self) -> list["DerivationTree"]:
        """All rule nodes in pre-order, root included."""
        out = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node.kind == "rule":
                out.append(node)
                stack.extend(reversed(node.children))
        return out

    def clone(self) -> "DerivationTree":
        return DerivationTree(
            self.kind,
            self.label,
            [c.clone() for c in self.children],
            self.depth,
        )


def recompute_depth(node: DerivationTree) -> int:
    """Recompute ``depth`` bottom-up for ``node`` and its subtree."""
    if not node.children:
        node.depth = 0
        return 0
    node.depth = 1 + max(recompute_depth(c) for c in node.children)
    return node.depth


class GrammarError(ValueError):
    """Raised for an invalid grammar file; names the first offending line."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
