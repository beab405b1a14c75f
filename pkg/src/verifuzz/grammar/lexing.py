"""Grammar-driven lexer: tokenizes input text using the same grammar file
the generator consumes, so the two can never drift apart."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import Grammar


@dataclass(frozen=True)
class Token:
    kind: str  # token-def name, or the literal text for quoted terminals
    text: str
    line: int
    col: int
    is_literal: bool


class LexError(ValueError):
    def __init__(self, message: str, line: int, col: int) -> None:
        self.line = line
        self.col = col
        super().__init__(message)


class Lexer:
    """Longest-match lexer over the grammar's literals and token patterns.

    On equal match length a quoted literal wins over a token pattern, so
    keywords shadow identifiers of the same spelling (the generator
    resamples identifiers that collide with literals, keeping round trips
    exact).
    """

    def __init__(self, grammar: Grammar) -> None:
        self.literals = sorted(set(grammar.literals), key=len, reverse=True)
        self.patterns = [
            (name, re.compile(tdef.pattern))
            for name, tdef in grammar.token_defs.items()
            if tdef.literal is None
        ]

    def tokenize(self, text: str) -> list[Token]:
        toks: list[Token] = []
        i, line, col = 0, 1, 1
        n = len(text)
        while i < n:
            c = text[i]
            if c in " \t\r\n":
                if c == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                i += 1
                continue
            best_len = 0
            best_kind = ""
            best_is_lit = False
            for lit in self.literals:
                if len(lit) > best_len and text.startswith(lit, i):
                    best_len = len(lit)
                    best_kind = lit
                    best_is_lit = True
            for name, rx in self.patterns:
                m = rx.match(text, i)
                if m is not None and len(m.group(0)) > best_len:
                    best_len = len(m.group(0))
                    best_kind = name
                    best_is_lit = False
            if best_len == 0:
                raise LexError(f"unexpected character {c!r}", line, col)
            toks.append(Token(best_kind, text[i : i + best_len], line, col, best_is_lit))
            col += best_len
            i += best_len
        return toks
