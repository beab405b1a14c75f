"""Earley reparser for the grammar format.

Parsing is chart-based so left recursion, ambiguity and epsilon rules are
all handled; the same grammar file drives generation and parsing. EBNF
groups are desugared into synthetic nonterminals whose tree nodes are
spliced away, so parse trees mirror the rule structure of the file.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Union

from .lexing import LexError, Lexer, Token
from .model import Grammar, Group, Lit, RuleRef, TokenRef


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int) -> None:
        self.line = line
        self.col = col
        super().__init__(message)


@dataclass
class ParseNode:
    rule: str
    children: list[Union["ParseNode", Token]] = field(default_factory=list)

    def child_rules(self, name: str) -> list["ParseNode"]:
        return [c for c in self.children if isinstance(c, ParseNode) and c.rule == name]

    def first_rule(self, name: str) -> "ParseNode | None":
        for c in self.children:
            if isinstance(c, ParseNode) and c.rule == name:
                return c
        return None

    def literal_texts(self) -> list[str]:
        return [c.text for c in self.children if isinstance(c, Token) and c.is_literal]

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        for c in self.children:
            if isinstance(c, Token):
                out.append(c)
            else:
                out.extend(c.tokens())
        return out

    def pos(self) -> tuple[int, int]:
        toks = self.tokens()
        return (toks[0].line, toks[0].col) if toks else (1, 1)


# Terminals are ("lit", text) or ("tok", name); nonterminals ("nt", name).
_Sym = tuple[str, str]
_MISS = object()


class _Cfg:
    """Plain CFG with EBNF groups expanded into synthetic nonterminals."""

    def __init__(self, grammar: Grammar) -> None:
        self.prods: list[tuple[str, tuple[_Sym, ...]]] = []
        self.by_lhs: dict[str, list[int]] = {}
        self.synthetic: set[str] = set()
        self._counter = 0
        for rule, alts in grammar.rules.items():
            for alt in alts:
                self._add(rule, self._convert(alt.symbols, rule))
        self.start = grammar.start

    def _add(self, lhs: str, rhs: list[_Sym]) -> None:
        self.prods.append((lhs, tuple(rhs)))
        self.by_lhs.setdefault(lhs, []).append(len(self.prods) - 1)

    def _convert(self, symbols, owner: str) -> list[_Sym]:
        out: list[_Sym] = []
        for sym in symbols:
            if isinstance(sym, Lit):
                out.append(("lit", sym.text))
            elif isinstance(sym, TokenRef):
                out.append(("tok", sym.name))
            elif isinstance(sym, RuleRef):
                out.append(("nt", sym.name))
            elif isinstance(sym, Group):
                out.append(("nt", self._make_group(sym, owner)))
        return out

    def _make_group(self, group: Group, owner: str) -> str:
        self._counter += 1
        name = f"{owner}%{self._counter}"
        self.synthetic.add(name)
        inner = [self._convert(alt.symbols, owner) for alt in group.alts]
        if group.kind == "?":
            for rhs in inner:
                self._add(name, rhs)
            self._add(name, [])
        elif group.kind == "*":
            for rhs in inner:
                self._add(name, rhs + [("nt", name)])
            self._add(name, [])
        else:  # "+"
            for rhs in inner:
                self._add(name, rhs + [("nt", name)])
            for rhs in inner:
                self._add(name, rhs)
        return name


def _matches(sym: _Sym, tok: Token) -> bool:
    kind, value = sym
    if kind == "lit":
        return tok.is_literal and tok.kind == value
    return (not tok.is_literal) and tok.kind == value


class Parser:
    """Reusable parser for one grammar; holds no per-parse state."""

    def __init__(self, grammar: Grammar) -> None:
        self.grammar = grammar
        self.lexer = Lexer(grammar)
        self.cfg = _Cfg(grammar)

    def parse_text(self, text: str) -> ParseNode:
        return self.parse_tokens(self.lexer.tokenize(text))

    def recognizes(self, text: str) -> bool:
        try:
            tokens = self.lexer.tokenize(text)
        except LexError:
            return False
        completed, _, _ = self._recognize(tokens)
        return (self.cfg.start, 0, len(tokens)) in completed

    def parse_tokens(self, tokens: list[Token]) -> ParseNode:
        completed, ends, furthest = self._recognize(tokens)
        if (self.cfg.start, 0, len(tokens)) not in completed:
            raise self._error(tokens, furthest)
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old_limit, 20000))
        try:
            return self._build(tokens, completed, ends)
        finally:
            sys.setrecursionlimit(old_limit)

    @staticmethod
    def _error(tokens: list[Token], furthest: int) -> ParseError:
        if furthest < len(tokens):
            tok = tokens[furthest]
            return ParseError(f"unexpected token {tok.text!r}", tok.line, tok.col)
        if tokens:
            last = tokens[-1]
            return ParseError(
                "unexpected end of input", last.line, last.col + len(last.text)
            )
        return ParseError("empty input", 1, 1)

    def _recognize(self, tokens: list[Token]):
        cfg = self.cfg
        prods = cfg.prods
        n = len(tokens)
        completed: dict[tuple[str, int, int], list[int]] = {}
        ends: dict[tuple[str, int], list[int]] = {}
        charts: list[list[tuple[int, int, int]]] = [[] for _ in range(n + 1)]
        seen: list[set[tuple[int, int, int]]] = [set() for _ in range(n + 1)]
        wants: list[dict[str, list[tuple[int, int, int]]]] = [{} for _ in range(n + 1)]
        furthest = 0

        def push(pos: int, item: tuple[int, int, int]) -> None:
            if item not in seen[pos]:
                seen[pos].add(item)
                charts[pos].append(item)

        for p in cfg.by_lhs.get(cfg.start, []):
            push(0, (p, 0, 0))

        for pos in range(n + 1):
            worklist = charts[pos]
            if worklist:
                furthest = pos
            i = 0
            while i < len(worklist):
                prod_id, dot, origin = worklist[i]
                i += 1
                lhs, rhs = prods[prod_id]
                if dot == len(rhs):
                    key = (lhs, origin, pos)
                    lst = completed.get(key)
                    if lst is None:
                        completed[key] = [prod_id]
                        ends.setdefault((lhs, origin), []).append(pos)
                    elif prod_id not in lst:
                        lst.append(prod_id)
                        continue  # waiters were already advanced for this key
                    else:
                        continue
                    for p2, d2, o2 in wants[origin].get(lhs, ()):
                        push(pos, (p2, d2 + 1, o2))
                    continue
                kind, value = rhs[dot]
                if kind == "nt":
                    wl = wants[pos].get(value)
                    if wl is None:
                        wl = wants[pos][value] = []
                        for p2 in cfg.by_lhs.get(value, []):
                            push(pos, (p2, 0, pos))
                    wl.append((prod_id, dot, origin))
                    # Epsilon fix: the nonterminal may already have completed
                    # over the empty span at this position.
                    if (value, pos, pos) in completed:
                        push(pos, (prod_id, dot + 1, origin))
                elif pos < n and _matches(rhs[dot], tokens[pos]):
                    push(pos + 1, (prod_id, dot + 1, origin))
        return completed, ends, furthest

    def _build(self, tokens, completed, ends) -> ParseNode:
        cfg = self.cfg
        prods = cfg.prods
        synthetic = cfg.synthetic
        ends_sorted = {k: sorted(v) for k, v in ends.items()}
        nt_memo: dict[tuple[str, int, int], ParseNode | None] = {}
        seq_fail: set[tuple[int, int, int, int]] = set()
        active: set[tuple[str, int, int]] = set()
        # Failures observed while a cycle guard was hit must not be cached:
        # they may be artifacts of the guard, not true dead ends.
        guard_hits = [0]

        def splice(children):
            out = []
            for c in children:
                if isinstance(c, ParseNode) and c.rule in synthetic:
                    out.extend(c.children)
                else:
                    out.append(c)
            return out

        def derive_nt(nt: str, i: int, j: int):
            key = (nt, i, j)
            hit = nt_memo.get(key, _MISS)
            if hit is not _MISS:
                return hit
            if key in active:
                guard_hits[0] += 1
                return None
            active.add(key)
            before = guard_hits[0]
            result = None
            for prod_id in completed.get(key, ()):
                children = match_seq(prod_id, 0, i, j)
                if children is not None:
                    result = ParseNode(nt, splice(children))
                    break
            active.discard(key)
            if result is not None or guard_hits[0] == before:
                nt_memo[key] = result
            return result

        def match_seq(prod_id: int, idx: int, pos: int, end: int):
            rhs = prods[prod_id][1]
            if idx == len(rhs):
                return [] if pos == end else None
            key = (prod_id, idx, pos, end)
            if key in seq_fail:
                return None
            before = guard_hits[0]
            kind, value = rhs[idx]
            if kind != "nt":
                if pos < end and _matches(rhs[idx], tokens[pos]):
                    rest = match_seq(prod_id, idx + 1, pos + 1, end)
                    if rest is not None:
                        return [tokens[pos], *rest]
            else:
                last = idx + 1 == len(rhs)
                for j in ends_sorted.get((value, pos), ()):
                    if j > end:
                        break
                    if last and j != end:
                        continue
                    child = derive_nt(value, pos, j)
                    if child is None:
                        continue
                    rest = match_seq(prod_id, idx + 1, j, end)
                    if rest is not None:
                        return [child, *rest]
            if guard_hits[0] == before:
                seq_fail.add(key)
            return None

        root = derive_nt(cfg.start, 0, len(tokens))
        if root is None:  # cannot happen when recognition succeeded
            raise ParseError("failed to extract a parse tree", 1, 1)
        return root
