"""Reader for the weighted-EBNF grammar file format.

Format (UTF-8, ``#`` comments):

    start Program ;
    Program : ( Decl )+ ;
    Decl : 3* "class" ID Body | "enum" ID Body ;
    token ID : /[a-zA-Z_][a-zA-Z_0-9]*/ ;

A rule alternative is a sequence of quoted literals, rule names, token
names and ``( ... )?`` / ``( ... )*`` / ``( ... )+`` groups, optionally
prefixed by an integer weight ``n*``. Token definitions are either a
quoted literal or a character-class pattern limited to classes, ranges
and the ``* + ?`` quantifiers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Alternative,
    CharClass,
    Grammar,
    GrammarError,
    Group,
    Lit,
    RuleRef,
    Symbol,
    TokenDef,
    TokenRef,
)

_NAME_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_NAME_CONT = _NAME_START | set("0123456789")
_PUNCT = set(":;|()?*+")

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # name | int | str | regex | punct
    text: str
    line: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, line = 0, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
        elif c in " \t\r":
            i += 1
        elif c == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif c in _NAME_START:
            j = i
            while j < n and text[j] in _NAME_CONT:
                j += 1
            toks.append(_Tok("name", text[i:j], line))
            i = j
        elif c.isdigit() or (c == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Tok("int", text[i:j], line))
            i = j
        elif c == '"':
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\\":
                    j += 1
                    if j >= n:
                        raise GrammarError("unterminated string literal", line)
                    buf.append(_ESCAPES.get(text[j], text[j]))
                else:
                    if text[j] == "\n":
                        raise GrammarError("unterminated string literal", line)
                    buf.append(text[j])
                j += 1
            if j >= n:
                raise GrammarError("unterminated string literal", line)
            toks.append(_Tok("str", "".join(buf), line))
            i = j + 1
        elif c == "/":
            j = i + 1
            buf = []
            while j < n and text[j] != "/":
                if text[j] == "\\" and j + 1 < n and text[j + 1] == "/":
                    buf.append("/")
                    j += 2
                    continue
                if text[j] == "\n":
                    raise GrammarError("unterminated token pattern", line)
                buf.append(text[j])
                j += 1
            if j >= n:
                raise GrammarError("unterminated token pattern", line)
            toks.append(_Tok("regex", "".join(buf), line))
            i = j + 1
        elif c in _PUNCT:
            toks.append(_Tok("punct", c, line))
            i += 1
        else:
            raise GrammarError(f"unexpected character {c!r}", line)
    return toks


def _parse_char_class(pattern: str, line: int) -> tuple[CharClass, ...]:
    """Parse the supported regex subset into sampleable atoms."""
    atoms: list[CharClass] = []
    i, n = 0, len(pattern)
    while i < n:
        c = pattern[i]
        if c == "[":
            j = i + 1
            chars: list[str] = []
            while j < n and pattern[j] != "]":
                if pattern[j] == "\\" and j + 1 < n:
                    chars.append(pattern[j + 1])
                    j += 2
                    continue
                if j + 2 < n and pattern[j + 1] == "-" and pattern[j + 2] != "]":
                    lo, hi = pattern[j], pattern[j + 2]
                    if ord(lo) > ord(hi):
                        raise GrammarError(
                            f"inverted range {lo}-{hi} in token pattern", line
                        )
                    chars.extend(chr(k) for k in range(ord(lo), ord(hi) + 1))
                    j += 3
                    continue
                chars.append(pattern[j])
                j += 1
            if j >= n:
                raise GrammarError("unterminated character class", line)
            if not chars:
                raise GrammarError("empty character class", line)
            atoms.append(CharClass("".join(dict.fromkeys(chars)), ""))
            i = j + 1
        elif c in "*+?":
            if not atoms or atoms[-1].quant:
                raise GrammarError(f"dangling quantifier {c!r} in token pattern", line)
            atoms[-1] = CharClass(atoms[-1].chars, c)
            i += 1
        elif c == "\\" and i + 1 < n:
            atoms.append(CharClass(pattern[i + 1], ""))
            i += 2
        elif c in ".|(){}^$":
            raise GrammarError(
                f"unsupported regex construct {c!r} in token pattern "
                "(only classes, ranges, *, +, ? are allowed)",
                line,
            )
        else:
            atoms.append(CharClass(c, ""))
            i += 1
    if not atoms:
        raise GrammarError("empty token pattern", line)
    return tuple(atoms)


class _Parser:
    def __init__(self, toks: list[_Tok]) -> None:
        self.toks = toks
        self.pos = 0

    def peek(self) -> _Tok | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            last = self.toks[-1].line if self.toks else 1
            raise GrammarError("unexpected end of grammar file", last)
        self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise GrammarError(f"expected {want!r}, found {tok.text!r}", tok.line)
        return tok

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "punct" and tok.text == text

    def parse_alternatives(self) -> list[Alternative]:
        alts = [self.parse_alternative()]
        while self.at_punct("|"):
            self.next()
            alts.append(self.parse_alternative())
        return alts

    def parse_alternative(self) -> Alternative:
        weight = 1
        tok = self.peek()
        if tok is not None and tok.kind == "int":
            nxt = self.toks[self.pos + 1] if self.pos + 1 < len(self.toks) else None
            if nxt is not None and nxt.kind == "punct" and nxt.text == "*":
                self.next()
                self.next()
                weight = int(tok.text)
                if weight <= 0:
                    raise GrammarError(
                        f"alternative weight must be positive, got {weight}", tok.line
                    )
        symbols: list[Symbol] = []
        while True:
            tok = self.peek()
            if tok is None or (
                tok.kind == "punct" and tok.text in (";", "|", ")")
            ):
                break
            symbols.append(self.parse_symbol())
        return Alternative(tuple(symbols), weight)

    def parse_symbol(self) -> Symbol:
        tok = self.next()
        if tok.kind == "str":
            if not tok.text:
                raise GrammarError("empty literal", tok.line)
            return Lit(tok.text)
        if tok.kind == "name":
            # Token vs rule reference resolved after the whole file is read.
            return RuleRef(tok.text)
        if tok.kind == "punct" and tok.text == "(":
            alts = self.parse_alternatives()
            self.expect("punct", ")")
            suffix = self.next()
            if suffix.kind != "punct" or suffix.text not in "?*+":
                raise GrammarError(
                    f"group must be followed by ?, * or +, found {suffix.text!r}",
                    suffix.line,
                )
            return Group(suffix.text, tuple(alts))
        raise GrammarError(f"unexpected token {tok.text!r}", tok.line)


def _resolve_refs(
    alts: list[Alternative], rules: dict, tokens: dict, line_of: dict[str, int]
) -> list[Alternative]:
    def fix_symbol(sym: Symbol) -> Symbol:
        if isinstance(sym, RuleRef):
            if sym.name in rules:
                return sym
            if sym.name in tokens:
                return TokenRef(sym.name)
            line = line_of.get(sym.name)
            raise GrammarError(f"undefined nonterminal {sym.name}", line)
        if isinstance(sym, Group):
            return Group(sym.kind, tuple(fix_alt(a) for a in sym.alts))
        return sym

    def fix_alt(alt: Alternative) -> Alternative:
        return Alternative(tuple(fix_symbol(s) for s in alt.symbols), alt.weight)

    return [fix_alt(a) for a in alts]


_INF = 1 << 30


def _completion_depths(rules: dict[str, list[Alternative]]) -> dict[str, int]:
    """Fixed-point of the shortest-completion height per rule.

    The value is an upper bound on the height of the subtree produced when
    the generator expands the rule in shortest-completion mode. Rules that
    never converge have no finite derivation.
    """
    comp = {name: _INF for name in rules}

    def sym_depth(sym: Symbol) -> int:
        if isinstance(sym, (Lit, TokenRef)):
            return 0
        if isinstance(sym, RuleRef):
            return comp[sym.name]
        if sym.kind in "?*":
            return 0  # zero occurrences contribute no children
        best = _INF
        for alt in sym.alts:
            if not alt.symbols:
                best = 0
                break
            d = max(sym_depth(s) for s in alt.symbols)
            best = min(best, d)
        return best

    def alt_depth(alt: Alternative) -> int:
        if not alt.symbols:
            return 0
        d = max(sym_depth(s) for s in alt.symbols)
        return _INF if d >= _INF else 1 + d

    changed = True
    while changed:
        changed = False
        for name, alts in rules.items():
            best = min(alt_depth(a) for a in alts)
            if best < comp[name]:
                comp[name] = best
                changed = True
    return comp


def parse_grammar(text: str) -> Grammar:
    """Parse and validate a grammar file, or raise GrammarError."""
    toks = _tokenize(text)
    parser = _Parser(toks)

    start: str | None = None
    start_line: int | None = None
    raw_rules: dict[str, list[Alternative]] = {}
    token_defs: dict[str, TokenDef] = {}
    def_line: dict[str, int] = {}
    ref_line: dict[str, int] = {}

    while parser.peek() is not None:
        tok = parser.next()
        if tok.kind == "name" and tok.text == "start":
            name = parser.expect("name")
            if start is not None:
                raise GrammarError("duplicate start declaration", name.line)
            start, start_line = name.text, name.line
            parser.expect("punct", ";")
        elif tok.kind == "name" and tok.text == "token":
            name = parser.expect("name")
            if name.text in token_defs or name.text in raw_rules:
                raise GrammarError(f"duplicate definition of {name.text}", name.line)
            parser.expect("punct", ":")
            body = parser.next()
            if body.kind == "regex":
                atoms = _parse_char_class(body.text, body.line)
                token_defs[name.text] = TokenDef(name.text, body.text, atoms)
            elif body.kind == "str":
                token_defs[name.text] = TokenDef(name.text, body.text, (), body.text)
            else:
                raise GrammarError(
                    f"token body must be /pattern/ or a literal, found {body.text!r}",
                    body.line,
                )
            parser.expect("punct", ";")
            def_line[name.text] = name.line
        elif tok.kind == "name":
            if tok.text in raw_rules or tok.text in token_defs:
                raise GrammarError(f"duplicate rule {tok.text}", tok.line)
            parser.expect("punct", ":")
            mark = parser.pos
            alts = parser.parse_alternatives()
            parser.expect("punct", ";")
            raw_rules[tok.text] = alts
            def_line[tok.text] = tok.line
            for t in parser.toks[mark : parser.pos]:
                if t.kind == "name" and t.text not in ref_line:
                    ref_line[t.text] = t.line
        else:
            raise GrammarError(f"unexpected token {tok.text!r}", tok.line)

    if start is None:
        raise GrammarError("missing start rule declaration")
    if not raw_rules:
        raise GrammarError("grammar defines no rules")
    if start not in raw_rules:
        raise GrammarError(f"start rule {start} is not defined", start_line)

    rules = {
        name: _resolve_refs(alts, raw_rules, token_defs, ref_line)
        for name, alts in raw_rules.items()
    }

    comp = _completion_depths(rules)
    for name, depth in comp.items():
        if depth >= _INF:
            raise GrammarError(
                f"rule {name} has no finite derivation (all alternatives recurse)",
                def_line.get(name),
            )

    literals: list[str] = []

    def collect_lits(alts: list[Alternative]) -> None:
        for alt in alts:
            for sym in alt.symbols:
                if isinstance(sym, Lit) and sym.text not in literals:
                    literals.append(sym.text)
                elif isinstance(sym, Group):
                    collect_lits(list(sym.alts))

    for alts in rules.values():
        collect_lits(alts)
    for tdef in token_defs.values():
        if tdef.literal is not None and tdef.literal not in literals:
            literals.append(tdef.literal)

    return Grammar(
        rules=rules,
        start=start,
        token_defs=token_defs,
        literals=tuple(literals),
        completion_depth=comp,
        overshoot=max(comp.values()),
    )


def load_grammar(path) -> Grammar:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_grammar(fh.read())
