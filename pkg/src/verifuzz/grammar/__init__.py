"""Weighted-EBNF grammars: file format, generation, reparsing, mutation."""

from .earley import ParseError, ParseNode, Parser
from .lexing import LexError, Lexer, Token
from .model import (
    Alternative,
    DerivationTree,
    Grammar,
    GrammarError,
    Group,
    Lit,
    RuleRef,
    TokenRef,
)
from .mutate import mutate_tree
from .reader import load_grammar, parse_grammar
from .sampler import generate, generate_sentence

__all__ = [
    "Alternative",
    "DerivationTree",
    "Grammar",
    "GrammarError",
    "Group",
    "LexError",
    "Lexer",
    "Lit",
    "ParseError",
    "ParseNode",
    "Parser",
    "RuleRef",
    "Token",
    "TokenRef",
    "generate",
    "generate_sentence",
    "load_grammar",
    "mutate_tree",
    "parse_grammar",
]
