"""Random sentence generation from a weighted grammar.

Every generated sentence is grammatically correct by construction: the
derivation tree records each choice, and serializing the tree reparses
under the originating grammar.
"""

from __future__ import annotations

from ..rng import Rng
from .model import (
    Alternative,
    DerivationTree,
    Grammar,
    Group,
    Lit,
    RuleRef,
    Symbol,
    TokenRef,
)

# Cap on elements drawn for a * or + group; keeps sentence size bounded
# independently of the depth limit.
_MAX_GROUP_REPEAT = 6
_TOKEN_LEN_CAP = 12
_TOKEN_REUSE_CHANCE = 0.05


class _GenState:
    def __init__(self, grammar: Grammar, rng: Rng) -> None:
        self.grammar = grammar
        self.rng = rng
        # Token texts already emitted in this sentence, per token name.
        self.emitted: dict[str, list[str]] = {}
        self.literal_set = set(grammar.literals)


def _min_alt_index(grammar: Grammar, alts: list[Alternative]) -> int:
    """Index of the alternative with minimal completion depth (first wins)."""
    best_i, best_d = 0, None
    for i, alt in enumerate(alts):
        d = _alt_completion(grammar, alt)
        if best_d is None or d < best_d:
            best_i, best_d = i, d
    return best_i


def _sym_completion(grammar: Grammar, sym: Symbol) -> int:
    if isinstance(sym, (Lit, TokenRef)):
        return 0
    if isinstance(sym, RuleRef):
        return grammar.completion_depth[sym.name]
    if sym.kind in "?*":
        return 0
    return min(
        max((_sym_completion(grammar, s) for s in alt.symbols), default=0)
        for alt in sym.alts
    )


def _alt_completion(grammar: Grammar, alt: Alternative) -> int:
    if not alt.symbols:
        return 0
    return 1 + max(_sym_completion(grammar, s) for s in alt.symbols)


def sample_token(name: str, state: _GenState) -> str:
    """Sample text for a token definition.

    Character-class tokens use geometric(0.5) lengths capped at 12; with a
    small probability the sampler reuses a text already emitted for the
    same token in this sentence, which raises the chance that later name
    references resolve. Texts colliding with grammar literals are
    resampled so the sentence re-lexes unambiguously.
    """
    tdef = state.grammar.token_defs[name]
    if tdef.literal is not None:
        return tdef.literal
    rng = state.rng
    pool = state.emitted.setdefault(name, [])
    if pool and rng.chance(_TOKEN_REUSE_CHANCE):
        return rng.choice(pool)
    for _ in range(64):
        chars: list[str] = []
        for atom in tdef.atoms:
            if atom.quant == "":
                count = 1
            elif atom.quant == "?":
                count = 1 if rng.chance(0.5) else 0
            elif atom.quant == "+":
                count = rng.geometric(0.5, floor=1, cap=_TOKEN_LEN_CAP)
            else:  # "*"
                count = rng.geometric(0.5, floor=1, cap=_TOKEN_LEN_CAP) - 1
            for _ in range(count):
                if len(chars) >= _TOKEN_LEN_CAP and atom.quant in "*+":
                    break
                chars.append(atom.chars[rng.below(len(atom.chars))])
        text = "".join(chars)
        if text and text not in state.literal_set:
            pool.append(text)
            return text
    # Pathological token definition; fall back to the first legal char.
    text = tdef.atoms[0].chars[0]
    pool.append(text)
    return text


def _expand_symbol(
    sym: Symbol, level: int, max_depth: int, state: _GenState
) -> list[DerivationTree]:
    if isinstance(sym, Lit):
        return [DerivationTree("literal", sym.text)]
    if isinstance(sym, TokenRef):
        return [DerivationTree("token", sample_token(sym.name, state))]
    if isinstance(sym, RuleRef):
        return [_expand_rule(sym.name, level, max_depth, state)]
    return _expand_group(sym, level, max_depth, state)


def _pick_group_alt(group: Group, state: _GenState, completing: bool) -> Alternative:
    if completing:
        return group.alts[_min_alt_index(state.grammar, list(group.alts))]
    if len(group.alts) == 1:
        return group.alts[0]
    idx = state.rng.weighted_index([a.weight for a in group.alts])
    return group.alts[idx]


def _expand_group(
    group: Group, level: int, max_depth: int, state: _GenState
) -> list[DerivationTree]:
    completing = level >= max_depth
    rng = state.rng
    if group.kind == "?":
        reps = 0 if completing or rng.chance(0.5) else 1
    elif group.kind == "*":
        reps = 0 if completing else rng.geometric(0.5, floor=1, cap=_MAX_GROUP_REPEAT) - 1
    else:  # "+"
        reps = 1 if completing else rng.geometric(0.5, floor=1, cap=_MAX_GROUP_REPEAT)
    out: list[DerivationTree] = []
    for _ in range(reps):
        alt = _pick_group_alt(group, state, completing)
        for s in alt.symbols:
            out.extend(_expand_symbol(s, level, max_depth, state))
    return out


def _expand_rule(
    name: str, level: int, max_depth: int, state: _GenState
) -> DerivationTree:
    alts = state.grammar.rules[name]
    if level >= max_depth:
        alt = alts[_min_alt_index(state.grammar, alts)]
    elif len(alts) == 1:
        alt = alts[0]
    else:
        alt = alts[state.rng.weighted_index([a.weight for a in alts])]
    children: list[DerivationTree] = []
    for sym in alt.symbols:
        children.extend(_expand_symbol(sym, level + 1, max_depth, state))
    depth = 1 + max((c.depth for c in children), default=-1)
    return DerivationTree("rule", name, children, depth)


def generate(grammar: Grammar, seed: int, max_depth: int) -> DerivationTree:
    """Generate a derivation tree for ``grammar.start``.

    Deterministic in (grammar, seed, max_depth). Nodes at level >= max_depth
    switch to shortest-completion mode, so the tree height never exceeds
    max_depth + grammar.overshoot.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    state = _GenState(grammar, Rng(seed))
    return _expand_rule(grammar.start, 0, max_depth, state)


def generate_sentence(grammar: Grammar, seed: int, max_depth: int) -> str:
    return generate(grammar, seed, max_depth).serialize()


def regenerate_subtree(
    grammar: Grammar, rule_name: str, seed: int, max_depth: int = 8
) -> DerivationTree:
    """Fresh subtree rooted at ``rule_name`` (depth budget local to it)."""
    state = _GenState(grammar, Rng(seed))
    return _expand_rule(rule_name, 0, max_depth, state)
