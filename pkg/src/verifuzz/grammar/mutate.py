"""Derivation-tree mutation: splice a compatible subtree from a pool tree,
or regenerate a random subtree in place. This is how coverage feedback is
combined with grammatical generation: trees that unlocked new counters go
into the pool and seed further variants."""

from __future__ import annotations

from ..rng import Rng
from .model import DerivationTree, Grammar, recompute_depth
from .sampler import _expand_rule, _GenState

_REGEN_DEPTH = 8
_SPLICE_CHANCE = 0.5


def _paths_to_rule_nodes(tree: DerivationTree) -> list[tuple[int, ...]]:
    """Paths (child-index tuples) of every rule node, pre-order."""
    out: list[tuple[int, ...]] = []

    def walk(node: DerivationTree, path: tuple[int, ...]) -> None:
        if node.kind != "rule":
            return
        out.append(path)
        for i, child in enumerate(node.children):
            walk(child, path + (i,))

    walk(tree, ())
    return out


def _node_at(tree: DerivationTree, path: tuple[int, ...]) -> DerivationTree:
    node = tree
    for i in path:
        node = node.children[i]
    return node


def _replace_at(
    tree: DerivationTree, path: tuple[int, ...], subtree: DerivationTree
) -> DerivationTree:
    if not path:
        return subtree
    root = tree.clone()
    node = root
    for i in path[:-1]:
        node = node.children[i]
    node.children[path[-1]] = subtree
    recompute_depth(root)
    return root


def mutate_tree(
    tree: DerivationTree,
    pool: list[DerivationTree],
    grammar: Grammar,
    seed: int,
) -> DerivationTree:
    """Return a variant of ``tree`` differing in one subtree.

    With a pool available, half the time a same-rule subtree from a pool
    tree is spliced in; otherwise (or when no compatible splice site
    exists) a uniformly chosen rule node is regenerated from scratch.
    """
    rng = Rng(seed)
    paths = _paths_to_rule_nodes(tree)
    if not paths:
        return tree.clone()

    if pool and rng.chance(_SPLICE_CHANCE):
        donors: dict[str, list[DerivationTree]] = {}
        for donor in pool:
            for node in donor.rule_nodes():
                donors.setdefault(node.label, []).append(node)
        candidates = [p for p in paths if _node_at(tree, p).label in donors]
        if candidates:
            path = candidates[rng.below(len(candidates))]
            name = _node_at(tree, path).label
            subtree = rng.choice(donors[name]).clone()
            return _replace_at(tree, path, subtree)

    path = paths[rng.below(len(paths))]
    name = _node_at(tree, path).label
    state = _GenState(grammar, rng)
    fresh = _expand_rule(name, 0, _REGEN_DEPTH, state)
    return _replace_at(tree, path, fresh)
