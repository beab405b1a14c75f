"""Typed generator: well-typedness, determinism, features, depth bounds."""

import pytest

from verifuzz.toyverifier import check, get_parser, phase_reached
from verifuzz.toyverifier import nodes as n
from verifuzz.toyverifier.builder import build_program
from verifuzz.typedgen import FEATURES, TypedGenConfig, generate_typed, shrink_config

TOGGLE_TOKEN = {
    "enums": "enum",
    "contracts": "requires",
    "loops": "while",
    "labels": "label",
    "locks": "lock",
    "forks": "fork",
    "par_blocks": "sequential",
    "old_expr": "\\old",
}


class TestShrinkConfig:
    def test_halves_maxima(self):
        cfg = TypedGenConfig(seed=5, max_classes=4, max_methods_per_class=4, max_stmt_depth=8)
        out = shrink_config(cfg)
        assert (out.max_classes, out.max_methods_per_class, out.max_stmt_depth) == (2, 2, 4)

    def test_floors_at_one(self):
        cfg = TypedGenConfig(seed=5, max_classes=1, max_methods_per_class=1, max_stmt_depth=1)
        out = shrink_config(cfg)
        assert (out.max_classes, out.max_methods_per_class, out.max_stmt_depth) == (1, 1, 1)

    def test_seed_preserved(self):
        assert shrink_config(TypedGenConfig(seed=99)).seed == 99


class TestConfigValidation:
    def test_maxima_must_be_positive(self):
        with pytest.raises(ValueError):
            TypedGenConfig(max_classes=0)

    def test_unknown_feature_rejected(self):
        with pytest.raises(ValueError, match="unknown feature"):
            TypedGenConfig(features=frozenset({"warp_drive"}))


class TestGenerateTyped:
    def test_determinism(self):
        for seed in range(30):
            cfg = TypedGenConfig(seed=seed)
            assert generate_typed(cfg) == generate_typed(cfg)

    def test_minimal_skeleton_shape(self):
        cfg = TypedGenConfig(
            seed=3, max_classes=1, max_methods_per_class=1, max_stmt_depth=1,
            features=frozenset(),
        )
        text = generate_typed(cfg)
        prog = build_program(get_parser().parse_text(text))
        classes = [d for d in prog.decls if isinstance(d, n.ClassDecl)]
        assert len(prog.decls) == 1 and len(classes) == 1
        assert len(classes[0].methods) == 1
        # Straight-line bodies: no composite statements at depth 1.
        for stmt in classes[0].methods[0].body.stmts:
            assert not isinstance(stmt, (n.If, n.While, n.Block, n.Sequential))
        assert check(text, set()).status == "verified"

    def test_oracle_pass_through_typecheck(self):
        for seed in range(200):
            text = generate_typed(TypedGenConfig(seed=seed))
            result = check(text, set())
            assert result.status == "verified", (seed, result.diagnostic, text)

    @pytest.mark.parametrize("toggle", sorted(FEATURES))
    def test_feature_soundness(self, toggle):
        features = frozenset(FEATURES - {toggle})
        token = TOGGLE_TOKEN[toggle]
        for seed in range(200):
            text = generate_typed(TypedGenConfig(seed=seed, features=features))
            assert token not in text, (toggle, seed)

    def test_contract_tokens_gated_together(self):
        features = frozenset(FEATURES - {"contracts"})
        for seed in range(100):
            text = generate_typed(TypedGenConfig(seed=seed, features=features))
            for token in ("requires", "ensures", "context_everywhere", "loop_invariant"):
                assert token not in text

    def test_depth_bound(self):
        # Measured over the reparsed AST: composite statements add one level.
        def stmt_depth(stmt, level):
            if isinstance(stmt, n.Block):
                return max((stmt_depth(s, level + 1) for s in stmt.stmts), default=level)
            if isinstance(stmt, n.If):
                branches = [stmt_depth(stmt.then, level)]
                if stmt.orelse is not None:
                    branches.append(stmt_depth(stmt.orelse, level))
                return max(branches)
            if isinstance(stmt, n.While):
                return stmt_depth(stmt.body, level)
            if isinstance(stmt, n.Sequential):
                return stmt_depth(stmt.body, level)
            return level

        for max_depth in (1, 2, 3):
            for seed in range(60):
                cfg = TypedGenConfig(seed=seed, max_stmt_depth=max_depth)
                prog = build_program(get_parser().parse_text(generate_typed(cfg)))
                for decl in prog.decls:
                    methods = decl.methods if isinstance(decl, n.ClassDecl) else []
                    for m in methods:
                        depth = max(
                            (stmt_depth(s, 1) for s in m.body.stmts), default=0
                        )
                        assert depth <= max_depth, (seed, max_depth, depth)

    def test_illegal_old_placement_mode(self):
        hits = 0
        for seed in range(300):
            cfg = TypedGenConfig(seed=seed, illegal_old_placement=True)
            text = generate_typed(cfg)
            result = check(text, set())
            assert result.status in ("verified", "error")
            if result.status == "error":
                assert "old expression" in result.diagnostic
                hits += 1
                assert check(text, {"B4"}).bug == "B4"
        assert hits > 0, "illegal placement mode never produced an illegal \\old"

    def test_reaches_encode(self):
        for seed in range(50):
            assert phase_reached(generate_typed(TypedGenConfig(seed=seed))) == "encode"
