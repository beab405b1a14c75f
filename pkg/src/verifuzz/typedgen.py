"""Typed mini-PVL program generation.

Programs are scope-correct and type-correct by construction, so they pass
the whole toy front-end (lexer through typechecker) and reach the encode
stub. Declarations are generated first (classes, fields, method
signatures), then bodies, so forward references need no patching.

Expression generation is type-directed and top-down: given a goal type,
pick among literals, in-scope variables of that type, and operators that
return it; at the expression depth cap only literals and variables remain.
Division and modulo are never generated. Identifiers come from a plain
``c0/m1/v2`` scheme, which keeps the generator clear of the pathological
name shapes the seeded bugs key on.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .rng import Rng, derive_seed

FEATURES = frozenset(
    {"enums", "contracts", "loops", "labels", "locks", "forks", "par_blocks", "old_expr"}
)

_EXPR_DEPTH = 5

_INT_OPS = ("+", "-", "*")
_CMP_OPS = ("==", "!=", "<", "<=")
_BOOL_OPS = ("&&", "||")


@dataclass(frozen=True)
class TypedGenConfig:
    seed: int = 0
    max_classes: int = 2
    max_methods_per_class: int = 2
    max_stmt_depth: int = 3
    features: frozenset[str] = FEATURES
    # Deliberately emit \old outside ensures clauses, to probe the
    # placement check downstream. Off by default: the standard generator
    # only produces programs the bug-free verifier fully accepts.
    illegal_old_placement: bool = False

    def __post_init__(self) -> None:
        if min(self.max_classes, self.max_methods_per_class, self.max_stmt_depth) < 1:
            raise ValueError("all maxima must be >= 1")
        unknown = set(self.features) - FEATURES
        if unknown:
            raise ValueError(f"unknown feature toggles: {sorted(unknown)}")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "max_classes": self.max_classes,
            "max_methods_per_class": self.max_methods_per_class,
            "max_stmt_depth": self.max_stmt_depth,
            "features": sorted(self.features),
            "illegal_old_placement": self.illegal_old_placement,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TypedGenConfig":
        return cls(
            seed=int(d.get("seed", 0)),
            max_classes=int(d.get("max_classes", 2)),
            max_methods_per_class=int(d.get("max_methods_per_class", 2)),
            max_stmt_depth=int(d.get("max_stmt_depth", 3)),
            features=frozenset(d.get("features", sorted(FEATURES))),
            illegal_old_placement=bool(d.get("illegal_old_placement", False)),
        )


def shrink_config(config: TypedGenConfig) -> TypedGenConfig:
    """Halve every maximum (floored at 1), keeping the seed."""
    return replace(
        config,
        max_classes=max(1, config.max_classes // 2),
        max_methods_per_class=max(1, config.max_methods_per_class // 2),
        max_stmt_depth=max(1, config.max_stmt_depth // 2),
    )


@dataclass
class _Var:
    name: str
    type: str  # "int" | "bool" | class name


@dataclass
class _Method:
    name: str
    ret: str  # "int" | "bool" | "void"
    params: list[_Var] = field(default_factory=list)


@dataclass
class _Class:
    name: str
    fields: list[_Var] = field(default_factory=list)
    methods: list[_Method] = field(default_factory=list)


class _Generator:
    def __init__(self, config: TypedGenConfig) -> None:
        self.cfg = config
        self.rng = Rng(derive_seed(config.seed, 0x7D))
        self.on = config.features.__contains__
        self.counter = 0

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    # --- declarations-first planning ---

    def generate(self) -> str:
        rng = self.rng
        enums: list[tuple[str, list[str]]] = []
        if self.on("enums"):
            for _ in range(rng.below(3)):
                members = [self.fresh("e") for _ in range(1 + rng.below(4))]
                enums.append((self.fresh("E"), members))

        classes: list[_Class] = []
        n_classes = 1 + rng.below(self.cfg.max_classes)
        for _ in range(n_classes):
            cls = _Class(self.fresh("C"))
            classes.append(cls)
        self.classes = classes
        self.class_names = [c.name for c in classes]

        for cls in classes:
            for _ in range(rng.below(3)):
                cls.fields.append(_Var(self.fresh("f"), self.pick_type(allow_void=False)))
            n_methods = 1 + rng.below(self.cfg.max_methods_per_class)
            for _ in range(n_methods):
                m = _Method(self.fresh("m"), self.pick_type(allow_void=True))
                for _ in range(rng.below(3)):
                    m.params.append(_Var(self.fresh("p"), self.pick_type(allow_void=False)))
                cls.methods.append(m)

        out: list[str] = []
        for name, members in enums:
            out.append(f"enum {name} {{ {' , '.join(members)} }}")
        for cls in classes:
            out.append(self.render_class(cls))
        return "\n".join(out) + "\n"

    def pick_type(self, allow_void: bool) -> str:
        choices = ["int", "int", "bool", "bool"]
        if allow_void:
            choices += ["void", "void", "void"]
        if self.class_names_if_any():
            choices.append(self.rng.choice(self.class_names_if_any()))
        return self.rng.choice(choices)

    def class_names_if_any(self) -> list[str]:
        return getattr(self, "class_names", [])

    # --- rendering with scope tracking ---

    def render_class(self, cls: _Class) -> str:
        lines = [f"class {cls.name} {{"]
        for f in cls.fields:
            lines.append(f"  {f.type} {f.name} ;")
        for m in cls.methods:
            lines.extend(self.render_method(m, cls))
        lines.append("}")
        return "\n".join(lines)

    def render_method(self, m: _Method, cls: _Class) -> list[str]:
        scope = list(cls.fields) + list(m.params)
        lines = []
        if self.on("contracts"):
            for _ in range(self.rng.below(3)):
                kind = self.rng.choice(["requires", "ensures", "ensures"])
                lines.append(f"  {kind} {self.contract_expr(kind, m, scope)} ;")
        params = " , ".join(f"{p.type} {p.name}" for p in m.params)
        lines.append(f"  {m.ret} {m.name} ( {params} ) {{")
        body_scope = list(scope)
        body = self.render_block(body_scope, depth=1, indent="    ")
        lines.extend(body)
        if m.ret != "void":
            lines.append(f"    return {self.expr(m.ret, body_scope, 0)} ;")
        lines.append("  }")
        return lines

    def contract_expr(self, kind: str, m: _Method, scope: list[_Var]) -> str:
        in_ensures = kind == "ensures"
        expr = self.expr("bool", scope, 0, allow_result=(in_ensures and m.ret in ("int", "bool")), ret=m.ret)
        if self.on("old_expr") and self.rng.chance(0.3):
            if in_ensures or self.cfg.illegal_old_placement:
                return f"\\old ( {expr} )"
        return expr

    def render_block(self, scope: list[_Var], depth: int, indent: str) -> list[str]:
        lines = []
        local_base = len(scope)
        for _ in range(self.rng.below(4) + 1):
            lines.extend(self.render_stmt(scope, depth, indent))
        del scope[local_base:]
        return lines

    def render_stmt(self, scope: list[_Var], depth: int, indent: str) -> list[str]:
        rng = self.rng
        nested_ok = depth < self.cfg.max_stmt_depth
        choices = ["vardecl", "vardecl", "assign", "assert"]
        if self.on("labels"):
            choices.append("label")
        if self.on("locks") and self.lockable(scope):
            choices.append("lock")
        if self.on("forks") and self.lockable(scope):
            choices.append("fork")
        if nested_ok:
            choices += ["if", "block"]
            if self.on("loops"):
                choices.append("while")
            if self.on("par_blocks"):
                choices.append("sequential")
        kind = rng.choice(choices)

        if kind == "vardecl":
            ty = self.pick_type(allow_void=False)
            name = self.fresh("v")
            init = f" = {self.expr(ty, scope, 0)}" if rng.chance(0.7) else ""
            scope.append(_Var(name, ty))
            return [f"{indent}{ty} {name}{init} ;"]
        if kind == "assign":
            mutable = [v for v in scope if v.type in ("int", "bool")]
            if not mutable:
                return [f"{indent}assert true ;"]
            var = rng.choice(mutable)
            return [f"{indent}{var.name} = {self.expr(var.type, scope, 0)} ;"]
        if kind == "assert":
            return [f"{indent}assert {self.expr('bool', scope, 0)} ;"]
        if kind == "label":
            return [f"{indent}label {self.fresh('l')} ;"]
        if kind == "lock":
            return [f"{indent}lock {rng.choice(self.lockable(scope)).name} ;"]
        if kind == "fork":
            return [f"{indent}fork {rng.choice(self.lockable(scope)).name} ;"]
        if kind == "if":
            cond = self.expr("bool", scope, 0)
            inner = self.render_block(list(scope), depth + 1, indent + "  ")
            lines = [f"{indent}if ( {cond} ) {{", *inner, f"{indent}}}"]
            if rng.chance(0.3):
                other = self.render_block(list(scope), depth + 1, indent + "  ")
                lines += [f"{indent}else {{", *other, f"{indent}}}"]
            return lines
        if kind == "while":
            cond = self.expr("bool", scope, 0)
            lines = []
            if self.on("contracts") and rng.chance(0.5):
                lines.append(f"{indent}loop_invariant {self.expr('bool', scope, 0)} ;")
            inner = self.render_block(list(scope), depth + 1, indent + "  ")
            lines += [f"{indent}while ( {cond} ) {{", *inner, f"{indent}}}"]
            return lines
        if kind == "sequential":
            inner = (
                self.render_block(list(scope), depth + 1, indent + "  ")
                if rng.chance(0.8)
                else []
            )
            return [f"{indent}sequential {{", *inner, f"{indent}}}"]
        assert kind == "block"
        inner = self.render_block(list(scope), depth + 1, indent + "  ")
        return [f"{indent}{{", *inner, f"{indent}}}"]

    def lockable(self, scope: list[_Var]) -> list[_Var]:
        return [v for v in scope if v.type in self.class_names_if_any()]

    # --- type-directed expressions ---

    def expr(
        self,
        goal: str,
        scope: list[_Var],
        depth: int,
        allow_result: bool = False,
        ret: str | None = None,
    ) -> str:
        rng = self.rng
        vars_of = [v.name for v in scope if v.type == goal]
        atoms: list[str] = []
        if goal == "int":
            atoms.append(str(rng.below(100)))
        elif goal == "bool":
            atoms.append(rng.choice(["true", "false"]))
        else:
            atoms.append("null")
        if vars_of:
            atoms.append(rng.choice(vars_of))
        if allow_result and ret == goal:
            atoms.append("\\result")

        if depth >= _EXPR_DEPTH or goal not in ("int", "bool") or rng.chance(0.45):
            return rng.choice(atoms)

        if goal == "int":
            op = rng.choice(_INT_OPS)
            return f"( {self.expr('int', scope, depth + 1)} {op} {self.expr('int', scope, depth + 1)} )"
        # goal == "bool"
        pick = rng.below(4)
        if pick == 0:
            return f"( ! {self.expr('bool', scope, depth + 1)} )"
        if pick == 1:
            op = rng.choice(_BOOL_OPS)
            return f"( {self.expr('bool', scope, depth + 1)} {op} {self.expr('bool', scope, depth + 1)} )"
        op = rng.choice(_CMP_OPS)
        if op in ("<", "<=") or rng.chance(0.7):
            return f"( {self.expr('int', scope, depth + 1)} {op} {self.expr('int', scope, depth + 1)} )"
        return f"( {self.expr('bool', scope, depth + 1)} {op} {self.expr('bool', scope, depth + 1)} )"


def generate_typed(config: TypedGenConfig) -> str:
    """Deterministically generate one well-typed mini-PVL program."""
    return _Generator(config).generate()
