"""Front-end phases of the toy verifier: lex, parse, resolve, typecheck and
an encode stub standing in for a skipped back-end.

The phase structure mirrors a real deductive verifier's front-end: clean
diagnostics are intended output, while a toggled seeded bug aborts with a
stack trace. Resolution runs its naming sub-passes (namer, enum checker,
label binder) before use-def analysis, which is why naming bugs fire even
on programs that would not resolve.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from ..grammar import LexError, ParseError, Parser, load_grammar
from ..grammar.earley import ParseNode
from . import nodes as n
from .bugs import SeededCrash, render_trace
from .counters import CoverageRecorder

GRAMMAR_PATH = Path(__file__).with_name("minipvl.g")

_parser_cache: Parser | None = None


def get_parser() -> Parser:
    global _parser_cache
    if _parser_cache is None:
        _parser_cache = Parser(load_grammar(GRAMMAR_PATH))
    return _parser_cache


class Diagnostic(Exception):
    """A clean, intended error message (never a crash)."""

    def __init__(self, phase: str, message: str, pos: n.Pos) -> None:
        self.phase = phase
        self.message = message
        self.pos = pos
        super().__init__(f"{phase}: {message} at {pos[0]}:{pos[1]}")

    def render(self) -> str:
        return f"error: {self.phase}: {self.message} at {self.pos[0]}:{self.pos[1]}"


@dataclass
class CheckResult:
    status: str  # verified | error | crash
    phase: str  # deepest phase entered
    diagnostic: str | None = None
    bug: str | None = None
    trace: str | None = None
    coverage: set[int] = field(default_factory=set)


_TRAILING_DIGITS = re.compile(r"([0-9]+)$")
_JAVA_INT_MAX = 2147483647


class _Checker:
    def __init__(self, toggles: set[str], cov: CoverageRecorder) -> None:
        self.toggles = toggles
        self.cov = cov

    def bug(self, name: str, condition: bool) -> None:
        if condition and name in self.toggles:
            raise SeededCrash(name)

    # --- resolve ---

    def resolve(self, prog: n.Program) -> None:
        self.cov.hit("phase:resolve")
        self._namer(prog)
        self._enum_checker(prog)
        self._label_binder(prog)
        self._use_def(prog)

    def _declared_names(self, prog: n.Program):
        for decl in prog.decls:
            if isinstance(decl, n.EnumDecl):
                yield decl.ident, decl.pos
                for m in decl.members:
                    yield m, decl.pos
            elif isinstance(decl, n.MethodDecl):
                yield from self._method_names(decl)
            elif isinstance(decl, n.ClassDecl):
                yield decl.ident, decl.pos
                for f in decl.fields:
                    yield f.ident, f.pos
                for m in decl.methods:
                    yield from self._method_names(m)

    def _method_names(self, m: n.MethodDecl):
        yield m.ident, m.pos
        for p in m.params:
            yield p.ident, p.pos
        yield from self._body_names(m.body)

    def _body_names(self, stmt: n.Stmt):
        if isinstance(stmt, n.VarDecl):
            yield stmt.ident, stmt.pos
        elif isinstance(stmt, n.Label):
            yield stmt.ident, stmt.pos
        elif isinstance(stmt, n.Block):
            for s in stmt.stmts:
                yield from self._body_names(s)
        elif isinstance(stmt, n.If):
            yield from self._body_names(stmt.then)
            if stmt.orelse is not None:
                yield from self._body_names(stmt.orelse)
        elif isinstance(stmt, n.While):
            yield from self._body_names(stmt.body)
        elif isinstance(stmt, n.Sequential):
            yield from self._body_names(stmt.body)

    def _namer(self, prog: n.Program) -> None:
        for name, pos in self._declared_names(prog):
            del pos
            self.cov.hit("resolve:Name")
            self.bug("B2", set(name) == {"_"})
            m = _TRAILING_DIGITS.search(name)
            self.bug("B7", m is not None and int(m.group(1)) > _JAVA_INT_MAX)

    def _enum_checker(self, prog: n.Program) -> None:
        for decl in prog.decls:
            if isinstance(decl, n.EnumDecl):
                self.cov.hit("resolve:EnumDecl")
                self.bug("B1", not decl.members)
                if not decl.members:
                    raise Diagnostic(
                        "resolve", f"enum {decl.ident} has no members", decl.pos
                    )

    def _label_binder(self, prog: n.Program) -> None:
        def walk(stmt: n.Stmt, in_run: bool) -> None:
            if isinstance(stmt, n.Label):
                self.cov.hit("resolve:Label")
                self.bug("B3", in_run)
            elif isinstance(stmt, n.Block):
                for s in stmt.stmts:
                    walk(s, in_run)
            elif isinstance(stmt, n.If):
                walk(stmt.then, in_run)
                if stmt.orelse is not None:
                    walk(stmt.orelse, in_run)
            elif isinstance(stmt, n.While):
                walk(stmt.body, in_run)
            elif isinstance(stmt, n.Sequential):
                walk(stmt.body, in_run)

        for decl in prog.decls:
            if isinstance(decl, n.MethodDecl):
                walk(decl.body, False)
            elif isinstance(decl, n.ClassDecl):
                for m in decl.methods:
                    walk(m.body, False)
                for rb in decl.run_blocks:
                    self.cov.hit("resolve:RunBlock")
                    walk(rb.body, True)

    # Use-def: every referenced name must have a visible binding, and every
    # named type must refer to a declared class or enum.

    def _use_def(self, prog: n.Program) -> None:
        classes = {d.ident for d in prog.decls if isinstance(d, n.ClassDecl)}
        enums = {d.ident for d in prog.decls if isinstance(d, n.EnumDecl)}
        self._types = classes | enums
        self._classes = classes

        for decl in prog.decls:
            if isinstance(decl, n.EnumDecl):
                continue
            if isinstance(decl, n.MethodDecl):
                self._resolve_method(decl, fields=())
            else:
                self.cov.hit("resolve:ClassDecl")
                for f in decl.fields:
                    self.cov.hit("resolve:FieldDecl")
                    self._check_type(f.type_name, f.pos)
                field_names = tuple(f.ident for f in decl.fields)
                for m in decl.methods:
                    self._resolve_method(m, fields=field_names)
                for rb in decl.run_blocks:
                    scopes = [set(field_names)]
                    self._resolve_stmt(rb.body, scopes)

    def _check_type(self, type_name: str, pos: n.Pos) -> None:
        if type_name in ("int", "bool", "void"):
            return
        if type_name not in self._types:
            raise Diagnostic("resolve", f"unknown type {type_name}", pos)

    def _resolve_method(self, m: n.MethodDecl, fields: tuple[str, ...]) -> None:
        self.cov.hit("resolve:MethodDecl")
        self._check_type(m.ret_type_name, m.pos)
        scopes: list[set[str]] = [set(fields), set()]
        for p in m.params:
            self.cov.hit("resolve:Param")
            self._check_type(p.type_name, p.pos)
            scopes[-1].add(p.ident)
        for c in m.contracts:
            self.cov.hit("resolve:Contract")
            self._resolve_expr(c.cond, scopes)
        self._resolve_stmt(m.body, scopes)

    def _resolve_stmt(self, stmt: n.Stmt, scopes: list[set[str]]) -> None:
        if isinstance(stmt, n.VarDecl):
            self.cov.hit("resolve:VarDecl")
            self._check_type(stmt.type_name, stmt.pos)
            if stmt.init is not None:
                self._resolve_expr(stmt.init, scopes)
            scopes[-1].add(stmt.ident)
        elif isinstance(stmt, n.Assign):
            self.cov.hit("resolve:Assign")
            if not any(stmt.ident in s for s in scopes):
                raise Diagnostic("resolve", f"undefined name {stmt.ident}", stmt.pos)
            self._resolve_expr(stmt.value, scopes)
        elif isinstance(stmt, n.If):
            self.cov.hit("resolve:If")
            self._resolve_expr(stmt.cond, scopes)
            self._resolve_stmt(stmt.then, scopes)
            if stmt.orelse is not None:
                self._resolve_stmt(stmt.orelse, scopes)
        elif isinstance(stmt, n.While):
            self.cov.hit("resolve:While")
            for inv in stmt.invariants:
                self._resolve_expr(inv, scopes)
            self._resolve_expr(stmt.cond, scopes)
            self._resolve_stmt(stmt.body, scopes)
        elif isinstance(stmt, n.Return):
            self.cov.hit("resolve:Return")
            if stmt.value is not None:
                self._resolve_expr(stmt.value, scopes)
        elif isinstance(stmt, n.Assert):
            self.cov.hit("resolve:Assert")
            self._resolve_expr(stmt.cond, scopes)
        elif isinstance(stmt, n.Lock):
            self.cov.hit("resolve:Lock")
            self._resolve_expr(stmt.target, scopes)
        elif isinstance(stmt, n.Fork):
            self.cov.hit("resolve:Fork")
            self._resolve_expr(stmt.target, scopes)
        elif isinstance(stmt, n.Block):
            self.cov.hit("resolve:Block")
            scopes.append(set())
            for s in stmt.stmts:
                self._resolve_stmt(s, scopes)
            scopes.pop()
        elif isinstance(stmt, n.Sequential):
            self.cov.hit("resolve:Sequential")
            self._resolve_stmt(stmt.body, scopes)

    def _resolve_expr(self, expr: n.Expr, scopes: list[set[str]]) -> None:
        if isinstance(expr, n.Name):
            if not any(expr.ident in s for s in scopes):
                raise Diagnostic("resolve", f"undefined name {expr.ident}", expr.pos)
        elif isinstance(expr, n.Not):
            self._resolve_expr(expr.inner, scopes)
        elif isinstance(expr, n.Old):
            self.cov.hit("resolve:Old")
            self._resolve_expr(expr.inner, scopes)
        elif isinstance(expr, n.Binary):
            self._resolve_expr(expr.left, scopes)
            self._resolve_expr(expr.right, scopes)

    # --- typecheck ---

    def typecheck(self, prog: n.Program) -> None:
        self.cov.hit("phase:typecheck")
        enums = {d.ident for d in prog.decls if isinstance(d, n.EnumDecl)}
        self._enum_names = enums

        for decl in prog.decls:
            if isinstance(decl, n.EnumDecl):
                self.cov.hit("check:EnumDecl")
                continue
            if isinstance(decl, n.MethodDecl):
                self._check_method(decl, {})
            else:
                self.cov.hit("check:ClassDecl")
                field_env = {}
                for f in decl.fields:
                    self.cov.hit("check:FieldDecl")
                    field_env[f.ident] = self._named_type(f.type_name, f.pos)
                for m in decl.methods:
                    self._check_method(m, field_env)
                for rb in decl.run_blocks:
                    self.cov.hit("check:RunBlock")
                    env = [dict(field_env)]
                    self._check_stmt(rb.body, env, ret=n.VOID, in_contract=None)

    def _named_type(self, name: str, pos: n.Pos) -> n.Type:
        if name == "int":
            return n.INT
        if name == "bool":
            return n.BOOL
        if name == "void":
            return n.VOID
        return n.Type("ref", name)

    def _check_method(self, m: n.MethodDecl, field_env: dict[str, n.Type]) -> None:
        self.cov.hit("check:MethodDecl")
        ret = self._named_type(m.ret_type_name, m.pos)
        env: list[dict[str, n.Type]] = [dict(field_env), {}]
        for p in m.params:
            self.cov.hit("check:Param")
            ty = self._named_type(p.type_name, p.pos)
            if ty.kind == "void":
                raise Diagnostic("typecheck", f"parameter {p.ident} has type void", p.pos)
            env[-1][p.ident] = ty
        self._ret = ret
        for c in m.contracts:
            self.cov.hit("check:Contract")
            ty = self._expr_type(c.cond, env, in_contract=c.kind)
            if ty.kind != "bool":
                raise Diagnostic(
                    "typecheck", f"{c.kind} clause must be boolean, got {ty}", c.pos
                )
        self._check_stmt(m.body, env, ret, in_contract=None)

    def _assignable(self, target: n.Type, value: n.Type) -> bool:
        if value.kind == "null":
            return target.kind == "ref"
        return target == value

    def _check_stmt(
        self, stmt: n.Stmt, env: list[dict[str, n.Type]], ret: n.Type, in_contract
    ) -> None:
        if isinstance(stmt, n.VarDecl):
            self.cov.hit("check:VarDecl")
            ty = self._named_type(stmt.type_name, stmt.pos)
            if ty.kind == "void":
                raise Diagnostic(
                    "typecheck", f"variable {stmt.ident} has type void", stmt.pos
                )
            if stmt.init is not None:
                ity = self._expr_type(stmt.init, env, in_contract)
                if not self._assignable(ty, ity):
                    raise Diagnostic(
                        "typecheck", f"cannot initialize {ty} with {ity}", stmt.pos
                    )
            env[-1][stmt.ident] = ty
        elif isinstance(stmt, n.Assign):
            self.cov.hit("check:Assign")
            ty = self._lookup(stmt.ident, env, stmt.pos)
            vty = self._expr_type(stmt.value, env, in_contract)
            if not self._assignable(ty, vty):
                raise Diagnostic("typecheck", f"cannot assign {vty} to {ty}", stmt.pos)
        elif isinstance(stmt, n.If):
            self.cov.hit("check:If")
            self._require_bool(stmt.cond, env, "if condition", in_contract)
            self._check_stmt(stmt.then, env, ret, in_contract)
            if stmt.orelse is not None:
                self._check_stmt(stmt.orelse, env, ret, in_contract)
        elif isinstance(stmt, n.While):
            self.cov.hit("check:While")
            for inv in stmt.invariants:
                ity = self._expr_type(inv, env, in_contract="loop_invariant")
                if ity.kind != "bool":
                    raise Diagnostic(
                        "typecheck", f"loop_invariant must be boolean, got {ity}", stmt.pos
                    )
            self._require_bool(stmt.cond, env, "while condition", in_contract)
            self._check_stmt(stmt.body, env, ret, in_contract)
        elif isinstance(stmt, n.Return):
            self.cov.hit("check:Return")
            if stmt.value is None:
                if ret.kind != "void":
                    raise Diagnostic(
                        "typecheck", f"return needs a value of type {ret}", stmt.pos
                    )
            else:
                ty = self._expr_type(stmt.value, env, in_contract)
                if ret.kind == "void":
                    raise Diagnostic("typecheck", "void method returns a value", stmt.pos)
                if not self._assignable(ret, ty):
                    raise Diagnostic(
                        "typecheck", f"return type mismatch: {ty} vs {ret}", stmt.pos
                    )
        elif isinstance(stmt, n.Label):
            self.cov.hit("check:Label")
        elif isinstance(stmt, n.Assert):
            self.cov.hit("check:Assert")
            self._require_bool(stmt.cond, env, "assert condition", in_contract)
        elif isinstance(stmt, n.Lock):
            self.cov.hit("check:Lock")
            self.bug("B5", isinstance(stmt.target, n.NullLit))
            ty = self._expr_type(stmt.target, env, in_contract)
            if ty.kind == "null":
                raise Diagnostic("typecheck", "lock target may not be null", stmt.pos)
            if ty.kind != "ref" or ty.name in self._enum_names:
                raise Diagnostic(
                    "typecheck", f"lock target must have a class type, got {ty}", stmt.pos
                )
        elif isinstance(stmt, n.Fork):
            self.cov.hit("check:Fork")
            self.bug("B6", isinstance(stmt.target, n.NullLit))
            ty = self._expr_type(stmt.target, env, in_contract)
            if ty.kind == "null":
                raise Diagnostic("typecheck", "fork target may not be null", stmt.pos)
            if ty.kind != "ref" or ty.name in self._enum_names:
                raise Diagnostic(
                    "typecheck", f"fork target must have a class type, got {ty}", stmt.pos
                )
        elif isinstance(stmt, n.Block):
            self.cov.hit("check:Block")
            env.append({})
            for s in stmt.stmts:
                self._check_stmt(s, env, ret, in_contract)
            env.pop()
        elif isinstance(stmt, n.Sequential):
            self.cov.hit("check:Sequential")
            self._check_stmt(stmt.body, env, ret, in_contract)

    def _lookup(self, ident: str, env: list[dict[str, n.Type]], pos: n.Pos) -> n.Type:
        for scope in reversed(env):
            if ident in scope:
                return scope[ident]
        raise Diagnostic("typecheck", f"undefined name {ident}", pos)

    def _require_bool(self, expr, env, what: str, in_contract) -> None:
        ty = self._expr_type(expr, env, in_contract)
        if ty.kind != "bool":
            raise Diagnostic("typecheck", f"{what} must be boolean, got {ty}", expr.pos)

    def _expr_type(self, expr: n.Expr, env, in_contract) -> n.Type:
        if isinstance(expr, n.IntLit):
            self.cov.hit("check:IntLit")
            return n.INT
        if isinstance(expr, n.BoolLit):
            self.cov.hit("check:BoolLit")
            return n.BOOL
        if isinstance(expr, n.NullLit):
            self.cov.hit("check:NullLit")
            return n.NULL
        if isinstance(expr, n.Name):
            self.cov.hit("check:Name")
            return self._lookup(expr.ident, env, expr.pos)
        if isinstance(expr, n.ResultRef):
            self.cov.hit("check:ResultRef")
            if in_contract != "ensures":
                raise Diagnostic(
                    "typecheck", "\\result is only allowed in ensures clauses", expr.pos
                )
            if self._ret.kind == "void":
                raise Diagnostic(
                    "typecheck", "\\result is unavailable for void methods", expr.pos
                )
            return self._ret
        if isinstance(expr, n.Old):
            self.cov.hit("check:Old")
            return self._expr_type(expr.inner, env, in_contract)
        if isinstance(expr, n.Not):
            self.cov.hit("check:Not")
            ity = self._expr_type(expr.inner, env, in_contract)
            if ity.kind != "bool":
                raise Diagnostic("typecheck", f"! needs a boolean, got {ity}", expr.pos)
            return n.BOOL
        assert isinstance(expr, n.Binary)
        self.cov.hit("check:Binary")
        lty = self._expr_type(expr.left, env, in_contract)
        rty = self._expr_type(expr.right, env, in_contract)
        op = expr.op
        if op in ("+", "-", "*"):
            if lty.kind == "int" and rty.kind == "int":
                return n.INT
            raise Diagnostic("typecheck", f"{op} needs int operands", expr.pos)
        if op in ("<", "<="):
            if lty.kind == "int" and rty.kind == "int":
                return n.BOOL
            raise Diagnostic("typecheck", f"{op} needs int operands", expr.pos)
        if op in ("&&", "||"):
            if lty.kind == "bool" and rty.kind == "bool":
                return n.BOOL
            raise Diagnostic("typecheck", f"{op} needs boolean operands", expr.pos)
        # == and != : operands of one type, or null against a reference
        if lty == rty and lty.kind != "void":
            return n.BOOL
        if {lty.kind, rty.kind} == {"null", "ref"} or {lty.kind, rty.kind} == {"null"}:
            return n.BOOL
        raise Diagnostic(
            "typecheck", f"cannot compare {lty} with {rty}", expr.pos
        )

    # --- encode stub ---

    def encode(self, prog: n.Program) -> None:
        self.cov.hit("phase:encode")
        for decl in prog.decls:
            if isinstance(decl, n.EnumDecl):
                self.cov.hit("encode:EnumDecl")
                continue
            if isinstance(decl, n.MethodDecl):
                self._encode_method(decl)
            else:
                self.cov.hit("encode:ClassDecl")
                for m in decl.methods:
                    self._encode_method(m)
                for rb in decl.run_blocks:
                    self.cov.hit("encode:RunBlock")
                    self._encode_stmt(rb.body)

    def _encode_method(self, m: n.MethodDecl) -> None:
        self.cov.hit("encode:MethodDecl")
        for c in m.contracts:
            self.cov.hit("encode:Contract")
            if c.kind in ("requires", "context_everywhere") and _contains_old(c.cond):
                self.bug("B4", True)
                raise Diagnostic(
                    "encode",
                    f"old expression is not allowed in a {c.kind} clause",
                    c.pos,
                )
        self._encode_stmt(m.body)

    def _encode_stmt(self, stmt: n.Stmt) -> None:
        kind = type(stmt).__name__
        self.cov.hit(f"encode:{kind}")
        if isinstance(stmt, n.Sequential):
            self.bug("B8", not stmt.body.stmts)
            self._encode_stmt(stmt.body)
        elif isinstance(stmt, n.Block):
            for s in stmt.stmts:
                self._encode_stmt(s)
        elif isinstance(stmt, n.If):
            self._encode_stmt(stmt.then)
            if stmt.orelse is not None:
                self._encode_stmt(stmt.orelse)
        elif isinstance(stmt, n.While):
            self._encode_stmt(stmt.body)


def _contains_old(expr: n.Expr) -> bool:
    if isinstance(expr, n.Old):
        return True
    if isinstance(expr, n.Not):
        return _contains_old(expr.inner)
    if isinstance(expr, n.Binary):
        return _contains_old(expr.left) or _contains_old(expr.right)
    return False


def _count_rules(tree: ParseNode, cov: CoverageRecorder) -> None:
    stack = [tree]
    while stack:
        node = stack.pop()
        cov.hit(f"rule:{node.rule}")
        for c in node.children:
            if isinstance(c, ParseNode):
                stack.append(c)


def check(text: str, toggles: set[str] | None = None) -> CheckResult:
    """Run all phases over ``text`` with the given seeded bugs enabled."""
    toggles = toggles or set()
    cov = CoverageRecorder()
    checker = _Checker(toggles, cov)
    parser = get_parser()
    phase = "lex"
    try:
        cov.hit("phase:lex")
        try:
            tokens = parser.lexer.tokenize(text)
        except LexError as e:
            raise Diagnostic("lex", str(e), (e.line, e.col)) from None
        for tok in tokens:
            cov.hit(f"tok:{tok.kind}")

        phase = "parse"
        cov.hit("phase:parse")
        try:
            tree = parser.parse_tokens(tokens)
        except ParseError as e:
            raise Diagnostic("parse", str(e), (e.line, e.col)) from None
        _count_rules(tree, cov)
        from .builder import build_program

        prog = build_program(tree)

        phase = "resolve"
        checker.resolve(prog)
        phase = "typecheck"
        checker.typecheck(prog)
        phase = "encode"
        checker.encode(prog)
    except Diagnostic as diag:
        return CheckResult("error", phase, diagnostic=diag.render(), coverage=cov.hits)
    except SeededCrash as crash:
        return CheckResult(
            "crash", phase, bug=crash.bug, trace=render_trace(crash.bug), coverage=cov.hits
        )
    return CheckResult("verified", "encode", coverage=cov.hits)


def phase_reached(text: str) -> str:
    """Deepest phase entered with every seeded bug disabled."""
    return check(text, set()).phase
