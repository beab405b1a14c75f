"""AST for mini-PVL. Nodes are produced only by the parse-tree builder."""

from __future__ import annotations

from dataclasses import dataclass, field

Pos = tuple[int, int]  # (line, col)


@dataclass(frozen=True)
class Type:
    kind: str  # int | bool | void | ref | null
    name: str = ""  # class/enum name for kind == "ref"

    def __str__(self) -> str:
        return self.name if self.kind == "ref" else self.kind


INT = Type("int")
BOOL = Type("bool")
VOID = Type("void")
NULL = Type("null")


# --- expressions ---


@dataclass
class Expr:
    pos: Pos


@dataclass
class IntLit(Expr):
    text: str


@dataclass
class BoolLit(Expr):
    value: bool


@dataclass
class NullLit(Expr):
    pass


@dataclass
class Name(Expr):
    ident: str


@dataclass
class ResultRef(Expr):
    pass


@dataclass
class Old(Expr):
    inner: Expr


@dataclass
class Not(Expr):
    inner: Expr


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


# --- statements ---


@dataclass
class Stmt:
    pos: Pos


@dataclass
class VarDecl(Stmt):
    type_name: str  # "int" | "bool" | "void" | identifier
    ident: str
    init: Expr | None


@dataclass
class Assign(Stmt):
    ident: str
    value: Expr


@dataclass
class If(Stmt):
    cond: Expr
    then: Stmt
    orelse: Stmt | None


@dataclass
class While(Stmt):
    invariants: list[Expr]
    cond: Expr
    body: Stmt


@dataclass
class Return(Stmt):
    value: Expr | None


@dataclass
class Label(Stmt):
    ident: str


@dataclass
class Assert(Stmt):
    cond: Expr


@dataclass
class Lock(Stmt):
    target: Expr


@dataclass
class Fork(Stmt):
    target: Expr


@dataclass
class Block(Stmt):
    stmts: list[Stmt] = field(default_factory=list)


@dataclass
class Sequential(Stmt):
    body: Block


# --- declarations ---


@dataclass
class Contract:
    kind: str  # requires | ensures | context_everywhere
    cond: Expr
    pos: Pos


@dataclass
class Param:
    type_name: str
    ident: str
    pos: Pos


@dataclass
class MethodDecl:
    contracts: list[Contract]
    ret_type_name: str
    ident: str
    params: list[Param]
    body: Block
    pos: Pos


@dataclass
class FieldDecl:
    type_name: str
    ident: str
    pos: Pos


@dataclass
class RunBlock:
    body: Block
    pos: Pos


@dataclass
class ClassDecl:
    ident: str
    fields: list[FieldDecl]
    methods: list[MethodDecl]
    run_blocks: list[RunBlock]
    pos: Pos


@dataclass
class EnumDecl:
    ident: str
    members: list[str]
    pos: Pos


@dataclass
class Program:
    decls: list[object]  # ClassDecl | EnumDecl | MethodDecl, in source order
