"""Builds the mini-PVL AST from a grammar parse tree."""

from __future__ import annotations

from ..grammar.earley import ParseNode
from ..grammar.lexing import Token
from . import nodes as n


def _pos(item) -> n.Pos:
    if isinstance(item, Token):
        return (item.line, item.col)
    return item.pos()


def build_program(tree: ParseNode) -> n.Program:
    assert tree.rule == "Program"
    decls = []
    for decl in tree.child_rules("Declaration"):
        inner = decl.children[0]
        assert isinstance(inner, ParseNode)
        decls.append(_DECL_BUILDERS[inner.rule](inner))
    return n.Program(decls)


def _build_class(node: ParseNode) -> n.ClassDecl:
    name = _first_token(node, "ID")
    fields, methods, runs = [], [], []
    for member in node.child_rules("Member"):
        inner = member.children[0]
        assert isinstance(inner, ParseNode)
        if inner.rule == "FieldDecl":
            fields.append(_build_field(inner))
        elif inner.rule == "MethodDecl":
            methods.append(_build_method(inner))
        else:
            runs.append(n.RunBlock(_build_block(inner.first_rule("Block")), inner.pos()))
    return n.ClassDecl(name.text, fields, methods, runs, node.pos())


def _build_enum(node: ParseNode) -> n.EnumDecl:
    ids = [c for c in node.children if isinstance(c, Token) and c.kind == "ID"]
    name, members = ids[0], [t.text for t in ids[1:]]
    return n.EnumDecl(name.text, members, node.pos())


def _build_field(node: ParseNode) -> n.FieldDecl:
    return n.FieldDecl(_type_name(node), _first_token(node, "ID").text, node.pos())


def _build_method(node: ParseNode) -> n.MethodDecl:
    contracts = [_build_contract(c) for c in node.child_rules("Contract")]
    ret = _type_name(node)
    name = _first_token(node, "ID")
    params = [_build_param(p) for p in node.child_rules("Param")]
    body = _build_block(node.first_rule("Block"))
    return n.MethodDecl(contracts, ret, name.text, params, body, node.pos())


def _build_contract(node: ParseNode) -> n.Contract:
    kind = node.literal_texts()[0]
    return n.Contract(kind, _build_expr(node.first_rule("Expr")), node.pos())


def _build_param(node: ParseNode) -> n.Param:
    return n.Param(_type_name(node), _first_token(node, "ID").text, node.pos())


def _type_name(node: ParseNode) -> str:
    ty = node.first_rule("Type")
    assert ty is not None
    tok = ty.children[0]
    assert isinstance(tok, Token)
    return tok.text


def _first_token(node: ParseNode, kind: str) -> Token:
    for c in node.children:
        if isinstance(c, Token) and c.kind == kind:
            return c
    raise AssertionError(f"no {kind} token under {node.rule}")


def _build_block(node: ParseNode | None) -> n.Block:
    assert node is not None and node.rule == "Block"
    return n.Block(node.pos(), [_build_stmt(s) for s in node.child_rules("Stmt")])


def _build_stmt(node: ParseNode) -> n.Stmt:
    inner = node.children[0]
    assert isinstance(inner, ParseNode)
    rule = inner.rule
    pos = inner.pos()
    if rule == "VarDecl":
        init_node = inner.first_rule("Expr")
        init = _build_expr(init_node) if init_node is not None else None
        return n.VarDecl(pos, _type_name(inner), _first_token(inner, "ID").text, init)
    if rule == "Assign":
        return n.Assign(
            pos, _first_token(inner, "ID").text, _build_expr(inner.first_rule("Expr"))
        )
    if rule == "If":
        stmts = inner.child_rules("Stmt")
        orelse = _build_stmt(stmts[1]) if len(stmts) > 1 else None
        return n.If(pos, _build_expr(inner.first_rule("Expr")), _build_stmt(stmts[0]), orelse)
    if rule == "While":
        exprs = inner.child_rules("Expr")
        invariants = [_build_expr(e) for e in exprs[:-1]]
        cond = _build_expr(exprs[-1])
        return n.While(pos, invariants, cond, _build_stmt(inner.child_rules("Stmt")[0]))
    if rule == "Return":
        value_node = inner.first_rule("Expr")
        return n.Return(pos, _build_expr(value_node) if value_node else None)
    if rule == "LabelStmt":
        return n.Label(pos, _first_token(inner, "ID").text)
    if rule == "Assert":
        return n.Assert(pos, _build_expr(inner.first_rule("Expr")))
    if rule == "LockStmt":
        return n.Lock(pos, _build_expr(inner.first_rule("Expr")))
    if rule == "ForkStmt":
        return n.Fork(pos, _build_expr(inner.first_rule("Expr")))
    if rule == "SeqBlock":
        return n.Sequential(pos, _build_block(inner.first_rule("Block")))
    assert rule == "Block"
    return _build_block(inner)


def _build_expr(node: ParseNode | None) -> n.Expr:
    assert node is not None and node.rule == "Expr"
    pos = node.pos()
    left = _build_unary(node.first_rule("Unary"))
    binop = node.first_rule("BinOp")
    if binop is None:
        return left
    op_tok = binop.children[0]
    assert isinstance(op_tok, Token)
    right = _build_expr(node.first_rule("Expr"))
    return n.Binary(pos, op_tok.text, left, right)


def _build_unary(node: ParseNode | None) -> n.Expr:
    assert node is not None and node.rule == "Unary"
    pos = node.pos()
    lits = node.literal_texts()
    if lits and lits[0] == "!":
        return n.Not(pos, _build_unary(node.first_rule("Unary")))
    if lits and lits[0] == "\\old":
        return n.Old(pos, _build_expr(node.first_rule("Expr")))
    if lits and lits[0] == "(":
        return _build_expr(node.first_rule("Expr"))
    atom = node.first_rule("Atom")
    assert atom is not None
    return _build_atom(atom)


def _build_atom(node: ParseNode) -> n.Expr:
    tok = node.children[0]
    assert isinstance(tok, Token)
    pos = (tok.line, tok.col)
    if tok.kind == "INT":
        return n.IntLit(pos, tok.text)
    if tok.kind == "ID":
        return n.Name(pos, tok.text)
    if tok.text == "true":
        return n.BoolLit(pos, True)
    if tok.text == "false":
        return n.BoolLit(pos, False)
    if tok.text == "null":
        return n.NullLit(pos)
    assert tok.text == "\\result"
    return n.ResultRef(pos)


_DECL_BUILDERS = {
    "ClassDecl": _build_class,
    "EnumDecl": _build_enum,
    "MethodDecl": _build_method,
}
