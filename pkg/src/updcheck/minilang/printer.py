"""Canonical pretty-printer for MiniLang ASTs.

The printed form is the normal form used everywhere trees must round-trip
through text (mutant source generation, report fragments): parsing the output
of ``print_module`` yields a structurally equal tree.  Parentheses are
emitted only where precedence demands them.
"""

from __future__ import annotations

from . import ast as A

INDENT = "    "

# Binary precedence levels, loosest first (must agree with the parser).
_PREC = {
    "||": 1, "^": 2, "&&": 3,
    "==": 4, "!=": 4,
    "<": 5, "<=": 5, ">": 5, ">=": 5,
    "+": 6, "-": 6,
    "*": 7, "/": 7, "%": 7,
}
_PREC_UNARY = 8
_PREC_POSTFIX = 9


def print_expr(e: A.Expr, min_prec: int = 0) -> str:
    k = e.kind
    if k == A.K_INT_LIT:
        return str(e.value)
    if k == A.K_BOOL_LIT:
        return "true" if e.value else "false"
    if k == A.K_VAR:
        return e.name
    if k == A.K_THIS:
        return "this"
    if k == A.K_FIELD_ACCESS:
        return f"{print_expr(e.obj, _PREC_POSTFIX)}.{e.name}"
    if k == A.K_UNARY:
        if e.op == "abs":
            return f"abs({print_expr(e.operand)})"
        inner = print_expr(e.operand, _PREC_POSTFIX)
        if not _is_postfix_level(e.operand):
            inner = f"({print_expr(e.operand)})"
        text = e.op + inner
        return text if min_prec <= _PREC_UNARY else f"({text})"
    if k == A.K_BINARY:
        prec = _PREC[e.op]
        lhs = print_expr(e.lhs, prec)
        rhs = print_expr(e.rhs, prec + 1)
        text = f"{lhs} {e.op} {rhs}"
        return text if prec >= min_prec else f"({text})"
    if k == A.K_STATIC_CALL:
        return f"{'.'.join(e.path)}({_args(e.args)})"
    if k == A.K_METHOD_CALL:
        recv = print_expr(e.receiver, _PREC_POSTFIX)
        if not _is_postfix_level(e.receiver):
            recv = f"({print_expr(e.receiver)})"
        return f"{recv}.{e.method}({_args(e.args)})"
    if k == A.K_NEW:
        return f"new {'.'.join(e.path)}({_args(e.args)})"
    raise AssertionError(f"unknown expression node: {e!r}")


def _is_postfix_level(e: A.Expr) -> bool:
    if e.kind == A.K_UNARY:
        return e.op == "abs"
    return e.kind != A.K_BINARY


def _args(args: list[A.Expr]) -> str:
    return ", ".join(print_expr(a) for a in args)


def print_stmt(stmt: A.Stmt, depth: int = 0) -> str:
    pad = INDENT * depth
    k = stmt.kind
    if k == A.K_VAR_DECL:
        return (f"{pad}var {stmt.name}: {stmt.type_ref.render()} = "
                f"{print_expr(stmt.value)};")
    if k == A.K_ASSIGN:
        return f"{pad}{stmt.name} = {print_expr(stmt.value)};"
    if k == A.K_IF:
        out = f"{pad}if {print_expr(stmt.cond)} {{\n"
        out += _body(stmt.then_body, depth + 1)
        out += f"{pad}}}"
        if stmt.else_body is not None:
            out += " else {\n"
            out += _body(stmt.else_body, depth + 1)
            out += f"{pad}}}"
        return out
    if k == A.K_WHILE:
        out = f"{pad}while {print_expr(stmt.cond)} {{\n"
        out += _body(stmt.body, depth + 1)
        out += f"{pad}}}"
        return out
    if k == A.K_RETURN:
        if stmt.value is None:
            return f"{pad}return;"
        return f"{pad}return {print_expr(stmt.value)};"
    if k == A.K_ASSERT:
        return f"{pad}assert {print_expr(stmt.cond)};"
    if k == A.K_EXPR_STMT:
        return f"{pad}{print_expr(stmt.value)};"
    raise AssertionError(f"unknown statement node: {stmt!r}")


def _body(stmts: list[A.Stmt], depth: int) -> str:
    return "".join(print_stmt(s, depth) + "\n" for s in stmts)


def signature_string(fn: A.FunctionDecl) -> str:
    params = ", ".join(f"{p.name}: {p.type_ref.render()}" for p in fn.params)
    ret = f" -> {fn.return_type.render()}" if fn.return_type is not None else ""
    prefix = "private " if fn.visibility == "private" else ""
    return f"{prefix}fn {fn.name}({params}){ret}"


def print_function(fn: A.FunctionDecl, depth: int = 0) -> str:
    pad = INDENT * depth
    out = f"{pad}{signature_string(fn)} {{\n"
    out += _body(fn.body, depth + 1)
    out += f"{pad}}}"
    return out


def print_module(mod: A.ModuleAst) -> str:
    chunks: list[str] = [f"package {mod.package_name};"]
    if mod.imports:
        chunks.append("\n".join(f"import {name};" for name in mod.imports))
    for iface in mod.interfaces:
        lines = [f"interface {iface.name} {{"]
        for sig in iface.methods:
            params = ", ".join(f"{p.name}: {p.type_ref.render()}"
                               for p in sig.params)
            ret = (f" -> {sig.return_type.render()}"
                   if sig.return_type is not None else "")
            lines.append(f"{INDENT}fn {sig.name}({params}){ret};")
        lines.append("}")
        chunks.append("\n".join(lines))
    for cls in mod.classes:
        head = f"class {cls.name}"
        if cls.superclass is not None:
            head += f" extends {'.'.join(cls.superclass)}"
        if cls.interfaces:
            head += " implements " + ", ".join(
                ".".join(i) for i in cls.interfaces)
        parts: list[str] = []
        if cls.fields:
            parts.append("\n".join(
                f"{INDENT}{f.name}: {f.type_ref.render()};"
                for f in cls.fields))
        for m in cls.methods:
            parts.append(print_function(m, depth=1))
        body = "\n\n".join(parts)
        chunks.append(f"{head} {{\n{body}\n}}" if body else f"{head} {{\n}}")
    for fn in mod.functions:
        chunks.append(print_function(fn))
    return "\n\n".join(chunks) + "\n"


def fragment(node) -> str:
    """Render any expression, statement or function for display in reports."""
    if isinstance(node, A.FunctionDecl):
        return print_function(node)
    if hasattr(node, "kind") and node.kind >= A.K_VAR_DECL:
        return print_stmt(node)
    return print_expr(node)
