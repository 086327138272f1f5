"""AST node definitions for MiniLang.

Nodes are plain mutable dataclasses.  Two trees compare equal when their
*source structure* is equal: spans and checker annotations are declared with
``compare=False`` so that parsing the pretty-printed form of a tree yields a
structurally equal tree, and so that diffing ignores formatting entirely.

Checker annotations (``ty``, slot numbers, call resolutions) are filled in by
:mod:`updcheck.minilang.checker` and read by the evaluator kernel and the
call-graph builder.  Every node also carries an integer ``kind`` class
attribute used by the kernel for fast dispatch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar, Optional, Union

# (line, col), 1-based.  Statement and expression spans point at the first
# token of the construct; functions also record where their body ends.
Span = "tuple[int, int]"

# Node kind tags (kernel dispatch).
K_INT_LIT = 1
K_BOOL_LIT = 2
K_VAR = 3
K_FIELD_ACCESS = 4
K_UNARY = 5
K_BINARY = 6
K_STATIC_CALL = 7
K_METHOD_CALL = 8
K_NEW = 9
K_THIS = 10

K_VAR_DECL = 20
K_ASSIGN = 21
K_IF = 22
K_WHILE = 23
K_RETURN = 24
K_ASSERT = 25
K_EXPR_STMT = 26

# Binary operator codes (kernel dispatch).  Grouped by semantics.
OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_MOD = 1, 2, 3, 4, 5
OP_LT, OP_LE, OP_GT, OP_GE = 6, 7, 8, 9
OP_EQ, OP_NE = 10, 11
OP_AND, OP_OR, OP_XOR = 12, 13, 14

BINARY_OP_CODES = {
    "+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV, "%": OP_MOD,
    "<": OP_LT, "<=": OP_LE, ">": OP_GT, ">=": OP_GE,
    "==": OP_EQ, "!=": OP_NE,
    "&&": OP_AND, "||": OP_OR, "^": OP_XOR,
}

ARITH_OPS = frozenset({"+", "-", "*", "/", "%"})
REL_OPS = frozenset({"<", "<=", ">", ">="})
EQ_OPS = frozenset({"==", "!="})
LOGIC_OPS = frozenset({"&&", "||", "^"})

# Unary operator codes.
U_NEG, U_NOT, U_ABS = 1, 2, 3
UNARY_OP_CODES = {"-": U_NEG, "!": U_NOT, "abs": U_ABS}

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1


@dataclass(slots=True)
class TypeRef:
    """A surface type reference: ``int``, ``bool``, ``C`` or ``pkg.C``."""

    parts: tuple[str, ...]
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    # Resolved type name: "int", "bool", or a qualified "pkg.Name".
    resolved: str | None = field(default=None, compare=False, repr=False)

    def render(self) -> str:
        return ".".join(self.parts)


# --------------------------------------------------------------------------
# Expressions


@dataclass(slots=True)
class IntLit:
    kind: ClassVar[int] = K_INT_LIT
    value: int
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    ty: str | None = field(default=None, compare=False, repr=False)


@dataclass(slots=True)
class BoolLit:
    kind: ClassVar[int] = K_BOOL_LIT
    value: bool
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    ty: str | None = field(default=None, compare=False, repr=False)


@dataclass(slots=True)
class Var:
    kind: ClassVar[int] = K_VAR
    name: str
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    ty: str | None = field(default=None, compare=False, repr=False)
    slot: int = field(default=-1, compare=False, repr=False)


@dataclass(slots=True)
class FieldAccess:
    """``obj.name`` where ``obj`` is an expression (including a local var)."""

    kind: ClassVar[int] = K_FIELD_ACCESS
    obj: "Expr"
    name: str
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    ty: str | None = field(default=None, compare=False, repr=False)
    field_index: int = field(default=-1, compare=False, repr=False)


@dataclass(slots=True)
class Unary:
    kind: ClassVar[int] = K_UNARY
    op: str  # "-", "!", "abs"
    operand: "Expr"
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    ty: str | None = field(default=None, compare=False, repr=False)
    op_code: int = field(default=0, compare=False, repr=False)


@dataclass(slots=True)
class Binary:
    kind: ClassVar[int] = K_BINARY
    op: str
    lhs: "Expr"
    rhs: "Expr"
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    ty: str | None = field(default=None, compare=False, repr=False)
    op_code: int = field(default=0, compare=False, repr=False)


# Call resolution tags (annotated on StaticCall by the checker).
RES_STATIC = 0     # direct call to a known function
RES_DYNAMIC = 1    # receiver-based dispatch through a local's value
RES_BUILTIN = 2    # std.* builtin


@dataclass(slots=True)
class StaticCall:
    """A call written as a dotted name: ``f(..)``, ``C.m(..)``, ``pkg.C.m(..)``.

    The parser cannot tell a class-qualified call from a call through a local
    variable, so resolution is an annotation: ``res_kind`` distinguishes a
    direct (static) target from receiver dispatch through ``path[0]``.
    """

    kind: ClassVar[int] = K_STATIC_CALL
    path: tuple[str, ...]
    args: list["Expr"]
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    ty: str | None = field(default=None, compare=False, repr=False)
    res_kind: int = field(default=-1, compare=False, repr=False)
    # RES_STATIC / RES_BUILTIN: qualified target name ("pkg.f", "pkg.C.m", "std.print_int").
    res_target: str | None = field(default=None, compare=False, repr=False)
    # RES_DYNAMIC: local slot of path[0], field indices for path[1:-1], method name,
    # and the static type of the receiver chain end (for call-graph candidates).
    res_slot: int = field(default=-1, compare=False, repr=False)
    res_fpath: tuple[int, ...] = field(default=(), compare=False, repr=False)
    res_method: str | None = field(default=None, compare=False, repr=False)
    res_recv_type: str | None = field(default=None, compare=False, repr=False)


@dataclass(slots=True)
class MethodCall:
    """``recv.m(..)`` where ``recv`` is a non-name expression (``this``, a
    call result, a parenthesised expression, ``new C(..)``)."""

    kind: ClassVar[int] = K_METHOD_CALL
    receiver: "Expr"
    method: str
    args: list["Expr"]
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    ty: str | None = field(default=None, compare=False, repr=False)
    res_recv_type: str | None = field(default=None, compare=False, repr=False)


@dataclass(slots=True)
class New:
    kind: ClassVar[int] = K_NEW
    path: tuple[str, ...]
    args: list["Expr"]
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    ty: str | None = field(default=None, compare=False, repr=False)
    res_cls: str | None = field(default=None, compare=False, repr=False)
    res_nfields: int = field(default=-1, compare=False, repr=False)


@dataclass(slots=True)
class This:
    kind: ClassVar[int] = K_THIS
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    ty: str | None = field(default=None, compare=False, repr=False)


Expr = Union[IntLit, BoolLit, Var, FieldAccess, Unary, Binary,
             StaticCall, MethodCall, New, This]


# --------------------------------------------------------------------------
# Statements


@dataclass(slots=True)
class VarDecl:
    kind: ClassVar[int] = K_VAR_DECL
    name: str
    type_ref: TypeRef
    value: Expr
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    slot: int = field(default=-1, compare=False, repr=False)


@dataclass(slots=True)
class Assign:
    kind: ClassVar[int] = K_ASSIGN
    name: str
    value: Expr
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    slot: int = field(default=-1, compare=False, repr=False)


@dataclass(slots=True)
class If:
    kind: ClassVar[int] = K_IF
    cond: Expr
    then_body: list["Stmt"]
    else_body: Optional[list["Stmt"]]
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(slots=True)
class While:
    kind: ClassVar[int] = K_WHILE
    cond: Expr
    body: list["Stmt"]
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(slots=True)
class Return:
    kind: ClassVar[int] = K_RETURN
    value: Optional[Expr]
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(slots=True)
class Assert:
    kind: ClassVar[int] = K_ASSERT
    cond: Expr
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(slots=True)
class ExprStmt:
    kind: ClassVar[int] = K_EXPR_STMT
    value: Expr
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)


Stmt = Union[VarDecl, Assign, If, While, Return, Assert, ExprStmt]


# --------------------------------------------------------------------------
# Declarations


@dataclass(slots=True)
class Param:
    name: str
    type_ref: TypeRef
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(slots=True)
class FunctionDecl:
    """A free function or a method (``owner_class`` set)."""

    name: str
    params: list[Param]
    return_type: Optional[TypeRef]  # None means void
    body: list[Stmt]
    visibility: str = "public"  # "public" | "private"
    owner_class: Optional[str] = None
    qualified_name: str = ""
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    end_span: tuple[int, int] | None = field(default=None, compare=False, repr=False)
    source_file: str = field(default="", compare=False, repr=False)
    # Annotations: does the body mention `this`; total local slot count.
    uses_this: bool = field(default=False, compare=False, repr=False)
    n_slots: int = field(default=0, compare=False, repr=False)

    @property
    def is_method(self) -> bool:
        return self.owner_class is not None

    @property
    def is_test(self) -> bool:
        return (self.name.startswith("test_") and not self.is_method
                and self.visibility == "public" and not self.params)


@dataclass(slots=True)
class FieldDecl:
    name: str
    type_ref: TypeRef
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(slots=True)
class MethodSig:
    name: str
    params: list[Param]
    return_type: Optional[TypeRef]
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(slots=True)
class InterfaceDecl:
    name: str
    methods: list[MethodSig]
    qualified_name: str = ""
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(slots=True)
class ClassDecl:
    name: str
    superclass: Optional[tuple[str, ...]]
    interfaces: list[tuple[str, ...]]
    fields: list[FieldDecl]
    methods: list[FunctionDecl]
    qualified_name: str = ""
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(slots=True)
class ModuleAst:
    """One parsed ``.ml0`` source file."""

    package_name: str
    imports: list[str]
    classes: list[ClassDecl]
    interfaces: list[InterfaceDecl]
    functions: list[FunctionDecl]
    source_name: str = field(default="", compare=False)

    def declared_functions(self):
        """All function declarations in the module, methods included."""
        for cls in self.classes:
            yield from cls.methods
        yield from self.functions


def walk_exprs(node):
    """Yield every expression node inside an expression tree, preorder."""
    stack = [node]
    while stack:
        e = stack.pop()
        yield e
        k = e.kind
        if k == K_UNARY:
            stack.append(e.operand)
        elif k == K_BINARY:
            stack.append(e.rhs)
            stack.append(e.lhs)
        elif k == K_FIELD_ACCESS:
            stack.append(e.obj)
        elif k == K_STATIC_CALL or k == K_NEW:
            stack.extend(reversed(e.args))
        elif k == K_METHOD_CALL:
            stack.extend(reversed(e.args))
            stack.append(e.receiver)


def walk_stmts(body):
    """Yield every statement in a body, preorder, including nested blocks."""
    stack = list(reversed(body))
    while stack:
        s = stack.pop()
        yield s
        if s.kind == K_IF:
            if s.else_body is not None:
                stack.extend(reversed(s.else_body))
            stack.extend(reversed(s.then_body))
        elif s.kind == K_WHILE:
            stack.extend(reversed(s.body))


def stmt_exprs(stmt):
    """Yield the direct expression children of a statement (not recursive
    into nested statement blocks)."""
    k = stmt.kind
    if k == K_VAR_DECL or k == K_ASSIGN or k == K_EXPR_STMT:
        yield stmt.value
    elif k == K_IF or k == K_ASSERT:
        yield stmt.cond
    elif k == K_WHILE:
        yield stmt.cond
    elif k == K_RETURN:
        if stmt.value is not None:
            yield stmt.value


def function_exprs(fn: FunctionDecl):
    """Yield every expression node in a function body."""
    for stmt in walk_stmts(fn.body):
        for root in stmt_exprs(stmt):
            yield from walk_exprs(root)
