"""Evaluator kernel: the hot loop of the MiniLang interpreter.

This module is deliberately self-contained and plain: at build time it is
copied to ``_evalcore_c.py`` and compiled with Cython, and
:mod:`updcheck.runtime.interp` picks whichever of the two imports.  Keep it
free of anything Cython's pure-Python mode cannot compile.

Semantics implemented here:

* ints are 64-bit two's complement; +, -, *, unary - and abs wrap on
  overflow (so ``abs(INT_MIN) == INT_MIN``),
* / truncates toward zero and % satisfies ``a == (a / b) * b + a % b``;
  both fault on a zero divisor,
* ``&&`` and ``||`` short-circuit,
* every statement and expression evaluation burns one unit of fuel,
* a call edge is recorded iff at least one client-source frame is on the
  call stack when the call is made, so dependency-internal activity below a
  test that never went through project code leaves no trace.
"""

from updcheck.errors import (
    AssertFailedFault,
    CallDepthFault,
    DivisionByZeroFault,
    FuelExhaustedFault,
    MissingReturnFault,
)
from updcheck.minilang.ast import (
    K_ASSERT,
    K_ASSIGN,
    K_BINARY,
    K_BOOL_LIT,
    K_EXPR_STMT,
    K_FIELD_ACCESS,
    K_IF,
    K_INT_LIT,
    K_METHOD_CALL,
    K_NEW,
    K_RETURN,
    K_STATIC_CALL,
    K_THIS,
    K_UNARY,
    K_VAR,
    K_VAR_DECL,
    K_WHILE,
    OP_ADD,
    OP_AND,
    OP_DIV,
    OP_EQ,
    OP_GE,
    OP_GT,
    OP_LE,
    OP_LT,
    OP_MOD,
    OP_MUL,
    OP_NE,
    OP_OR,
    OP_SUB,
    OP_XOR,
    RES_BUILTIN,
    RES_STATIC,
    U_ABS,
    U_NEG,
    U_NOT,
)

_UINT_MASK = 0xFFFFFFFFFFFFFFFF
_INT_MAX = 0x7FFFFFFFFFFFFFFF
_TWO_64 = 0x10000000000000000


class Instance:
    """A MiniLang object: class name plus positional field values."""

    __slots__ = ("cls", "fields")

    def __init__(self, cls, fields):
        self.cls = cls
        self.fields = fields


class RT:
    """Per-run interpreter state.

    Not reusable after a fault; the test runner builds a fresh RT per test
    and shares only the trace set between them.
    """

    __slots__ = ("funcs", "dispatch", "client_src", "trace", "fuel",
                 "max_depth", "depth", "client_depth", "out")

    def __init__(self, funcs, dispatch, client_src, trace, fuel, max_depth):
        self.funcs = funcs            # qualified name -> FunctionDecl
        self.dispatch = dispatch      # (class qn, method name) -> FunctionDecl
        self.client_src = client_src  # frozenset of client source fn names
        self.trace = trace            # set of (caller qn, callee qn) or None
        self.fuel = fuel
        self.max_depth = max_depth
        self.depth = 0
        self.client_depth = 0
        self.out = []                 # std.print_* output lines


def _wrap(v):
    v &= _UINT_MASK
    if v > _INT_MAX:
        v -= _TWO_64
    return v


def _fault_at(fn, node, exc_type, message):
    span = node.span
    if span is None:
        return exc_type(message, file=fn.source_file)
    return exc_type(message, file=fn.source_file, line=span[0])


def call_function(rt, fn, args, this):
    """Invoke ``fn`` with evaluated ``args`` (and ``this`` for methods)."""
    if rt.depth >= rt.max_depth:
        raise CallDepthFault(
            f"call depth limit ({rt.max_depth}) exceeded entering "
            f"{fn.qualified_name}")
    rt.depth += 1
    is_client = fn.qualified_name in rt.client_src
    if is_client:
        rt.client_depth += 1
    slots = [None] * fn.n_slots
    if fn.owner_class is not None:
        slots[0] = this
        base = 1
    else:
        base = 0
    i = 0
    for arg in args:
        slots[base + i] = arg
        i += 1
    result = exec_block(rt, fn, slots, fn.body)
    rt.depth -= 1
    if is_client:
        rt.client_depth -= 1
    if result is None:
        if fn.return_type is None:
            return None
        raise MissingReturnFault(
            f"{fn.qualified_name} finished without returning a value",
            file=fn.source_file,
            line=fn.end_span[0] if fn.end_span is not None else None)
    return result[0]


def exec_block(rt, fn, slots, body):
    """Run statements; returns None if control fell through, else a 1-tuple
    holding the returned value."""
    for stmt in body:
        rt.fuel -= 1
        if rt.fuel < 0:
            raise _fault_at(fn, stmt, FuelExhaustedFault, "fuel exhausted")
        k = stmt.kind
        if k == K_VAR_DECL or k == K_ASSIGN:
            slots[stmt.slot] = eval_expr(rt, fn, slots, stmt.value)
        elif k == K_IF:
            if eval_expr(rt, fn, slots, stmt.cond):
                result = exec_block(rt, fn, slots, stmt.then_body)
                if result is not None:
                    return result
            elif stmt.else_body is not None:
                result = exec_block(rt, fn, slots, stmt.else_body)
                if result is not None:
                    return result
        elif k == K_RETURN:
            if stmt.value is None:
                return (None,)
            return (eval_expr(rt, fn, slots, stmt.value),)
        elif k == K_EXPR_STMT:
            eval_expr(rt, fn, slots, stmt.value)
        elif k == K_WHILE:
            while eval_expr(rt, fn, slots, stmt.cond):
                result = exec_block(rt, fn, slots, stmt.body)
                if result is not None:
                    return result
                rt.fuel -= 1
                if rt.fuel < 0:
                    raise _fault_at(fn, stmt, FuelExhaustedFault,
                                    "fuel exhausted")
        elif k == K_ASSERT:
            if not eval_expr(rt, fn, slots, stmt.cond):
                raise _fault_at(fn, stmt, AssertFailedFault,
                                "assertion failed")
        else:
            raise AssertionError(f"unknown statement kind {k}")
    return None


def eval_expr(rt, fn, slots, node):
    rt.fuel -= 1
    if rt.fuel < 0:
        raise _fault_at(fn, node, FuelExhaustedFault, "fuel exhausted")
    k = node.kind

    if k == K_INT_LIT or k == K_BOOL_LIT:
        return node.value
    if k == K_VAR:
        return slots[node.slot]
    if k == K_BINARY:
        code = node.op_code
        if code == OP_AND:
            if not eval_expr(rt, fn, slots, node.lhs):
                return False
            return eval_expr(rt, fn, slots, node.rhs)
        if code == OP_OR:
            if eval_expr(rt, fn, slots, node.lhs):
                return True
            return eval_expr(rt, fn, slots, node.rhs)
        a = eval_expr(rt, fn, slots, node.lhs)
        b = eval_expr(rt, fn, slots, node.rhs)
        if code == OP_ADD:
            return _wrap(a + b)
        if code == OP_SUB:
            return _wrap(a - b)
        if code == OP_MUL:
            return _wrap(a * b)
        if code == OP_LT:
            return a < b
        if code == OP_LE:
            return a <= b
        if code == OP_GT:
            return a > b
        if code == OP_GE:
            return a >= b
        if code == OP_EQ:
            return a == b
        if code == OP_NE:
            return a != b
        if code == OP_DIV or code == OP_MOD:
            if b == 0:
                raise _fault_at(fn, node, DivisionByZeroFault,
                                "division by zero")
            q = a // b
            if q < 0 and q * b != a:
                q += 1  # floor -> truncation toward zero
            if code == OP_DIV:
                return _wrap(q)
            return _wrap(a - q * b)
        if code == OP_XOR:
            return a != b
        raise AssertionError(f"unknown binary op code {code}")
    if k == K_STATIC_CALL:
        res = node.res_kind
        if res == RES_STATIC:
            target = rt.funcs[node.res_target]
            args = [eval_expr(rt, fn, slots, arg) for arg in node.args]
            if rt.trace is not None and rt.client_depth > 0:
                rt.trace.add((fn.qualified_name, node.res_target))
            return call_function(rt, target, args, None)
        if res == RES_BUILTIN:
            value = eval_expr(rt, fn, slots, node.args[0])
            if node.res_target == "std.print_int":
                rt.out.append(str(value))
            else:
                rt.out.append("true" if value else "false")
            return None
        # receiver dispatch through a local's value
        recv = slots[node.res_slot]
        for idx in node.res_fpath:
            recv = recv.fields[idx]
        target = rt.dispatch[(recv.cls, node.res_method)]
        args = [eval_expr(rt, fn, slots, arg) for arg in node.args]
        if rt.trace is not None and rt.client_depth > 0:
            rt.trace.add((fn.qualified_name, target.qualified_name))
        return call_function(rt, target, args, recv)
    if k == K_UNARY:
        v = eval_expr(rt, fn, slots, node.operand)
        code = node.op_code
        if code == U_NEG:
            return _wrap(-v)
        if code == U_NOT:
            return not v
        return _wrap(-v) if v < 0 else v  # abs
    if k == K_FIELD_ACCESS:
        obj = eval_expr(rt, fn, slots, node.obj)
        return obj.fields[node.field_index]
    if k == K_METHOD_CALL:
        recv = eval_expr(rt, fn, slots, node.receiver)
        target = rt.dispatch[(recv.cls, node.method)]
        args = [eval_expr(rt, fn, slots, arg) for arg in node.args]
        if rt.trace is not None and rt.client_depth > 0:
            rt.trace.add((fn.qualified_name, target.qualified_name))
        return call_function(rt, target, args, recv)
    if k == K_NEW:
        return Instance(node.res_cls,
                        [eval_expr(rt, fn, slots, arg) for arg in node.args])
    if k == K_THIS:
        return slots[0]
    raise AssertionError(f"unknown expression kind {k}")
