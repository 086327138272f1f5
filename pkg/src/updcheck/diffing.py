"""Structural diffing of library versions and change classification.

Two versions of a library are compared function by function (matched by
qualified name — the language has no overloading).  Bodies are aligned with
a two-level longest-common-subsequence: structurally identical statements
anchor the alignment, the leftovers between anchors pair up by statement
kind and are diffed recursively, and whatever remains becomes inserts and
deletes.  A post-pass converts a delete/insert of structurally identical
statements inside the same block into a single *move* edit.

Each edit classifies into exactly one change kind:

* ``branch-condition`` — any edit inside an if/while condition slot;
* ``control-flow-move`` — a statement moved within its block;
* ``control-flow-path`` — an inserted/deleted if, while or return; any other
  inserted/deleted statement whose subtree performs calls; or an expression
  update that changes the set of called targets (``std`` builtins don't
  count: they never carry dependency impact);
* ``data-flow`` — every other statement/expression edit, return expressions
  included;
* ``signature-changed`` — parameter types, return type or visibility differ;
* ``added`` / ``removed`` — the function exists on only one side (these
  never combine with other kinds).

A function change's ``kinds`` set is always derivable from its edits, so
re-classifying is idempotent.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .minilang import ast as A
from .minilang.printer import fragment, signature_string

KIND_DATA_FLOW = "data-flow"
KIND_CONTROL_FLOW_MOVE = "control-flow-move"
KIND_CONTROL_FLOW_PATH = "control-flow-path"
KIND_BRANCH_CONDITION = "branch-condition"
KIND_ADDED = "added"
KIND_REMOVED = "removed"
KIND_SIGNATURE_CHANGED = "signature-changed"

ALL_KINDS = frozenset({
    KIND_DATA_FLOW, KIND_CONTROL_FLOW_MOVE, KIND_CONTROL_FLOW_PATH,
    KIND_BRANCH_CONDITION, KIND_ADDED, KIND_REMOVED, KIND_SIGNATURE_CHANGED,
})

SLOT_STATEMENT = "statement"
SLOT_CONDITION = "condition"
SLOT_VALUE = "value"
SLOT_SIGNATURE = "signature"
SLOT_FUNCTION = "function"

_STMT_LABELS = {
    A.K_VAR_DECL: "var-decl", A.K_ASSIGN: "assign", A.K_IF: "if",
    A.K_WHILE: "while", A.K_RETURN: "return", A.K_ASSERT: "assert",
    A.K_EXPR_STMT: "expr-stmt",
}
_EXPR_LABELS = {
    A.K_INT_LIT: "int-literal", A.K_BOOL_LIT: "bool-literal",
    A.K_VAR: "variable", A.K_FIELD_ACCESS: "field-access",
    A.K_UNARY: "unary", A.K_BINARY: "binary", A.K_STATIC_CALL: "call",
    A.K_METHOD_CALL: "method-call", A.K_NEW: "new", A.K_THIS: "this",
}

_CONTROL_STMTS = frozenset({A.K_IF, A.K_WHILE, A.K_RETURN})


@dataclass(slots=True)
class Edit:
    op: str  # "insert" | "delete" | "update" | "move"
    node_kind: str
    slot: str
    old_span: tuple[int, int] | None = None
    new_span: tuple[int, int] | None = None
    old_text: str | None = None
    new_text: str | None = None
    old_node: object = field(default=None, repr=False)
    new_node: object = field(default=None, repr=False)

    def to_json(self) -> dict:
        def span_json(span):
            return ({"line": span[0], "col": span[1]}
                    if span is not None else None)

        return {
            "op": self.op,
            "node_kind": self.node_kind,
            "slot": self.slot,
            "old_span": span_json(self.old_span),
            "new_span": span_json(self.new_span),
            "old": self.old_text,
            "new": self.new_text,
        }


@dataclass(slots=True)
class FunctionChange:
    function: str  # qualified name
    kinds: frozenset[str]
    edits: list[Edit]

    def to_json(self) -> dict:
        return {
            "function": self.function,
            "kinds": sorted(self.kinds),
            "edits": [e.to_json() for e in self.edits],
        }


@dataclass(slots=True)
class ChangeSet:
    library: str
    old_version: str
    new_version: str
    changes: list[FunctionChange]

    def by_function(self) -> dict[str, FunctionChange]:
        return {c.function: c for c in self.changes}

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "library": self.library,
            "old_version": self.old_version,
            "new_version": self.new_version,
            "changes": [c.to_json() for c in self.changes],
        }


# --------------------------------------------------------------------------
# classification


def _call_targets(node) -> Counter:
    """Multiset of non-builtin call targets in an expression subtree.

    Resolved names are used when the checker has annotated the tree; the
    surface path is the fallback so unchecked trees still diff sensibly.
    """
    targets: Counter = Counter()
    for e in A.walk_exprs(node):
        if e.kind == A.K_STATIC_CALL:
            if e.res_kind == A.RES_BUILTIN:
                continue
            if e.res_kind == A.RES_DYNAMIC:
                targets[("dyn", e.res_recv_type, e.res_method)] += 1
            elif e.res_kind == A.RES_STATIC:
                targets[("static", e.res_target)] += 1
            else:
                targets[("path", e.path)] += 1
        elif e.kind == A.K_METHOD_CALL:
            targets[("dyn", e.res_recv_type, e.method)] += 1
    return targets


def _stmt_call_targets(stmt) -> Counter:
    targets: Counter = Counter()
    for s in A.walk_stmts([stmt]):
        for root in A.stmt_exprs(s):
            targets += _call_targets(root)
    return targets


def classify_edit(edit: Edit) -> str:
    if edit.node_kind == "function":
        return KIND_ADDED if edit.op == "insert" else KIND_REMOVED
    if edit.slot == SLOT_SIGNATURE:
        return KIND_SIGNATURE_CHANGED
    if edit.op == "move":
        return KIND_CONTROL_FLOW_MOVE
    if edit.slot == SLOT_CONDITION:
        return KIND_BRANCH_CONDITION
    if edit.op in ("insert", "delete"):
        node = edit.new_node if edit.op == "insert" else edit.old_node
        if edit.slot == SLOT_STATEMENT:
            if node.kind in _CONTROL_STMTS:
                return KIND_CONTROL_FLOW_PATH
            if _stmt_call_targets(node):
                return KIND_CONTROL_FLOW_PATH
            return KIND_DATA_FLOW
        # expression appearing/disappearing (e.g. a return growing a value)
        if node is not None and _call_targets(node):
            return KIND_CONTROL_FLOW_PATH
        return KIND_DATA_FLOW
    # expression or statement update
    if edit.slot == SLOT_STATEMENT:
        old_calls = _stmt_call_targets(edit.old_node)
        new_calls = _stmt_call_targets(edit.new_node)
    else:
        old_calls = _call_targets(edit.old_node)
        new_calls = _call_targets(edit.new_node)
    if old_calls != new_calls:
        return KIND_CONTROL_FLOW_PATH
    return KIND_DATA_FLOW


def classify_edits(edits: Iterable[Edit]) -> frozenset[str]:
    return frozenset(classify_edit(e) for e in edits)


# --------------------------------------------------------------------------
# alignment


def _lcs_pairs(a: Sequence, b: Sequence,
               eq: Callable[[object, object], bool]) -> list[tuple[int, int]]:
    """Longest common subsequence as matched (i, j) index pairs.

    Deterministic backtrack: on ties it prefers consuming from ``a`` first.
    """
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return []
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row = dp[i]
        below = dp[i + 1]
        for j in range(m - 1, -1, -1):
            if eq(a[i], b[j]):
                row[j] = below[j + 1] + 1
            else:
                row[j] = below[j] if below[j] >= row[j + 1] else row[j + 1]
    pairs = []
    i = j = 0
    while i < n and j < m:
        if eq(a[i], b[j]) and dp[i][j] == dp[i + 1][j + 1] + 1:
            pairs.append((i, j))
            i += 1
            j += 1
        elif dp[i + 1][j] >= dp[i][j + 1]:
            i += 1
        else:
            j += 1
    return pairs


def _same_kind(a, b) -> bool:
    return a.kind == b.kind


# --------------------------------------------------------------------------
# diffing


def diff_function(old_fn: A.FunctionDecl,
                  new_fn: A.FunctionDecl) -> Optional[FunctionChange]:
    """Diff two versions of one function; None when nothing changed."""
    edits: list[Edit] = []
    if _signature_key(old_fn) != _signature_key(new_fn):
        edits.append(Edit(
            op="update", node_kind="signature", slot=SLOT_SIGNATURE,
            old_span=old_fn.span, new_span=new_fn.span,
            old_text=signature_string(old_fn),
            new_text=signature_string(new_fn),
            old_node=old_fn, new_node=new_fn))
    _block_diff(old_fn.body, new_fn.body, edits)
    if not edits:
        return None
    return FunctionChange(function=old_fn.qualified_name,
                          kinds=classify_edits(edits), edits=edits)


def _signature_key(fn: A.FunctionDecl) -> tuple:
    def ty(tref):
        if tref is None:
            return None
        return tref.resolved if tref.resolved is not None else tref.parts

    return (tuple(ty(p.type_ref) for p in fn.params), ty(fn.return_type),
            fn.visibility)


def _block_diff(old: list, new: list, edits: list[Edit]) -> None:
    anchors = _lcs_pairs(old, new, lambda a, b: a == b)
    deletes: list = []
    inserts: list = []
    prev_i = prev_j = 0
    for i, j in anchors + [(len(old), len(new))]:
        _segment_diff(old[prev_i:i], new[prev_j:j], edits, deletes, inserts)
        prev_i, prev_j = i + 1, j + 1
    _pair_moves(deletes, inserts, edits)


def _segment_diff(seg_old: list, seg_new: list, edits: list[Edit],
                  deletes: list, inserts: list) -> None:
    pairs = _lcs_pairs(seg_old, seg_new, _same_kind)
    matched_old = {i for i, _ in pairs}
    matched_new = {j for _, j in pairs}
    for i, j in pairs:
        _stmt_pair_diff(seg_old[i], seg_new[j], edits)
    for i, stmt in enumerate(seg_old):
        if i not in matched_old:
            deletes.append(stmt)
    for j, stmt in enumerate(seg_new):
        if j not in matched_new:
            inserts.append(stmt)


def _pair_moves(deletes: list, inserts: list, edits: list[Edit]) -> None:
    """Same block, structurally identical delete+insert -> one move edit."""
    remaining = list(inserts)
    for stmt in deletes:
        match = next((s for s in remaining if s == stmt), None)
        if match is not None:
            remaining.remove(match)
            edits.append(Edit(
                op="move", node_kind=_STMT_LABELS[stmt.kind],
                slot=SLOT_STATEMENT, old_span=stmt.span,
                new_span=match.span, old_text=fragment(stmt),
                new_text=fragment(match), old_node=stmt, new_node=match))
        else:
            edits.append(Edit(
                op="delete", node_kind=_STMT_LABELS[stmt.kind],
                slot=SLOT_STATEMENT, old_span=stmt.span,
                old_text=fragment(stmt), old_node=stmt))
    for stmt in remaining:
        edits.append(Edit(
            op="insert", node_kind=_STMT_LABELS[stmt.kind],
            slot=SLOT_STATEMENT, new_span=stmt.span,
            new_text=fragment(stmt), new_node=stmt))


def _stmt_pair_diff(old, new, edits: list[Edit]) -> None:
    """Diff two same-kind statements in place."""
    if old == new:
        return
    k = old.kind
    if k == A.K_VAR_DECL:
        if old.name != new.name or old.type_ref != new.type_ref:
            _stmt_update(old, new, edits)
        else:
            _expr_diff(old.value, new.value, SLOT_VALUE, edits)
    elif k == A.K_ASSIGN:
        if old.name != new.name:
            _stmt_update(old, new, edits)
        else:
            _expr_diff(old.value, new.value, SLOT_VALUE, edits)
    elif k == A.K_IF:
        _expr_diff(old.cond, new.cond, SLOT_CONDITION, edits)
        _block_diff(old.then_body, new.then_body, edits)
        if old.else_body is not None and new.else_body is not None:
            _block_diff(old.else_body, new.else_body, edits)
        elif old.else_body is not None:
            _block_diff(old.else_body, [], edits)
        elif new.else_body is not None:
            _block_diff([], new.else_body, edits)
    elif k == A.K_WHILE:
        _expr_diff(old.cond, new.cond, SLOT_CONDITION, edits)
        _block_diff(old.body, new.body, edits)
    elif k == A.K_RETURN:
        if old.value is None or new.value is None:
            # a value appeared or disappeared
            edits.append(Edit(
                op="insert" if old.value is None else "delete",
                node_kind=_EXPR_LABELS[(new.value or old.value).kind],
                slot=SLOT_VALUE, old_span=old.span, new_span=new.span,
                old_text=None if old.value is None else fragment(old.value),
                new_text=None if new.value is None else fragment(new.value),
                old_node=old.value, new_node=new.value))
        else:
            _expr_diff(old.value, new.value, SLOT_VALUE, edits)
    elif k == A.K_ASSERT:
        _expr_diff(old.cond, new.cond, SLOT_VALUE, edits)
    elif k == A.K_EXPR_STMT:
        _expr_diff(old.value, new.value, SLOT_VALUE, edits)
    else:  # pragma: no cover - parser produces no other kinds
        raise AssertionError(f"unknown statement kind {k}")


def _stmt_update(old, new, edits: list[Edit]) -> None:
    edits.append(Edit(
        op="update", node_kind=_STMT_LABELS[old.kind], slot=SLOT_STATEMENT,
        old_span=old.span, new_span=new.span, old_text=fragment(old),
        new_text=fragment(new), old_node=old, new_node=new))


def _expr_diff(old, new, slot: str, edits: list[Edit]) -> None:
    if old == new:
        return
    if old.kind == new.kind:
        k = old.kind
        if k == A.K_BINARY and old.op == new.op:
            _expr_diff(old.lhs, new.lhs, slot, edits)
            _expr_diff(old.rhs, new.rhs, slot, edits)
            return
        if k == A.K_UNARY and old.op == new.op:
            _expr_diff(old.operand, new.operand, slot, edits)
            return
        if (k == A.K_STATIC_CALL and old.path == new.path
                and len(old.args) == len(new.args)):
            for a, b in zip(old.args, new.args):
                _expr_diff(a, b, slot, edits)
            return
        if (k == A.K_METHOD_CALL and old.method == new.method
                and len(old.args) == len(new.args)):
            _expr_diff(old.receiver, new.receiver, slot, edits)
            for a, b in zip(old.args, new.args):
                _expr_diff(a, b, slot, edits)
            return
        if (k == A.K_NEW and old.path == new.path
                and len(old.args) == len(new.args)):
            for a, b in zip(old.args, new.args):
                _expr_diff(a, b, slot, edits)
            return
        if k == A.K_FIELD_ACCESS and old.name == new.name:
            _expr_diff(old.obj, new.obj, slot, edits)
            return
    edits.append(Edit(
        op="update", node_kind=_EXPR_LABELS[old.kind], slot=slot,
        old_span=old.span, new_span=new.span, old_text=fragment(old),
        new_text=fragment(new), old_node=old, new_node=new))


def _collect_functions(modules: Iterable[A.ModuleAst]) -> dict[str, A.FunctionDecl]:
    out: dict[str, A.FunctionDecl] = {}
    for mod in modules:
        for fn in mod.declared_functions():
            out[fn.qualified_name] = fn
    return out


def diff_library(old_modules: Iterable[A.ModuleAst],
                 new_modules: Iterable[A.ModuleAst],
                 library: str, old_version: str,
                 new_version: str) -> ChangeSet:
    """Compare two versions of a package, function by function."""
    old_fns = _collect_functions(old_modules)
    new_fns = _collect_functions(new_modules)
    changes: list[FunctionChange] = []
    for qn in sorted(old_fns.keys() | new_fns.keys()):
        old_fn = old_fns.get(qn)
        new_fn = new_fns.get(qn)
        if old_fn is None:
            changes.append(FunctionChange(
                function=qn, kinds=frozenset({KIND_ADDED}),
                edits=[Edit(op="insert", node_kind="function",
                            slot=SLOT_FUNCTION, new_span=new_fn.span,
                            new_text=fragment(new_fn), new_node=new_fn)]))
        elif new_fn is None:
            changes.append(FunctionChange(
                function=qn, kinds=frozenset({KIND_REMOVED}),
                edits=[Edit(op="delete", node_kind="function",
                            slot=SLOT_FUNCTION, old_span=old_fn.span,
                            old_text=fragment(old_fn), old_node=old_fn)]))
        else:
            change = diff_function(old_fn, new_fn)
            if change is not None:
                changes.append(change)
    return ChangeSet(library=library, old_version=old_version,
                     new_version=new_version, changes=changes)
