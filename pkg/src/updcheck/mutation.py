"""Seeded-fault benchmark: mutate covered dependency functions and measure
which faults the test suite and the static impact analysis each detect.

Five classic expression-level mutation operators are implemented.  Every
mutant replaces exactly one expression node of one dependency function:

* ``ABS`` — each int-typed expression ``v`` becomes ``abs(v)``, ``-abs(v)``
  and ``0``;
* ``AOR`` — each arithmetic operator becomes every other one of
  ``+ - * / %``;
* ``LCR`` — each logical operator becomes every other one of ``&& || ^``;
* ``ROR`` — each comparison operator becomes every other one of
  ``< <= > >= == !=`` that still type-checks (``==``/``!=`` over bools can
  only swap with each other, the four orderings need int operands);
* ``UOI`` — each int-typed variable occurrence ``v`` becomes ``v + 1`` and
  ``v - 1``; each bool-typed expression ``b`` becomes ``!b``.

Replacing an operator with itself is never emitted, and neither is any
replacement that leaves the tree structurally unchanged (``0`` over a
literal ``0``): such a "mutant" would not be a change at all.  Sites are
enumerated in preorder over the function body and variants in a fixed
order, so mutant ids are stable across runs.

A mutant is materialised as a full source tree for its package: the host
module is copied, the one node replaced, and every module pretty-printed.
The benchmark then treats the mutated tree exactly like a candidate release:
it is re-linked against the client, the test suite re-runs against it
(a *kill* is any failing or erroring test — the interpreter's fuel bound
turns even introduced infinite loops into deterministic kills), and the
static analysis assesses the structural diff between the original and the
mutated package (a *flag* is an "unsafe" verdict).

``run_benchmark`` refuses a failing baseline suite, restricts mutation to
dependency functions the baseline tests actually executed, and reports a
detection score per tool.  Mutants are independent, so they can be spread
over a worker pool; results are reduced in mutant order, making the run
deterministic regardless of ``jobs``.
"""

from __future__ import annotations

import copy
import csv
import importlib
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from types import ModuleType
from typing import Iterable, Iterator, Sequence

from .callgraph import CallGraph, build_call_graph, client_roots
from .diffing import diff_library
from .errors import MiniLangError, RedBaselineError
from .impact import VERDICT_UNSAFE, assess_changes
from .metrics import DetectionReport, detection_report
from .minilang import ast as A
from .minilang.printer import fragment, print_module
from .project import (
    PackageUnit,
    Program,
    RawPackage,
    link_program,
    relink_with_sources,
)
from .registry import Version
from .runtime.interp import DEFAULT_FUEL, DEFAULT_MAX_DEPTH
from .runtime.testrun import STATUS_PASS, run_tests

#: Canonical operator order; mutant generation always follows it.
OPERATORS = ("ABS", "AOR", "LCR", "ROR", "UOI")

_AOR_OPS = ("+", "-", "*", "/", "%")
_LCR_OPS = ("&&", "||", "^")
_ROR_OPS = ("<", "<=", ">", ">=", "==", "!=")
_ROR_BOOL_OPS = ("==", "!=")

STATUS_OK = "ok"
STATUS_TYPE_ERROR = "type-error"

# A node path addresses an AST node relative to its FunctionDecl: string
# steps are attribute names, int steps index into lists.  Example:
# ("body", 0, "value", "lhs") is the left operand of the first statement's
# value expression.
NodePath = "tuple[str | int, ...]"


@dataclass(slots=True)
class Mutant:
    """One single-node edit of one dependency function.

    ``mutated_sources`` holds the complete source tree of the package with
    exactly this edit applied (relative path -> pretty-printed text), ready
    to be re-linked or published like any other release.
    """

    id: str
    package: str
    target_function: str
    operator: str
    node_path: tuple
    original_fragment: str
    mutated_fragment: str
    mutated_sources: dict[str, str] = field(repr=False)

    @property
    def path_str(self) -> str:
        return ".".join(str(step) for step in self.node_path)


# --------------------------------------------------------------------------
# site enumeration


def _expr_sites(fn: A.FunctionDecl) -> Iterator[tuple[tuple, A.Expr]]:
    """Yield (path, node) for every expression in the body, preorder."""
    yield from _sites_in_block(fn.body, ("body",))


def _sites_in_block(stmts: list, prefix: tuple) -> Iterator[tuple[tuple, A.Expr]]:
    for i, stmt in enumerate(stmts):
        yield from _sites_in_stmt(stmt, prefix + (i,))


def _sites_in_stmt(stmt, path: tuple) -> Iterator[tuple[tuple, A.Expr]]:
    k = stmt.kind
    if k in (A.K_VAR_DECL, A.K_ASSIGN, A.K_EXPR_STMT):
        yield from _sites_in_expr(stmt.value, path + ("value",))
    elif k == A.K_IF:
        yield from _sites_in_expr(stmt.cond, path + ("cond",))
        yield from _sites_in_block(stmt.then_body, path + ("then_body",))
        if stmt.else_body is not None:
            yield from _sites_in_block(stmt.else_body, path + ("else_body",))
    elif k == A.K_WHILE:
        yield from _sites_in_expr(stmt.cond, path + ("cond",))
        yield from _sites_in_block(stmt.body, path + ("body",))
    elif k == A.K_RETURN:
        if stmt.value is not None:
            yield from _sites_in_expr(stmt.value, path + ("value",))
    elif k == A.K_ASSERT:
        yield from _sites_in_expr(stmt.cond, path + ("cond",))


def _sites_in_expr(e, path: tuple) -> Iterator[tuple[tuple, A.Expr]]:
    yield path, e
    k = e.kind
    if k == A.K_UNARY:
        yield from _sites_in_expr(e.operand, path + ("operand",))
    elif k == A.K_BINARY:
        yield from _sites_in_expr(e.lhs, path + ("lhs",))
        yield from _sites_in_expr(e.rhs, path + ("rhs",))
    elif k == A.K_FIELD_ACCESS:
        yield from _sites_in_expr(e.obj, path + ("obj",))
    elif k == A.K_STATIC_CALL or k == A.K_NEW:
        for i, arg in enumerate(e.args):
            yield from _sites_in_expr(arg, path + ("args", i))
    elif k == A.K_METHOD_CALL:
        yield from _sites_in_expr(e.receiver, path + ("receiver",))
        for i, arg in enumerate(e.args):
            yield from _sites_in_expr(arg, path + ("args", i))


# --------------------------------------------------------------------------
# variant construction


def _site_variants(e, operator: str) -> Iterator[tuple[str, A.Expr]]:
    """(variant symbol, replacement node) pairs for one operator at one
    site.  Replacements deep-copy operand subtrees so mutants never alias
    the original tree."""
    if operator == "ABS":
        if e.ty == "int":
            yield "abs", A.Unary("abs", copy.deepcopy(e))
            yield "neg-abs", A.Unary("-", A.Unary("abs", copy.deepcopy(e)))
            yield "zero", A.IntLit(0)
    elif operator == "AOR":
        if e.kind == A.K_BINARY and e.op in A.ARITH_OPS:
            for op in _AOR_OPS:
                if op != e.op:
                    yield op, A.Binary(op, copy.deepcopy(e.lhs),
                                       copy.deepcopy(e.rhs))
    elif operator == "LCR":
        if e.kind == A.K_BINARY and e.op in A.LOGIC_OPS:
            for op in _LCR_OPS:
                if op != e.op:
                    yield op, A.Binary(op, copy.deepcopy(e.lhs),
                                       copy.deepcopy(e.rhs))
    elif operator == "ROR":
        if e.kind == A.K_BINARY and (e.op in A.REL_OPS or e.op in A.EQ_OPS):
            # The four orderings need int operands; over bools only the
            # equality pair stays well-typed.
            allowed = _ROR_OPS if e.lhs.ty == "int" else _ROR_BOOL_OPS
            for op in allowed:
                if op != e.op:
                    yield op, A.Binary(op, copy.deepcopy(e.lhs),
                                       copy.deepcopy(e.rhs))
    elif operator == "UOI":
        if e.kind == A.K_VAR and e.ty == "int":
            yield "inc", A.Binary("+", copy.deepcopy(e), A.IntLit(1))
            yield "dec", A.Binary("-", copy.deepcopy(e), A.IntLit(1))
        if e.ty == "bool":
            yield "not", A.Unary("!", copy.deepcopy(e))
    else:
        raise ValueError(f"unknown mutation operator {operator!r}")


def _normalise_operators(operators: Iterable[str]) -> tuple[str, ...]:
    wanted = set(operators)
    unknown = sorted(wanted - set(OPERATORS))
    if unknown:
        raise ValueError(f"unknown mutation operators: {', '.join(unknown)}")
    return tuple(op for op in OPERATORS if op in wanted)


# --------------------------------------------------------------------------
# mutant generation


def _rel_path(mod: A.ModuleAst) -> str:
    # Module source names are "<package>/<relative path>".
    name = mod.source_name
    return name.split("/", 1)[1] if "/" in name else name


def _locate_function(fn: A.FunctionDecl,
                     unit: PackageUnit) -> tuple[A.ModuleAst, tuple, str]:
    """Find the module declaring ``fn`` plus the attribute/index path from
    the module down to the declaration."""
    for mod in unit.modules:
        for ci, cls in enumerate(mod.classes):
            for mi, method in enumerate(cls.methods):
                if method is fn:
                    return mod, ("classes", ci, "methods", mi), _rel_path(mod)
        for fi, free in enumerate(mod.functions):
            if free is fn:
                return mod, ("functions", fi), _rel_path(mod)
    raise ValueError(f"{fn.qualified_name} is not declared in package "
                     f"{unit.name!r}")


def _node_at(root, path: tuple):
    node = root
    for step in path:
        node = node[step] if isinstance(step, int) else getattr(node, step)
    return node


def _apply_replacement(module: A.ModuleAst, locator: tuple, node_path: tuple,
                       replacement) -> A.ModuleAst:
    host = copy.deepcopy(module)
    target_fn = _node_at(host, locator)
    parent = _node_at(target_fn, node_path[:-1])
    last = node_path[-1]
    if isinstance(last, int):
        parent[last] = copy.deepcopy(replacement)
    else:
        setattr(parent, last, copy.deepcopy(replacement))
    return host


def generate_mutants(fn: A.FunctionDecl, unit: PackageUnit,
                     operators: Iterable[str] = OPERATORS) -> list[Mutant]:
    """All mutants of one function, in deterministic order.

    ``fn`` must come from a checked program (mutation decisions depend on
    inferred expression types) and be declared by ``unit``.
    """
    ops = _normalise_operators(operators)
    module, locator, rel = _locate_function(fn, unit)
    sites = list(_expr_sites(fn))
    if any(e.ty is None for _, e in sites):
        raise ValueError(f"{fn.qualified_name} has unchecked expressions; "
                         f"generate_mutants needs a checked program")

    printed = {_rel_path(mod): print_module(mod) for mod in unit.modules}
    mutants: list[Mutant] = []
    for path, expr in sites:
        for operator in ops:
            for symbol, replacement in _site_variants(expr, operator):
                if replacement == expr:
                    continue  # structurally identical: not a change at all
                host = _apply_replacement(module, locator, path, replacement)
                sources = dict(printed)
                sources[rel] = print_module(host)
                path_str = ".".join(str(step) for step in path)
                mutants.append(Mutant(
                    id=(f"{fn.qualified_name}#{operator}#{path_str}"
                        f"#{symbol}"),
                    package=unit.name,
                    target_function=fn.qualified_name,
                    operator=operator,
                    node_path=path,
                    original_fragment=fragment(expr),
                    mutated_fragment=fragment(replacement),
                    mutated_sources=sources,
                ))
    return mutants


# --------------------------------------------------------------------------
# benchmark


@dataclass(slots=True)
class MutantOutcome:
    """How one mutant fared against both detectors."""

    mutant_id: str
    package: str
    function: str
    operator: str
    node_path: str
    original: str
    mutated: str
    status: str  # "ok" | "type-error"
    test_kill: bool | None = None
    static_flag: bool | None = None
    changed_functions: int = 0
    kinds: tuple[str, ...] = ()
    detail: str | None = None

    def to_json(self) -> dict:
        return {
            "mutant": self.mutant_id,
            "package": self.package,
            "function": self.function,
            "operator": self.operator,
            "node_path": self.node_path,
            "original": self.original,
            "mutated": self.mutated,
            "status": self.status,
            "test_kill": self.test_kill,
            "static_flag": self.static_flag,
            "changed_functions": self.changed_functions,
            "kinds": list(self.kinds),
            "detail": self.detail,
        }


CSV_COLUMNS = ("mutant", "package", "function", "operator", "node_path",
               "original", "mutated", "status", "test_kill", "static_flag",
               "kinds")


@dataclass(slots=True)
class BenchmarkRun:
    """Every mutant outcome for one project plus the per-tool scores."""

    project: str
    covered_functions: tuple[str, ...]
    outcomes: list[MutantOutcome]
    detection: DetectionReport

    @property
    def evaluated(self) -> list[MutantOutcome]:
        return [o for o in self.outcomes if o.status == STATUS_OK]

    @property
    def excluded(self) -> int:
        """Mutants dropped because the mutated library failed to re-check;
        they are reported but excluded from every score denominator."""
        return sum(1 for o in self.outcomes if o.status != STATUS_OK)

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "project": self.project,
            "covered_functions": list(self.covered_functions),
            "mutants_total": len(self.evaluated),
            "mutants_excluded": self.excluded,
            "outcomes": [o.to_json() for o in self.outcomes],
            "detection": self.detection.to_json(),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for o in self.outcomes:
            writer.writerow([
                o.mutant_id, o.package, o.function, o.operator, o.node_path,
                o.original, o.mutated, o.status, _csv_bool(o.test_kill),
                _csv_bool(o.static_flag), "+".join(o.kinds),
            ])
        return buf.getvalue()


def _csv_bool(value: bool | None) -> str:
    if value is None:
        return ""
    return "true" if value else "false"


@dataclass(slots=True)
class _EvalContext:
    """Everything needed to judge mutants against one base program."""

    program: Program
    graph: CallGraph
    roots: list[str]
    fuel: int
    max_depth: int
    kernel: ModuleType | None

    @classmethod
    def from_program(cls, program: Program, fuel: int, max_depth: int,
                     kernel: ModuleType | None) -> "_EvalContext":
        return cls(program=program, graph=build_call_graph(program),
                   roots=client_roots(program), fuel=fuel,
                   max_depth=max_depth, kernel=kernel)

    def evaluate(self, mutant: Mutant) -> MutantOutcome:
        base = dict(
            mutant_id=mutant.id, package=mutant.package,
            function=mutant.target_function, operator=mutant.operator,
            node_path=mutant.path_str, original=mutant.original_fragment,
            mutated=mutant.mutated_fragment)
        try:
            mutated = relink_with_sources(self.program, mutant.package,
                                          mutant.mutated_sources)
        except MiniLangError as exc:
            return MutantOutcome(**base, status=STATUS_TYPE_ERROR,
                                 detail=str(exc))
        outcome, _ = run_tests(mutated, fuel=self.fuel,
                               max_depth=self.max_depth, kernel=self.kernel,
                               with_trace=False)
        old_unit = self.program.packages[mutant.package]
        changeset = diff_library(
            old_unit.modules, mutated.packages[mutant.package].modules,
            mutant.package, str(old_unit.version),
            f"{old_unit.version}+mutant")
        verdict, _ = assess_changes(self.graph, self.roots, changeset,
                                    mutant.package)
        kinds: set[str] = set()
        for change in changeset.changes:
            kinds |= change.kinds
        return MutantOutcome(
            **base, status=STATUS_OK, test_kill=not outcome.all_green,
            static_flag=verdict == VERDICT_UNSAFE,
            changed_functions=len(changeset.changes),
            kinds=tuple(sorted(kinds)))


# Worker-side state for the process pool: each worker re-links the base
# program once from printed sources (ASTs are cheap to rebuild and the
# printed form is the canonical interchange format anyway).
_WORKER: _EvalContext | None = None


def _program_spec(program: Program) -> tuple:
    spec = []
    for name in sorted(program.packages):
        unit = program.packages[name]
        spec.append((
            name, str(unit.version), unit.origin,
            tuple((_rel_path(m), print_module(m)) for m in unit.modules),
            tuple((_rel_path(m), print_module(m)) for m in unit.test_modules),
            tuple(sorted(unit.dependencies)),
        ))
    return tuple(spec)


def _program_from_spec(spec: tuple) -> Program:
    raws = [RawPackage(name=name, version=Version.parse(version),
                       origin=origin, sources=list(sources),
                       tests=list(tests), dependencies=frozenset(deps))
            for name, version, origin, sources, tests, deps in spec]
    return link_program(raws)


def _worker_init(spec: tuple, fuel: int, max_depth: int,
                 kernel_name: str | None) -> None:
    global _WORKER
    kernel = (importlib.import_module(kernel_name)
              if kernel_name is not None else None)
    _WORKER = _EvalContext.from_program(_program_from_spec(spec), fuel,
                                        max_depth, kernel)


def _worker_eval(mutant: Mutant) -> MutantOutcome:
    return _WORKER.evaluate(mutant)


def _evaluate_parallel(program: Program, mutants: Sequence[Mutant],
                       jobs: int, fuel: int, max_depth: int,
                       kernel: ModuleType | None) -> list[MutantOutcome]:
    kernel_name = kernel.__name__ if kernel is not None else None
    spec = _program_spec(program)
    with ProcessPoolExecutor(
            max_workers=jobs, initializer=_worker_init,
            initargs=(spec, fuel, max_depth, kernel_name)) as pool:
        # map() preserves submission order: the reduction is deterministic.
        return list(pool.map(_worker_eval, mutants))


def run_benchmark(program: Program,
                  operators: Iterable[str] = OPERATORS,
                  jobs: int = 1,
                  fuel: int = DEFAULT_FUEL,
                  max_depth: int = DEFAULT_MAX_DEPTH,
                  kernel: ModuleType | None = None) -> BenchmarkRun:
    """Mutate every dynamically covered dependency function and score how
    well the test suite and the static analysis detect the faults."""
    ops = _normalise_operators(operators)
    baseline, trace = run_tests(program, fuel=fuel, max_depth=max_depth,
                                kernel=kernel)
    if not baseline.all_green:
        bad = sorted(r.name for r in baseline.results
                     if r.status != STATUS_PASS)
        raise RedBaselineError(
            "cannot benchmark on a failing baseline suite: "
            + ", ".join(bad))

    covered = sorted(trace.invoked & program.dependency_functions())
    mutants: list[Mutant] = []
    for qn in covered:
        fn = program.index.functions[qn]
        unit = program.packages[program.index.fn_package[qn]]
        mutants.extend(generate_mutants(fn, unit, ops))
    mutants.sort(key=lambda m: m.id)

    client_unit = program.packages[program.client]
    project_id = f"{program.client}@{client_unit.version}"

    if jobs > 1 and len(mutants) > 1:
        outcomes = _evaluate_parallel(program, mutants, jobs, fuel,
                                      max_depth, kernel)
    else:
        ctx = _EvalContext.from_program(program, fuel, max_depth, kernel)
        outcomes = [ctx.evaluate(m) for m in mutants]

    detection = detection_report({
        "tests": [o.test_kill for o in outcomes if o.status == STATUS_OK],
        "static": [o.static_flag for o in outcomes if o.status == STATUS_OK],
    })
    return BenchmarkRun(project=project_id,
                        covered_functions=tuple(covered),
                        outcomes=outcomes, detection=detection)


def render_benchmark(run: BenchmarkRun) -> str:
    lines = [f"benchmark {run.project}"]
    lines.append(f"covered dependency functions: "
                 f"{len(run.covered_functions)}")
    note = f" ({run.excluded} excluded: failed type-check)" if run.excluded else ""
    lines.append(f"mutants evaluated: {len(run.evaluated)}{note}")
    for name, tool in sorted(run.detection.tools.items()):
        score = "null" if tool.score is None else f"{tool.score:.3f}"
        lines.append(f"  {name:<7} detected {tool.detected}/{tool.total}"
                     f"  (score {score})")
    return "\n".join(lines)
