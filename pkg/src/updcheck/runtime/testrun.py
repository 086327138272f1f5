"""Test discovery, execution and call tracing.

Tests are the client's public zero-parameter functions named ``test_*`` in
the manifest's test files, run in file order then declaration order.  Each
test runs in fresh interpreter state with its own fuel budget; only the
trace accumulates across tests.

The trace records unique ``(caller, callee)`` edges, and only for calls made
while at least one client *source* function is on the stack — a test body
calling a dependency directly contributes nothing, because that tells us
nothing about what the project's own code exercises.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from types import ModuleType

from ..errors import AssertFailedFault, RuntimeFault
from ..project import Program
from .interp import DEFAULT_FUEL, DEFAULT_MAX_DEPTH, Interpreter

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_ERROR = "error"


@dataclass(slots=True)
class TestResult:
    name: str  # qualified test function name
    status: str
    message: str | None = None
    duration_s: float = 0.0
    output: list[str] = field(default_factory=list)  # std.print_* lines


@dataclass(slots=True)
class TestOutcome:
    results: list[TestResult]

    @property
    def total(self) -> int:
        return len(self.results)

    def count(self, status: str) -> int:
        return sum(1 for r in self.results if r.status == status)

    @property
    def all_green(self) -> bool:
        return all(r.status == STATUS_PASS for r in self.results)

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "total": self.total,
            "passed": self.count(STATUS_PASS),
            "failed": self.count(STATUS_FAIL),
            "errors": self.count(STATUS_ERROR),
            "tests": [
                {"name": r.name, "status": r.status, "message": r.message}
                for r in self.results
            ],
        }


@dataclass(slots=True)
class TraceLog:
    """Dynamic call evidence from one test-suite run."""

    edges: set[tuple[str, str]] = field(default_factory=set)
    entries: set[str] = field(default_factory=set)  # executed test functions
    owners: dict[str, str] = field(default_factory=dict)  # qn -> pkg@version

    @property
    def invoked(self) -> set[str]:
        """Functions recorded as running: edge endpoints plus entry points."""
        out = set(self.entries)
        for a, b in self.edges:
            out.add(a)
            out.add(b)
        return out

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "edges": [{"from": a, "to": b}
                      for a, b in sorted(self.edges)],
            "invoked": {qn: self.owners.get(qn, "")
                        for qn in sorted(self.invoked)},
        }


def run_tests(program: Program, fuel: int = DEFAULT_FUEL,
              max_depth: int = DEFAULT_MAX_DEPTH,
              kernel: ModuleType | None = None,
              with_trace: bool = True) -> tuple[TestOutcome, TraceLog]:
    interp = Interpreter(program, kernel=kernel, fuel=fuel,
                         max_depth=max_depth)
    trace = TraceLog()
    edge_sink = trace.edges if with_trace else None
    results: list[TestResult] = []
    for fn in program.client_test_functions():
        rt = interp.new_rt(edge_sink)
        trace.entries.add(fn.qualified_name)
        started = time.perf_counter()
        status, message = STATUS_PASS, None
        try:
            interp.kernel.call_function(rt, fn, [], None)
        except AssertFailedFault as fault:
            status, message = STATUS_FAIL, str(fault)
        except RuntimeFault as fault:
            status = STATUS_ERROR
            message = f"{type(fault).__name__.removesuffix('Fault')}: {fault}"
        results.append(TestResult(
            name=fn.qualified_name, status=status, message=message,
            duration_s=time.perf_counter() - started, output=list(rt.out)))
    for qn in trace.invoked:
        if qn in program.index.fn_package:
            trace.owners[qn] = program.owner_label(qn)
    return TestOutcome(results), trace


def render_outcome(outcome: TestOutcome, verbose: bool = False) -> str:
    """Human-readable test report."""
    lines = []
    for r in outcome.results:
        mark = {"pass": "ok", "fail": "FAIL", "error": "ERROR"}[r.status]
        lines.append(f"{mark:5s} {r.name}"
                     + (f" ({r.duration_s * 1000:.1f} ms)" if verbose else ""))
        if r.message:
            lines.append(f"      {r.message}")
        if verbose:
            for out_line in r.output:
                lines.append(f"      | {out_line}")
    lines.append(f"{outcome.count(STATUS_PASS)} passed, "
                 f"{outcome.count(STATUS_FAIL)} failed, "
                 f"{outcome.count(STATUS_ERROR)} errored "
                 f"({outcome.total} total)")
    return "\n".join(lines)
