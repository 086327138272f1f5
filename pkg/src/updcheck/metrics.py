"""Coverage and detection metrics.

*Dependency coverage* relates what a client's tests exercised (the trace) to
what its code could call (the call graph):

* the **direct** section counts functions of direct dependencies that appear
  as targets of client-source call sites;
* the **transitive** section counts every dependency function reachable from
  the client's source functions in the call graph.

In both, the ratio is recorded/declared, and undefined (``None``, JSON
``null``) when nothing is declared — a 0/0 is "no dependency use", not
perfect coverage.

*Detection scores* summarise a mutation benchmark: per detector, the
fraction of mutants it caught (undefined when there were no mutants).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .callgraph import CallGraph, client_roots, direct_call_sites, reachable_functions
from .errors import MismatchedProgramError
from .project import ORIGIN_CLIENT, Program
from .runtime.testrun import TraceLog


@dataclass(slots=True)
class CoverageSection:
    declared: frozenset[str]
    recorded: frozenset[str]

    @property
    def ratio(self) -> float | None:
        if not self.declared:
            return None
        return len(self.recorded) / len(self.declared)

    def to_json(self) -> dict:
        return {
            "declared": sorted(self.declared),
            "recorded": sorted(self.recorded),
            "ratio": self.ratio,
        }


@dataclass(slots=True)
class CoverageReport:
    direct: CoverageSection
    transitive: CoverageSection
    per_dependency: dict[str, CoverageSection]

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "direct": self.direct.to_json(),
            "transitive": self.transitive.to_json(),
            "per_dependency": {pkg: sec.to_json()
                               for pkg, sec in
                               sorted(self.per_dependency.items())},
        }


def compute_coverage(program: Program, graph: CallGraph,
                     trace: TraceLog) -> CoverageReport:
    """Relate a test-run trace to the program's call graph."""
    stray = {qn for qn in trace.invoked if qn not in graph.nodes}
    if stray:
        raise MismatchedProgramError(
            f"trace mentions functions absent from the call graph "
            f"(different program?): {', '.join(sorted(stray))}")

    invoked = trace.invoked
    direct_declared = frozenset(
        callee for _, callee, _, _ in direct_call_sites(program, graph))
    direct = CoverageSection(declared=direct_declared,
                             recorded=frozenset(direct_declared & invoked))

    dep_functions = {
        qn for qn, node in graph.nodes.items()
        if node.origin != ORIGIN_CLIENT}
    reachable = reachable_functions(graph, client_roots(program))
    trans_declared = frozenset(reachable & dep_functions)
    transitive = CoverageSection(declared=trans_declared,
                                 recorded=frozenset(trans_declared & invoked))

    per_dependency: dict[str, CoverageSection] = {}
    for pkg, unit in sorted(program.packages.items()):
        if unit.origin == ORIGIN_CLIENT:
            continue
        declared = frozenset(qn for qn in trans_declared
                             if graph.nodes[qn].package == pkg)
        per_dependency[pkg] = CoverageSection(
            declared=declared, recorded=frozenset(declared & invoked))
    return CoverageReport(direct=direct, transitive=transitive,
                          per_dependency=per_dependency)


def render_coverage(report: CoverageReport, verbose: bool = False) -> str:
    def fmt(section: CoverageSection, label: str) -> list[str]:
        ratio = section.ratio
        shown = "n/a (nothing declared)" if ratio is None else f"{ratio:.2f}"
        lines = [f"{label}: {len(section.recorded)}/{len(section.declared)}"
                 f" = {shown}"]
        if verbose:
            for qn in sorted(section.declared):
                mark = "+" if qn in section.recorded else "-"
                lines.append(f"    {mark} {qn}")
        return lines

    lines = fmt(report.direct, "direct dependency coverage")
    lines += fmt(report.transitive, "transitive dependency coverage")
    for pkg, sec in sorted(report.per_dependency.items()):
        lines += fmt(sec, f"  {pkg}")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# detection scores


@dataclass(slots=True)
class ToolScore:
    detected: int
    total: int

    @property
    def score(self) -> float | None:
        if self.total == 0:
            return None
        return self.detected / self.total

    def to_json(self) -> dict:
        return {"detected": self.detected, "total": self.total,
                "score": self.score}


@dataclass(slots=True)
class DetectionReport:
    tools: dict[str, ToolScore]

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "tools": {name: tool.to_json()
                      for name, tool in sorted(self.tools.items())},
        }


def detection_report(flags_by_tool: Mapping[str, Iterable[bool]]) -> DetectionReport:
    """Score each detector from its per-mutant detection flags."""
    tools = {}
    for name, flags in flags_by_tool.items():
        flags = list(flags)
        tools[name] = ToolScore(detected=sum(flags), total=len(flags))
    return DetectionReport(tools=tools)
