"""Update impact analysis: is the client affected by a dependency update?

The verdict for updating library L from X to Y, given the client's current
(old) resolution:

* ``unused``  — no function of L is reachable from the client's source
  functions in the call graph: the dependency is declared but dead here;
* ``safe``    — L is reachable, but no function that the diff reports as
  changed or removed is (newly added functions cannot be reachable in the
  old graph);
* ``unsafe``  — at least one changed function is reachable.  Every impacted
  function gets an impact path: a shortest call stack from a client source
  function down to it (ties broken lexicographically, so reports are
  stable).  ``all_shortest`` enumerates the full set of shortest stacks
  instead of one representative.

Reachability is computed on the *old* program: the question is whether the
code the client currently depends on is affected, which deliberately
over-approximates (an interface edge may point at an implementation that
never runs) but never misses a possible path.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .callgraph import CallGraph, build_call_graph, client_roots, reachable_functions
from .diffing import ChangeSet, FunctionChange, KIND_ADDED, diff_library
from .errors import TypeCheckError, UnknownDependencyError
from .minilang import parse_module
from .project import Program, load_project
from .registry import FileRegistry, Version

VERDICT_SAFE = "safe"
VERDICT_UNSAFE = "unsafe"
VERDICT_UNUSED = "unused"


@dataclass(slots=True)
class ImpactPath:
    """One call stack from client code to a changed dependency function."""

    function: str
    stack: list[str]
    dispatch: list[str]  # per edge: static | interface
    sites: list[tuple[str, int]]  # per edge: (file, line) of the call site
    change: FunctionChange

    def to_json(self) -> dict:
        return {
            "function": self.function,
            "stack": list(self.stack),
            "dispatch": list(self.dispatch),
            "sites": [{"file": f, "line": ln} for f, ln in self.sites],
            "change": self.change.to_json(),
        }


@dataclass(slots=True)
class UpdateReport:
    library: str
    old_version: str
    new_version: str
    verdict: str
    impacts: list[ImpactPath]
    changeset: ChangeSet
    link_error: str | None = None
    runtime_ms: float | None = field(default=None, compare=False)

    def to_json(self) -> dict:
        # No timing field here on purpose: JSON output is byte-reproducible.
        return {
            "schema_version": 1,
            "library": self.library,
            "old_version": self.old_version,
            "new_version": self.new_version,
            "verdict": self.verdict,
            "link_error": self.link_error,
            "impacts": [p.to_json() for p in self.impacts],
            "changes": [c.to_json() for c in self.changeset.changes],
        }


def shortest_stacks(graph: CallGraph, roots: list[str], target: str,
                    all_shortest: bool = False,
                    cap: int = 1000) -> list[ImpactPath]:
    """Shortest call stacks from any root to ``target``.

    Returns one lexicographically minimal stack, or — with ``all_shortest``
    — every shortest stack (up to ``cap``), sorted.  Each stack carries the
    dispatch tag and call site of every edge; parallel edges between the
    same two functions are collapsed to the smallest (dispatch, file, line)
    triple.
    """
    # Distance-to-target for every node, via reverse BFS.
    pred: dict[str, list] = {}
    for e in graph.edges:
        pred.setdefault(e.dst, []).append(e)
    dist: dict[str, int] = {target: 0}
    queue = deque([target])
    while queue:
        cur = queue.popleft()
        for e in pred.get(cur, ()):
            if e.src not in dist:
                dist[e.src] = dist[cur] + 1
                queue.append(e.src)

    starts = sorted(r for r in roots if r in dist)
    if not starts:
        return []
    best = min(dist[r] for r in starts)
    starts = [r for r in starts if dist[r] == best]

    def walk(node: str, stack, dispatch, sites, collect: list) -> None:
        if node == target:
            collect.append(ImpactPath(function=target, stack=list(stack),
                                      dispatch=list(dispatch),
                                      sites=list(sites), change=None))
            return
        nexts: dict[str, tuple] = {}
        for e in graph.successors(node):
            if dist.get(e.dst) == dist[node] - 1:
                key = (e.dispatch, e.file, e.line)
                if e.dst not in nexts or key < nexts[e.dst]:
                    nexts[e.dst] = key
        for dst in sorted(nexts):
            if len(collect) >= cap:
                return
            tag, file, line = nexts[dst]
            stack.append(dst)
            dispatch.append(tag)
            sites.append((file, line))
            walk(dst, stack, dispatch, sites, collect)
            stack.pop()
            dispatch.pop()
            sites.pop()
            if not all_shortest and collect:
                return

    collected: list[ImpactPath] = []
    for root in starts:
        walk(root, [root], [], [], collected)
        if collected and not all_shortest:
            break
        if len(collected) >= cap:
            break
    collected.sort(key=lambda p: p.stack)
    return collected if all_shortest else collected[:1]


def assess_changes(graph: CallGraph, roots: list[str], changeset: ChangeSet,
                   library: str,
                   all_shortest: bool = False) -> tuple[str, list[ImpactPath]]:
    """Verdict + impact paths for a change set, against an old-program
    graph.  Shared by ``check-update`` and the mutation benchmark."""
    reachable = reachable_functions(graph, roots)
    lib_reachable = any(
        node.package == library and node.id in reachable
        for node in graph.nodes.values())
    if not lib_reachable:
        return VERDICT_UNUSED, []
    impacts: list[ImpactPath] = []
    for change in changeset.changes:
        if KIND_ADDED in change.kinds:
            continue
        if change.function not in reachable:
            continue
        stacks = shortest_stacks(graph, roots, change.function,
                                 all_shortest=all_shortest)
        for stack in stacks:
            stack.change = change
        impacts.extend(stacks)
    if not impacts:
        return VERDICT_SAFE, []
    impacts.sort(key=lambda p: (p.function, p.stack))
    return VERDICT_UNSAFE, impacts


def analyze_update(project_dir: Path | str, registry: FileRegistry,
                   package: str, to_version: Version,
                   all_shortest: bool = False) -> UpdateReport:
    """End-to-end ``check-update``: resolve, diff, build graph, assess."""
    started = time.perf_counter()
    program_old = load_project(project_dir, registry)
    tree = program_old.tree
    if package not in tree.resolved:
        raise UnknownDependencyError(
            f"{package!r} is not in the project's dependency tree "
            f"(resolved: {', '.join(sorted(tree.resolved)) or 'none'})")
    from_version = tree.resolved[package]

    link_error: str | None = None
    try:
        program_new = load_project(project_dir, registry,
                                   pins={package: to_version})
        new_modules = program_new.packages[package].modules
    except TypeCheckError as exc:
        # The updated program does not type-check (e.g. the client calls a
        # function the new version removed).  That is itself maximal
        # impact; fall back to bare parsing so the diff can still report
        # what changed.
        link_error = str(exc)
        new_modules = [
            parse_module(text, f"{package}/{rel}")
            for rel, text in registry.fetch_sources(package, to_version)]

    changeset = diff_library(program_old.packages[package].modules,
                             new_modules, package, str(from_version),
                             str(to_version))
    graph = build_call_graph(program_old)
    verdict, impacts = assess_changes(graph, client_roots(program_old),
                                      changeset, package,
                                      all_shortest=all_shortest)
    return UpdateReport(
        library=package, old_version=str(from_version),
        new_version=str(to_version), verdict=verdict, impacts=impacts,
        changeset=changeset, link_error=link_error,
        runtime_ms=(time.perf_counter() - started) * 1000.0)


def render_report(report: UpdateReport, verbose: bool = False) -> str:
    lines = [f"update {report.library}: {report.old_version} -> "
             f"{report.new_version}"]
    n = len(report.impacts)
    lines.append(f"verdict: {report.verdict.upper()}"
                 + (f" ({n} impact path{'s' if n != 1 else ''})"
                    if report.verdict == VERDICT_UNSAFE else ""))
    if report.link_error:
        lines.append(f"note: updated program does not type-check: "
                     f"{report.link_error}")
    if report.verdict == VERDICT_UNUSED:
        lines.append(f"no function of {report.library} is reachable from "
                     f"client code; its changes cannot matter here")
    for path in report.impacts:
        lines.append("")
        kinds = ", ".join(sorted(path.change.kinds))
        lines.append(f"{path.function} [{kinds}]")
        lines.append(f"    {path.stack[0]}")
        for i, node in enumerate(path.stack[1:]):
            file, line = path.sites[i]
            lines.append(f"    -> {node}  ({path.dispatch[i]}, "
                         f"{file}:{line})")
        for edit in path.change.edits:
            old = edit.old_text if edit.old_text is not None else "(none)"
            new = edit.new_text if edit.new_text is not None else "(none)"
            lines.append(f"    old: {_one_line(old)}")
            lines.append(f"    new: {_one_line(new)}")
    unreachable = [c for c in report.changeset.changes
                   if not any(p.change is c for p in report.impacts)]
    if unreachable and verbose:
        lines.append("")
        lines.append("changed but not reachable from client code:")
        for c in unreachable:
            lines.append(f"    {c.function} [{', '.join(sorted(c.kinds))}]")
    if report.runtime_ms is not None and verbose:
        lines.append("")
        lines.append(f"analysis took {report.runtime_ms:.1f} ms")
    return "\n".join(lines)


def _one_line(text: str) -> str:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    return " ".join(lines) if len(lines) > 1 else (lines[0] if lines else "")
