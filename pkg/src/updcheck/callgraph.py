"""Static call graph over a linked program (class-hierarchy analysis).

Nodes are every declared function of every package, reachable or not.
Edges come from syntactic call sites:

* a statically resolved call contributes one ``static`` edge to its target;
* a receiver-based call contributes one ``interface`` edge per
  implementation the receiver's static type admits (CHA: for an interface,
  every implementing class; for a class, every subclass including itself).

Calls into the built-in ``std`` package are pruned — they are I/O plumbing,
not dependency surface.  The graph over-approximates: every dynamically
observed call edge is present, but interface edges to implementations that
never run are present too.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .minilang import ast as A
from .project import ORIGIN_CLIENT, Program

DISPATCH_STATIC = "static"
DISPATCH_INTERFACE = "interface"


@dataclass(frozen=True, slots=True)
class CGNode:
    id: str  # qualified function name
    package: str
    version: str
    origin: str  # client | direct-dep | transitive-dep


@dataclass(frozen=True, slots=True)
class CGEdge:
    src: str
    dst: str
    dispatch: str
    file: str
    line: int


@dataclass(slots=True)
class CallGraph:
    nodes: dict[str, CGNode]
    edges: set[CGEdge]
    _succ: dict[str, list[CGEdge]] = field(default_factory=dict, repr=False)

    def successors(self, qn: str) -> list[CGEdge]:
        if not self._succ and self.edges:
            succ: dict[str, list[CGEdge]] = {}
            for e in sorted(self.edges,
                            key=lambda e: (e.src, e.dst, e.dispatch, e.file,
                                           e.line)):
                succ.setdefault(e.src, []).append(e)
            self._succ = succ
        return self._succ.get(qn, [])

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "nodes": [
                {"id": n.id, "package": n.package, "version": n.version,
                 "origin": n.origin}
                for n in sorted(self.nodes.values(), key=lambda n: n.id)
            ],
            "edges": [
                {"from": e.src, "to": e.dst, "dispatch": e.dispatch,
                 "site": {"file": e.file, "line": e.line}}
                for e in sorted(self.edges,
                                key=lambda e: (e.src, e.dst, e.dispatch,
                                               e.file, e.line))
            ],
        }


def _call_edges_of(fn: A.FunctionDecl, index) -> Iterable[tuple[str, str, int]]:
    """Yield (target qn, dispatch, line) for each call site in ``fn``."""
    for e in A.function_exprs(fn):
        k = e.kind
        if k == A.K_STATIC_CALL:
            line = e.span[0] if e.span else 0
            if e.res_kind == A.RES_STATIC:
                yield e.res_target, DISPATCH_STATIC, line
            elif e.res_kind == A.RES_DYNAMIC:
                for target in sorted(
                        index.method_candidates(e.res_recv_type,
                                                e.res_method)):
                    yield target, DISPATCH_INTERFACE, line
            # RES_BUILTIN: pruned
        elif k == A.K_METHOD_CALL:
            line = e.span[0] if e.span else 0
            for target in sorted(
                    index.method_candidates(e.res_recv_type, e.method)):
                yield target, DISPATCH_INTERFACE, line


def build_call_graph(program: Program) -> CallGraph:
    nodes: dict[str, CGNode] = {}
    edges: set[CGEdge] = set()
    for pkg, unit in program.packages.items():
        version = str(unit.version)
        for mod in unit.all_modules:
            for fn in mod.declared_functions():
                qn = fn.qualified_name
                nodes[qn] = CGNode(id=qn, package=pkg, version=version,
                                   origin=unit.origin)
                for target, dispatch, line in _call_edges_of(fn,
                                                             program.index):
                    edges.add(CGEdge(src=qn, dst=target, dispatch=dispatch,
                                     file=fn.source_file, line=line))
    return CallGraph(nodes=nodes, edges=edges)


def client_roots(program: Program) -> list[str]:
    """Entry points for reachability: the client's source functions."""
    return sorted(program.client_src_functions())


def reachable_functions(graph: CallGraph, roots: Iterable[str]) -> set[str]:
    """Every function reachable from ``roots`` along call edges, roots
    included (when they exist in the graph)."""
    seen: set[str] = set()
    queue = deque(r for r in sorted(roots) if r in graph.nodes)
    seen.update(queue)
    while queue:
        cur = queue.popleft()
        for edge in graph.successors(cur):
            if edge.dst not in seen:
                seen.add(edge.dst)
                queue.append(edge.dst)
    return seen


def direct_call_sites(program: Program,
                      graph: CallGraph) -> list[tuple[str, str, str, int]]:
    """Call sites in client *source* functions whose target is owned by a
    direct dependency: (caller, callee, file, line) tuples.

    Receiver-based sites contribute every CHA candidate owned by a direct
    dependency.  Test modules are excluded by construction — their calls say
    nothing about the project's own use of its dependencies.
    """
    src_fns = program.client_src_functions()
    direct = {pkg for pkg, unit in program.packages.items()
              if unit.origin == "direct-dep"}
    out = []
    for edge in sorted(graph.edges, key=lambda e: (e.src, e.dst, e.file,
                                                   e.line)):
        if edge.src in src_fns and graph.nodes[edge.dst].package in direct:
            out.append((edge.src, edge.dst, edge.file, edge.line))
    return out
