"""Property: dynamic call traces are always a subgraph of the static graph.

The class-hierarchy call graph is an over-approximation, so containment —
every edge the interpreter records appears in the graph, every invoked
function is a node — must hold for *any* program.  Random ecosystems probe
it far beyond the handwritten cases.
"""

import random

import pytest

from fuzzgen import MAX_FUNCTIONS, MAX_PACKAGES, function_count, \
    generate_ecosystem, generate_program
from updcheck.callgraph import build_call_graph, client_roots
from updcheck.runtime import run_tests

SEEDS = range(80)


@pytest.mark.parametrize("seed", SEEDS)
def test_trace_is_subgraph_of_cha(seed):
    program = generate_program(seed)
    graph = build_call_graph(program)
    static_edges = {(e.src, e.dst) for e in graph.edges}
    outcome, trace = run_tests(program)

    assert outcome.all_green  # self-equality asserts cannot fail
    stray_edges = trace.edges - static_edges
    assert not stray_edges, sorted(stray_edges)
    stray_nodes = {qn for qn in trace.invoked if qn not in graph.nodes}
    assert not stray_nodes, sorted(stray_nodes)


@pytest.mark.parametrize("seed", SEEDS)
def test_generated_programs_respect_bounds(seed):
    program = generate_program(seed)
    assert len(program.packages) <= MAX_PACKAGES
    assert function_count(program) <= MAX_FUNCTIONS
    assert client_roots(program)  # the client always has source functions


def test_generation_is_deterministic():
    def text_of(seed):
        return [(raw.name, raw.sources, raw.tests)
                for raw in generate_ecosystem(random.Random(seed))]

    assert text_of(7) == text_of(7)
    assert text_of(7) != text_of(8)


def test_ecosystems_vary():
    counts = {len(generate_program(seed).packages) for seed in SEEDS}
    assert len(counts) > 1  # not stuck on one shape
    dispatched = sum(
        1 for seed in SEEDS
        if any("interface" in text
               for raw in generate_ecosystem(random.Random(seed))
               for _, text in raw.sources))
    assert dispatched > 5  # dispatch clusters actually occur
