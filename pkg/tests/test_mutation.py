"""Mutant generation: operators, sites, ids, materialised sources."""

import pytest

from helpers import client, direct, link
from updcheck.diffing import diff_library
from updcheck.minilang import parse_module
from updcheck.mutation import OPERATORS, generate_mutants
from updcheck.project import ORIGIN_DIRECT, PackageUnit, relink_with_sources
from updcheck.registry import Version

LIB_SRC = """\
package lib;

fn ident(a: int) -> int {
    return a;
}

fn positive(a: int) -> bool {
    return a > 0;
}

fn same(a: bool, b: bool) -> bool {
    return a == b;
}

fn both(a: bool, b: bool) -> bool {
    return a && b;
}

fn prod(a: int, b: int) -> int {
    return a * b;
}

fn zero() -> int {
    return 0;
}

fn clamp(a: int) -> int {
    if a > 2 {
        return a - 2;
    }
    return 0;
}

class Box {
    value: int;

    fn bump(n: int) -> int {
        return this.value + n;
    }
}
"""

APP_SRC = {"src/main.ml0": """\
package app;
import lib;

fn main() -> int {
    return lib.ident(1);
}
"""}

PROGRAM = link(client("app", APP_SRC, deps={"lib"}),
               direct("lib", {"src/lib.ml0": LIB_SRC}))
UNIT = PROGRAM.packages["lib"]


def mutants_of(qn: str, operators=OPERATORS):
    return generate_mutants(PROGRAM.index.functions[qn], UNIT, operators)


# --------------------------------------------------------------------------
# per-operator variant sets


def test_int_variable_site():
    ms = mutants_of("lib.ident")
    assert [m.id for m in ms] == [
        "lib.ident#ABS#body.0.value#abs",
        "lib.ident#ABS#body.0.value#neg-abs",
        "lib.ident#ABS#body.0.value#zero",
        "lib.ident#UOI#body.0.value#inc",
        "lib.ident#UOI#body.0.value#dec",
    ]
    frags = {m.id.rsplit("#", 1)[1]: m.mutated_fragment for m in ms}
    assert frags == {"abs": "abs(a)", "neg-abs": "-abs(a)", "zero": "0",
                     "inc": "a + 1", "dec": "a - 1"}
    assert all(m.original_fragment == "a" for m in ms)


def test_relational_operator_replacements():
    ms = mutants_of("lib.positive", operators=["ROR"])
    assert sorted(m.mutated_fragment for m in ms) == [
        "a != 0", "a < 0", "a <= 0", "a == 0", "a >= 0"]
    assert {m.operator for m in ms} == {"ROR"}


def test_bool_equality_only_swaps_with_inequality():
    ms = mutants_of("lib.same", operators=["ROR"])
    assert [m.mutated_fragment for m in ms] == ["a != b"]


def test_logical_operator_replacements():
    ms = mutants_of("lib.both", operators=["LCR"])
    assert sorted(m.mutated_fragment for m in ms) == ["a ^ b", "a || b"]


def test_arithmetic_operator_replacements():
    ms = mutants_of("lib.prod", operators=["AOR"])
    assert sorted(m.mutated_fragment for m in ms) == [
        "a % b", "a + b", "a - b", "a / b"]


def test_bool_negation_covers_every_bool_expression():
    ms = mutants_of("lib.both", operators=["UOI"])
    assert sorted(m.mutated_fragment for m in ms) == ["!(a && b)", "!a",
                                                      "!b"]


def test_identity_replacements_are_skipped():
    ms = mutants_of("lib.zero")
    # ABS's "zero" variant over the literal 0 would reproduce the original
    # tree and must not be emitted
    assert [m.id.rsplit("#", 1)[1] for m in ms] == ["abs", "neg-abs"]


def test_full_operator_count_for_a_comparison():
    # site `a > 0`: 5 ROR + 1 UOI-not; site `a`: 3 ABS + 2 UOI;
    # site `0`: 2 ABS (identity skipped)
    assert len(mutants_of("lib.positive")) == 13


# --------------------------------------------------------------------------
# sites, paths and ids


def test_nested_sites_use_attribute_and_index_paths():
    ms = mutants_of("lib.clamp", operators=["ROR"])
    assert {m.node_path for m in ms} == {("body", 0, "cond")}
    then_paths = {m.node_path for m in mutants_of("lib.clamp",
                                                  operators=["AOR"])}
    assert then_paths == {("body", 0, "then_body", 0, "value")}
    assert ms[0].path_str == "body.0.cond"


def test_methods_are_mutable_too():
    ms = mutants_of("lib.Box.bump", operators=["AOR"])
    assert [m.mutated_fragment for m in ms] == [
        "this.value - n", "this.value * n", "this.value / n",
        "this.value % n"]
    assert ms[0].target_function == "lib.Box.bump"
    assert ms[0].id.startswith("lib.Box.bump#AOR#")


def test_operator_filter_and_unknown_operator():
    assert mutants_of("lib.ident", operators=["AOR"]) == []
    with pytest.raises(ValueError, match="unknown mutation operators: XOR"):
        mutants_of("lib.ident", operators=["XOR"])


def test_generation_is_deterministic():
    first = [m.id for m in mutants_of("lib.positive")]
    second = [m.id for m in mutants_of("lib.positive")]
    assert first == second
    assert len(set(first)) == len(first)  # ids unique


def test_unchecked_function_is_rejected():
    mod = parse_module("package lib;\n\nfn f(a: int) -> int {\n"
                       "    return a;\n}\n", "lib/src/lib.ml0")
    unit = PackageUnit(name="lib", version=Version.parse("1.0.0"),
                       origin=ORIGIN_DIRECT, modules=[mod])
    with pytest.raises(ValueError, match="unchecked expressions"):
        generate_mutants(mod.functions[0], unit)


def test_foreign_function_is_rejected():
    mod = parse_module("package lib;\n\nfn f(a: int) -> int {\n"
                       "    return a;\n}\n")
    with pytest.raises(ValueError, match="not declared in package"):
        generate_mutants(mod.functions[0], UNIT)


# --------------------------------------------------------------------------
# materialised sources


def test_mutated_sources_relink_and_diff_to_one_function():
    for qn in ("lib.positive", "lib.Box.bump", "lib.clamp"):
        for mutant in mutants_of(qn):
            mutated = relink_with_sources(PROGRAM, "lib",
                                          mutant.mutated_sources)
            changeset = diff_library(
                UNIT.modules, mutated.packages["lib"].modules,
                "lib", "1.0.0", "1.0.0+mutant")
            assert [c.function for c in changeset.changes] == [qn], mutant.id
            assert changeset.changes[0].kinds, mutant.id


def test_mutated_sources_cover_the_whole_package():
    (mutant, *_) = mutants_of("lib.ident")
    assert set(mutant.mutated_sources) == {"src/lib.ml0"}
    assert "abs(a)" in mutant.mutated_sources["src/lib.ml0"]
    # untouched functions print identically
    assert "return a > 0;" in mutant.mutated_sources["src/lib.ml0"]


def test_mutants_do_not_alias_the_original_tree():
    before = mutants_of("lib.ident")[0].mutated_sources["src/lib.ml0"]
    mutants_of("lib.ident")  # regenerate: must not disturb anything
    after = mutants_of("lib.ident")[0].mutated_sources["src/lib.ml0"]
    assert before == after
    # the original program still prints unmutated
    from updcheck.minilang.printer import print_module
    assert "abs(" not in print_module(UNIT.modules[0])
