"""Bundled fixtures: loader validation plus every recorded scenario."""

import json

import pytest

import updcheck.fixtures as fixtures
from updcheck.callgraph import build_call_graph
from updcheck.cli import main
from updcheck.errors import FixtureFormatError, UnknownFixtureError
from updcheck.fixtures import fixture_names, load_fixture
from updcheck.impact import analyze_update
from updcheck.metrics import compute_coverage
from updcheck.mutation import run_benchmark
from updcheck.registry import Version
from updcheck.runtime import run_tests

# --------------------------------------------------------------------------
# loader


def test_bundled_fixture_inventory():
    assert fixture_names() == ["dispatch", "listing1", "unused_dep",
                               "weak_test"]
    total = sum(len(load_fixture(n).scenarios) for n in fixture_names())
    assert total == 18


def test_unknown_fixture():
    with pytest.raises(UnknownFixtureError, match="unknown fixture"):
        load_fixture("nope")


def make_fixture(tmp_path, expected) -> None:
    root = tmp_path / "demo"
    (root / "registry").mkdir(parents=True)
    proj = root / "projects" / "app"
    proj.mkdir(parents=True)
    (proj / "manifest.json").write_text(json.dumps({
        "name": "app", "version": "0.1.0", "dependencies": {},
        "sources": ["src/main.ml0"], "tests": []}))
    (proj / "src").mkdir()
    (proj / "src" / "main.ml0").write_text(
        "package app;\n\nfn main() -> int {\n    return 1;\n}\n")
    (root / "expected.json").write_text(
        expected if isinstance(expected, str) else json.dumps(expected))


GOOD_SCENARIO = {"name": "s", "provenance": "TRIVIAL", "project": "app",
                 "command": {"kind": "test"}, "expect": {"all_green": True}}


@pytest.mark.parametrize("expected, needle", [
    ("{oops", "not valid JSON"),
    ([], "must be a JSON object"),
    ({"fixture": "other", "scenarios": [GOOD_SCENARIO]},
     "names fixture 'other'"),
    ({"fixture": "demo", "scenarios": []}, "at least one scenario"),
    ({"fixture": "demo", "scenarios": [{"provenance": "TRIVIAL"}]},
     "has no name"),
    ({"fixture": "demo",
      "scenarios": [GOOD_SCENARIO, GOOD_SCENARIO]}, "duplicate scenario"),
    ({"fixture": "demo",
      "scenarios": [{**GOOD_SCENARIO, "provenance": "GUESS"}]},
     "provenance must be one of DERIVED, PAPER, TRIVIAL"),
    ({"fixture": "demo",
      "scenarios": [{**GOOD_SCENARIO, "project": "ghost"}]},
     "unknown project"),
    ({"fixture": "demo",
      "scenarios": [{**GOOD_SCENARIO, "command": {"kind": "destroy"}}]},
     "command.kind must be one of"),
    ({"fixture": "demo",
      "scenarios": [{**GOOD_SCENARIO, "expect": 7}]},
     "expect must be an object"),
])
def test_malformed_expectations_are_rejected(tmp_path, monkeypatch,
                                             expected, needle):
    make_fixture(tmp_path, expected)
    monkeypatch.setattr(fixtures, "DATA_DIR", tmp_path)
    with pytest.raises(FixtureFormatError, match=needle):
        load_fixture("demo")


def test_missing_registry_tree_is_rejected(tmp_path, monkeypatch):
    make_fixture(tmp_path, {"fixture": "demo",
                            "scenarios": [GOOD_SCENARIO]})
    (tmp_path / "demo" / "registry").rmdir()
    monkeypatch.setattr(fixtures, "DATA_DIR", tmp_path)
    with pytest.raises(FixtureFormatError, match="no registry"):
        load_fixture("demo")


def test_valid_fixture_loads_and_runs(tmp_path, monkeypatch):
    make_fixture(tmp_path, {"fixture": "demo",
                            "scenarios": [GOOD_SCENARIO]})
    monkeypatch.setattr(fixtures, "DATA_DIR", tmp_path)
    case = load_fixture("demo")
    assert [s.name for s in case.scenarios] == ["s"]
    assert case.scenarios[0].provenance == "TRIVIAL"
    program = case.load("app")
    assert program.client == "app"
    with pytest.raises(UnknownFixtureError, match="no project"):
        case.project_dir("ghost")


# --------------------------------------------------------------------------
# every recorded scenario, replayed through the public API


def scenario_params():
    for name in fixture_names():
        case = load_fixture(name)
        for sc in case.scenarios:
            yield pytest.param(case, sc, id=f"{name}/{sc.name}")


def expect_consumer(expect: dict):
    """Yield expectation values by key; verify nothing goes unchecked."""
    remaining = dict(expect)

    def take(key, default=None):
        return remaining.pop(key, default)

    return take, remaining


@pytest.mark.parametrize("case, sc", list(scenario_params()))
def test_scenario(case, sc):
    take, remaining = expect_consumer(sc.expect)
    if sc.kind == "check-update":
        package = sc.command["package"]
        to = sc.command["to"]
        report = analyze_update(case.project_dir(sc.project), case.registry,
                                package, Version.parse(to))
        assert report.verdict == take("verdict")
        exit_code = take("exit_code")
        if exit_code is not None:
            argv = ["check-update", package, "--to", to,
                    "--registry", str(case.registry.root),
                    "--project", str(case.project_dir(sc.project))]
            assert main(argv) == exit_code
        changed = take("changed_functions")
        if changed is not None:
            assert sorted(c.function
                          for c in report.changeset.changes) == changed
        stacks = take("stacks")
        if stacks is not None:
            assert [p.stack for p in report.impacts] == stacks
    elif sc.kind == "test":
        program = case.load(sc.project, sc.pins or None)
        outcome, _ = run_tests(program)
        assert outcome.all_green == take("all_green")
        total = take("total")
        if total is not None:
            assert outcome.total == total
    elif sc.kind == "coverage":
        program = case.load(sc.project, sc.pins or None)
        _, trace = run_tests(program)
        report = compute_coverage(program, build_call_graph(program), trace)
        for key, actual in [
                ("direct_ratio", report.direct.ratio),
                ("transitive_ratio", report.transitive.ratio),
                ("direct_declared", sorted(report.direct.declared)),
                ("direct_recorded", sorted(report.direct.recorded))]:
            if key in remaining:
                assert actual == take(key), key
    elif sc.kind == "bench":
        program = case.load(sc.project, sc.pins or None)
        run = run_benchmark(program)
        static = run.detection.tools["static"]
        tests = run.detection.tools["tests"]
        static_score = take("static_score")
        if static_score is not None:
            assert static.score == static_score  # exact, no tolerance
        bound = take("tests_score_below")
        if bound is not None:
            assert tests.score is not None
            assert tests.score < bound
            assert tests.score < static.score
    else:  # pragma: no cover - loader rejects unknown kinds
        pytest.fail(f"unhandled scenario kind {sc.kind!r}")
    assert not remaining, f"unchecked expectation keys: {sorted(remaining)}"


def test_scenarios_cover_all_provenance_tags():
    tags = {sc.provenance
            for name in fixture_names()
            for sc in load_fixture(name).scenarios}
    assert tags == {"PAPER", "TRIVIAL", "DERIVED"}
