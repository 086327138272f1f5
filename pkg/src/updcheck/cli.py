"""Command-line entry point.

One executable, ``updcheck``, exposes the whole toolkit::

    updcheck registry publish DIR [--init]     copy a package into the registry
    updcheck registry list [PACKAGE]           published packages and versions
    updcheck test                              run the project's test suite
    updcheck coverage                          dependency coverage report
    updcheck check-update PACKAGE --to VER     static update impact analysis
    updcheck diff PACKAGE --from V1 --to V2    structural diff of two releases
    updcheck callgraph export                  the project's call graph
    updcheck bench                             mutation benchmark (tests vs. static)

Exit codes are designed for CI gating: ``check-update`` exits 0 (safe),
1 (unsafe) or 2 (unused); ``test`` exits 0 only when every test passes;
usage errors exit 64 and every other tool error 65.  ``--json`` output is
deterministic byte-for-byte across runs, so it can be committed as golden
data or diffed by bots.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .callgraph import build_call_graph
from .diffing import ChangeSet, diff_library
from .errors import UpdcheckError, UsageError
from .impact import VERDICT_SAFE, VERDICT_UNSAFE, VERDICT_UNUSED, analyze_update, render_report
from .metrics import compute_coverage, render_coverage
from .minilang import parse_module
from .mutation import OPERATORS, run_benchmark, render_benchmark
from .project import load_project
from .registry import FileRegistry, Version, parse_pin
from .runtime.interp import DEFAULT_FUEL, DEFAULT_MAX_DEPTH
from .runtime.testrun import render_outcome, run_tests

REGISTRY_ENV = "UPDCHECK_REGISTRY"

_EXIT_BY_VERDICT = {VERDICT_SAFE: 0, VERDICT_UNSAFE: 1, VERDICT_UNUSED: 2}

EXIT_USAGE = 64
EXIT_ERROR = 65


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of calling sys.exit on bad usage."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="updcheck",
        description="Dependency-update impact analysis for MiniLang "
                    "packages.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="COMMAND")

    reg = argparse.ArgumentParser(add_help=False)
    reg.add_argument("--registry", metavar="DIR",
                     help=f"registry directory (default: ${REGISTRY_ENV})")

    proj = argparse.ArgumentParser(add_help=False)
    proj.add_argument("--project", metavar="DIR", default=".",
                      help="project directory containing manifest.json "
                           "(default: current directory)")
    proj.add_argument("--pin", metavar="PKG=VER", action="append",
                      default=[],
                      help="resolve PKG to exactly VER instead of the "
                           "newest version in range (repeatable)")

    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--fuel", type=int, default=DEFAULT_FUEL,
                     metavar="N", help="expression-evaluation budget per "
                                       "test (default: %(default)s)")

    jsn = argparse.ArgumentParser(add_help=False)
    jsn.add_argument("--json", action="store_true",
                     help="emit a machine-readable JSON report")

    verb = argparse.ArgumentParser(add_help=False)
    verb.add_argument("-v", "--verbose", action="store_true",
                      help="more detail in text reports")

    # No [reg] parent here: were the intermediate command to accept
    # --registry too, a value given before the action would be silently
    # overwritten by the action parser's default.  This way misplacement
    # fails loudly instead.
    p_registry = sub.add_parser("registry", help="manage a package registry")
    reg_sub = p_registry.add_subparsers(dest="registry_command",
                                        required=True, metavar="ACTION")
    p_publish = reg_sub.add_parser("publish", parents=[reg, jsn],
                                   help="validate and store a package")
    p_publish.add_argument("package_dir", metavar="DIR",
                           help="directory with manifest.json and sources")
    p_publish.add_argument("--init", action="store_true",
                           help="create the registry directory if missing")
    p_list = reg_sub.add_parser("list", parents=[reg, jsn],
                                help="published packages and versions")
    p_list.add_argument("package", nargs="?",
                        help="limit the listing to one package")

    p_test = sub.add_parser("test", parents=[reg, proj, run, jsn, verb],
                            help="run the project's tests against resolved "
                                 "dependencies")

    sub.add_parser("coverage", parents=[reg, proj, run, jsn, verb],
                   help="how much of the dependency surface the tests "
                        "exercise")

    p_check = sub.add_parser("check-update", parents=[reg, proj, jsn, verb],
                             help="assess updating one dependency")
    p_check.add_argument("package", help="dependency to update")
    p_check.add_argument("--to", required=True, metavar="VER",
                         help="candidate version")
    p_check.add_argument("--all-paths", action="store_true",
                         help="report every shortest impact stack, not "
                              "just one per changed function")

    p_diff = sub.add_parser("diff", parents=[reg, jsn],
                            help="structural diff between two published "
                                 "versions")
    p_diff.add_argument("package")
    p_diff.add_argument("--from", dest="from_version", required=True,
                        metavar="VER")
    p_diff.add_argument("--to", dest="to_version", required=True,
                        metavar="VER")

    p_graph = sub.add_parser("callgraph", help="call-graph utilities")
    graph_sub = p_graph.add_subparsers(dest="callgraph_command",
                                       required=True, metavar="ACTION")
    graph_sub.add_parser("export", parents=[reg, proj, jsn],
                         help="emit the project's call graph")

    p_bench = sub.add_parser("bench", parents=[reg, proj, run],
                             help="mutation benchmark: seeded faults vs. "
                                  "tests and static analysis")
    p_bench.add_argument("--operators", metavar="OPS",
                         default=",".join(OPERATORS),
                         help="comma-separated mutation operators "
                              "(default: %(default)s)")
    p_bench.add_argument("--jobs", type=int, default=1, metavar="N",
                         help="evaluate mutants in N worker processes")
    p_bench.add_argument("--json", metavar="PATH",
                         help="write the JSON report to PATH ('-' for "
                              "stdout)")
    p_bench.add_argument("--csv", metavar="PATH",
                         help="write per-mutant CSV rows to PATH ('-' for "
                              "stdout)")
    return parser


# --------------------------------------------------------------------------
# shared pieces


def _registry_from(args) -> FileRegistry:
    path = args.registry or os.environ.get(REGISTRY_ENV)
    if not path:
        raise UsageError(
            f"no registry given: pass --registry DIR or set ${REGISTRY_ENV}")
    return FileRegistry(path)


def _pins_from(args) -> dict[str, Version]:
    pins: dict[str, Version] = {}
    for text in args.pin:
        try:
            name, version = parse_pin(text)
        except ValueError as exc:
            raise UsageError(f"--pin {text!r}: {exc}") from None
        if name in pins:
            raise UsageError(f"--pin {name} given twice")
        pins[name] = version
    return pins


def _load(args):
    registry = _registry_from(args)
    return load_project(Path(args.project), registry, pins=_pins_from(args))


def _parse_version(text: str, what: str) -> Version:
    try:
        return Version.parse(text)
    except ValueError as exc:
        raise UsageError(f"{what}: {exc}") from None


def _emit_json(data: dict) -> None:
    print(json.dumps(data, indent=2))


# --------------------------------------------------------------------------
# subcommands


def _cmd_registry(args) -> int:
    registry = _registry_from(args)
    if args.registry_command == "publish":
        manifest = registry.publish(Path(args.package_dir), init=args.init)
        if args.json:
            _emit_json({"published": f"{manifest.name}@{manifest.version}"})
        else:
            print(f"published {manifest.name}@{manifest.version}")
        return 0
    # list
    names = [args.package] if args.package else registry.packages()
    listing = {name: [str(v) for v in registry.versions(name)]
               for name in names}
    if args.json:
        _emit_json({"schema_version": 1, "packages": listing})
    else:
        for name, versions in listing.items():
            print(f"{name}: {', '.join(versions)}")
    return 0


def _cmd_test(args) -> int:
    program = _load(args)
    outcome, _ = run_tests(program, fuel=args.fuel)
    if args.json:
        _emit_json(outcome.to_json())
    else:
        print(render_outcome(outcome, verbose=args.verbose))
    return 0 if outcome.all_green else 1


def _cmd_coverage(args) -> int:
    program = _load(args)
    _, trace = run_tests(program, fuel=args.fuel)
    report = compute_coverage(program, build_call_graph(program), trace)
    if args.json:
        _emit_json(report.to_json())
    else:
        print(render_coverage(report, verbose=args.verbose))
    return 0


def _cmd_check_update(args) -> int:
    registry = _registry_from(args)
    report = analyze_update(Path(args.project), registry, args.package,
                            _parse_version(args.to, "--to"),
                            all_shortest=args.all_paths)
    if args.json:
        _emit_json(report.to_json())
    else:
        print(render_report(report, verbose=args.verbose))
    return _EXIT_BY_VERDICT[report.verdict]


def _render_changeset(changeset: ChangeSet) -> str:
    head = (f"{changeset.library}: {changeset.old_version} -> "
            f"{changeset.new_version}")
    if not changeset.changes:
        return f"{head}\nno structural changes"
    lines = [head]
    for change in changeset.changes:
        lines.append(f"{change.function}  [{', '.join(sorted(change.kinds))}]")
        for edit in change.edits:
            old = edit.old_text or ""
            new = edit.new_text or ""
            if edit.op == "update":
                lines.append(f"    {edit.op} {edit.slot}: {old}  ->  {new}")
            elif edit.op in ("insert", "move"):
                lines.append(f"    {edit.op} {edit.slot}: {new}")
            else:
                lines.append(f"    {edit.op} {edit.slot}: {old}")
    return "\n".join(lines)


def _cmd_diff(args) -> int:
    registry = _registry_from(args)
    old_version = _parse_version(args.from_version, "--from")
    new_version = _parse_version(args.to_version, "--to")

    def modules_of(version: Version):
        return [parse_module(text, f"{args.package}/{rel}")
                for rel, text in registry.fetch_sources(args.package,
                                                        version)]

    changeset = diff_library(modules_of(old_version),
                             modules_of(new_version), args.package,
                             str(old_version), str(new_version))
    if args.json:
        _emit_json(changeset.to_json())
    else:
        print(_render_changeset(changeset))
    return 0


def _cmd_callgraph(args) -> int:
    program = _load(args)
    graph = build_call_graph(program)
    if args.json:
        _emit_json(graph.to_json())
    else:
        data = graph.to_json()
        print(f"{len(data['nodes'])} functions, {len(data['edges'])} call "
              f"edges")
        for edge in data["edges"]:
            site = edge["site"]
            print(f"{edge['from']} -> {edge['to']}  [{edge['dispatch']}] "
                  f"({site['file']}:{site['line']})")
    return 0


def _cmd_bench(args) -> int:
    operators = [op for op in args.operators.split(",") if op]
    unknown = sorted(set(operators) - set(OPERATORS))
    if unknown:
        raise UsageError(f"--operators: unknown operator(s) "
                         f"{', '.join(unknown)} (choose from "
                         f"{', '.join(OPERATORS)})")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    program = _load(args)
    run = run_benchmark(program, operators=operators, jobs=args.jobs,
                        fuel=args.fuel)

    def write(path: str, text: str) -> None:
        if path == "-":
            sys.stdout.write(text)
        else:
            Path(path).write_text(text)

    if args.json:
        write(args.json, json.dumps(run.to_json(), indent=2) + "\n")
    if args.csv:
        write(args.csv, run.to_csv())
    if not args.json and not args.csv:
        print(render_benchmark(run))
    elif args.json != "-" and args.csv != "-":
        print(render_benchmark(run))
    return 0


_DISPATCH = {
    "registry": _cmd_registry,
    "test": _cmd_test,
    "coverage": _cmd_coverage,
    "check-update": _cmd_check_update,
    "diff": _cmd_diff,
    "callgraph": _cmd_callgraph,
    "bench": _cmd_bench,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _DISPATCH[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except UpdcheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
