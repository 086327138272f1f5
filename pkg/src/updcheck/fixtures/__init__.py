"""Bundled example ecosystems: small registries plus client projects.

Each fixture is a directory under ``data/`` with the layout::

    registry/       package registry tree, the exact on-disk format
                    FileRegistry reads (<package>/<version>/manifest.json
                    plus the listed sources)
    projects/       one or more client projects (manifest.json, sources,
                    tests), loadable with load_project against registry/
    expected.json   scenario expectations for the fixture

There is deliberately no fixture-only code path: the registry trees and
projects are consumed by the same loaders the CLI uses, so the fixtures
double as end-to-end documentation of the tool.

``expected.json`` holds a list of *scenarios*.  Each scenario names a
project, a command to run against it (``check-update``, ``test``,
``coverage`` or ``bench``) and the expected outcome, and carries a
``provenance`` tag recording where the expectation comes from:

* ``PAPER`` — transcribed from the published worked example the fixture
  reproduces;
* ``TRIVIAL`` — forced by a definition (e.g. an empty denominator);
* ``DERIVED`` — hand-derived from the fixture's construction.

The loader validates the manifest shape and rejects scenarios with missing
or unknown provenance tags.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from ..errors import FixtureFormatError, UnknownFixtureError
from ..project import Program, load_project
from ..registry import FileRegistry, Version

DATA_DIR = Path(__file__).resolve().parent / "data"

PROVENANCE_TAGS = frozenset({"PAPER", "TRIVIAL", "DERIVED"})

COMMAND_KINDS = frozenset({"check-update", "test", "coverage", "bench"})


@dataclass(slots=True)
class Scenario:
    """One expected outcome: run ``command`` on ``project``, check
    ``expect``."""

    name: str
    provenance: str
    project: str
    command: dict
    expect: dict

    @property
    def kind(self) -> str:
        return self.command["kind"]

    @property
    def pins(self) -> dict[str, Version]:
        return {pkg: Version.parse(text)
                for pkg, text in self.command.get("pins", {}).items()}


@dataclass(slots=True)
class FixtureCase:
    """A loaded fixture: registry, client projects and scenarios."""

    name: str
    root: Path
    registry: FileRegistry
    projects: dict[str, Path]
    scenarios: list[Scenario]
    description: str = ""

    def project_dir(self, project: str) -> Path:
        try:
            return self.projects[project]
        except KeyError:
            raise UnknownFixtureError(
                f"fixture {self.name!r} has no project {project!r} "
                f"(has: {', '.join(sorted(self.projects))})") from None

    def load(self, project: str,
             pins: Mapping[str, Version | str] | None = None) -> Program:
        """Load one of the fixture's projects as a checked program."""
        resolved_pins = None
        if pins is not None:
            resolved_pins = {
                pkg: ver if isinstance(ver, Version) else Version.parse(ver)
                for pkg, ver in pins.items()}
        return load_project(self.project_dir(project), self.registry,
                            pins=resolved_pins)


def fixture_names() -> list[str]:
    """Names of all bundled fixtures."""
    if not DATA_DIR.is_dir():  # pragma: no cover - broken installation
        return []
    return sorted(p.name for p in DATA_DIR.iterdir()
                  if p.is_dir() and (p / "expected.json").is_file())


def load_fixture(name: str) -> FixtureCase:
    root = DATA_DIR / name
    if not root.is_dir() or not (root / "expected.json").is_file():
        known = ", ".join(fixture_names()) or "none"
        raise UnknownFixtureError(
            f"unknown fixture {name!r} (bundled fixtures: {known})")

    registry_dir = root / "registry"
    if not registry_dir.is_dir():
        raise FixtureFormatError(f"fixture {name!r} has no registry/ tree")
    projects_dir = root / "projects"
    projects = {}
    if projects_dir.is_dir():
        projects = {p.name: p for p in sorted(projects_dir.iterdir())
                    if (p / "manifest.json").is_file()}

    try:
        data = json.loads((root / "expected.json").read_text())
    except json.JSONDecodeError as exc:
        raise FixtureFormatError(
            f"fixture {name!r}: expected.json is not valid JSON: {exc}")
    return FixtureCase(
        name=name, root=root, registry=FileRegistry(registry_dir),
        projects=projects, scenarios=_parse_scenarios(name, data, projects),
        description=str(data.get("description", "")))


def _parse_scenarios(fixture: str, data, projects: dict) -> list[Scenario]:
    def fail(msg: str) -> FixtureFormatError:
        return FixtureFormatError(f"fixture {fixture!r}: {msg}")

    if not isinstance(data, dict):
        raise fail("expected.json must be a JSON object")
    if data.get("fixture") != fixture:
        raise fail(f"expected.json names fixture {data.get('fixture')!r}")
    raw = data.get("scenarios")
    if not isinstance(raw, list) or not raw:
        raise fail("expected.json must list at least one scenario")

    scenarios: list[Scenario] = []
    seen: set[str] = set()
    for i, item in enumerate(raw):
        where = f"scenario #{i}"
        if not isinstance(item, dict):
            raise fail(f"{where} must be an object")
        name = item.get("name")
        if not isinstance(name, str) or not name:
            raise fail(f"{where} has no name")
        where = f"scenario {name!r}"
        if name in seen:
            raise fail(f"duplicate scenario name {name!r}")
        seen.add(name)
        provenance = item.get("provenance")
        if provenance not in PROVENANCE_TAGS:
            raise fail(f"{where}: provenance must be one of "
                       f"{', '.join(sorted(PROVENANCE_TAGS))}, "
                       f"got {provenance!r}")
        project = item.get("project")
        if not isinstance(project, str) or project not in projects:
            raise fail(f"{where}: unknown project {project!r}")
        command = item.get("command")
        if (not isinstance(command, dict)
                or command.get("kind") not in COMMAND_KINDS):
            raise fail(f"{where}: command.kind must be one of "
                       f"{', '.join(sorted(COMMAND_KINDS))}")
        expect = item.get("expect")
        if not isinstance(expect, dict):
            raise fail(f"{where}: expect must be an object")
        scenarios.append(Scenario(name=name, provenance=provenance,
                                  project=project, command=command,
                                  expect=expect))
    return scenarios
