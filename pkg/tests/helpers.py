"""Shared builders for the test suite.

Two ways to get a program under test:

* :func:`link` — fully in memory, no filesystem, for unit tests of the
  analyses;
* :func:`publish` / :func:`write_project` — on-disk registry trees and
  project directories, for tests of resolution, loading and the CLI.
"""

from __future__ import annotations

import json
from pathlib import Path

from updcheck.project import (
    ORIGIN_CLIENT,
    ORIGIN_DIRECT,
    ORIGIN_TRANSITIVE,
    Program,
    RawPackage,
    link_program,
)
from updcheck.registry import FileRegistry, Version


def _pairs(files: dict[str, str] | None) -> list[tuple[str, str]]:
    return sorted((files or {}).items())


def pkg(name: str, sources: dict[str, str], *, version: str = "1.0.0",
        origin: str = ORIGIN_TRANSITIVE, tests: dict[str, str] | None = None,
        deps: set[str] | frozenset[str] = frozenset()) -> RawPackage:
    return RawPackage(name=name, version=Version.parse(version),
                      origin=origin, sources=_pairs(sources),
                      tests=_pairs(tests), dependencies=frozenset(deps))


def client(name: str, sources: dict[str, str], *,
           tests: dict[str, str] | None = None,
           deps: set[str] | frozenset[str] = frozenset(),
           version: str = "0.1.0") -> RawPackage:
    return pkg(name, sources, version=version, origin=ORIGIN_CLIENT,
               tests=tests, deps=deps)


def direct(name: str, sources: dict[str, str], *, version: str = "1.0.0",
           tests: dict[str, str] | None = None,
           deps: set[str] | frozenset[str] = frozenset()) -> RawPackage:
    return pkg(name, sources, version=version, origin=ORIGIN_DIRECT,
               tests=tests, deps=deps)


def link(*raws: RawPackage) -> Program:
    return link_program(list(raws))


# --------------------------------------------------------------------------
# on-disk fixtures


def write_package_dir(base: Path, name: str, version: str,
                      sources: dict[str, str],
                      deps: dict[str, str] | None = None,
                      tests: dict[str, str] | None = None) -> Path:
    """Create a publishable package directory and return its path."""
    pdir = base / f"{name}-{version}"
    pdir.mkdir(parents=True)
    manifest = {
        "name": name,
        "version": version,
        "dependencies": deps or {},
        "sources": sorted(sources),
    }
    if tests:
        manifest["tests"] = sorted(tests)
    (pdir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    for rel, text in {**sources, **(tests or {})}.items():
        target = pdir / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
    return pdir


def publish(registry: FileRegistry, base: Path, name: str, version: str,
            sources: dict[str, str],
            deps: dict[str, str] | None = None) -> None:
    registry.publish(write_package_dir(base, name, version, sources, deps),
                     init=True)


def write_project(base: Path, name: str, sources: dict[str, str],
                  deps: dict[str, str] | None = None,
                  tests: dict[str, str] | None = None,
                  version: str = "0.1.0") -> Path:
    """Create a loadable project directory and return its path."""
    pdir = base / name
    pdir.mkdir(parents=True)
    manifest = {
        "name": name,
        "version": version,
        "dependencies": deps or {},
        "sources": sorted(sources),
        "tests": sorted(tests or {}),
    }
    (pdir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    for rel, text in {**sources, **(tests or {})}.items():
        target = pdir / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
    return pdir
