"""Loading and linking: from a project directory to a checked program.

A *program* is the client package plus the sources of every resolved
dependency, parsed and checked together.  The linker is deliberately
re-entrant: ``relink_with_sources`` swaps one package's sources (used by the
mutation engine to materialise mutants) and re-checks, reusing the parsed
modules of every other package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import InvalidManifestError
from .minilang import check_program, parse_module
from .minilang.ast import ModuleAst
from .minilang.checker import ProgramIndex
from .registry import (
    DependencyTree,
    FileRegistry,
    Manifest,
    Version,
    resolve,
)

ORIGIN_CLIENT = "client"
ORIGIN_DIRECT = "direct-dep"
ORIGIN_TRANSITIVE = "transitive-dep"


@dataclass(slots=True)
class PackageUnit:
    """One package of a linked program."""

    name: str
    version: Version
    origin: str
    modules: list[ModuleAst]
    test_modules: list[ModuleAst] = field(default_factory=list)
    dependencies: frozenset[str] = frozenset()

    @property
    def all_modules(self) -> list[ModuleAst]:
        return [*self.modules, *self.test_modules]


@dataclass(slots=True)
class Program:
    """A checked client + dependency closure."""

    client: str
    packages: dict[str, PackageUnit]
    index: ProgramIndex
    tree: DependencyTree | None = None

    @property
    def client_unit(self) -> PackageUnit:
        return self.packages[self.client]

    def owner_label(self, qn: str) -> str:
        pkg = self.index.fn_package[qn]
        return f"{pkg}@{self.packages[pkg].version}"

    def origin_of(self, pkg: str) -> str:
        return self.packages[pkg].origin

    def client_src_functions(self) -> set[str]:
        """Functions declared in the client's source (non-test) modules."""
        out = set()
        for mod in self.client_unit.modules:
            for fn in mod.declared_functions():
                out.add(fn.qualified_name)
        return out

    def client_test_functions(self) -> list:
        """Discovered test functions, in file order then declaration order."""
        tests = []
        for mod in self.client_unit.test_modules:
            for fn in mod.functions:
                if fn.is_test:
                    tests.append(fn)
        return tests

    def dependency_functions(self) -> set[str]:
        out = set()
        for pkg, unit in self.packages.items():
            if unit.origin != ORIGIN_CLIENT:
                for mod in unit.modules:
                    for fn in mod.declared_functions():
                        out.add(fn.qualified_name)
        return out

    def functions_of(self, pkg: str) -> set[str]:
        out = set()
        for mod in self.packages[pkg].all_modules:
            for fn in mod.declared_functions():
                out.add(fn.qualified_name)
        return out


@dataclass(slots=True)
class RawPackage:
    """Unparsed input to the linker: (filename, text) source pairs."""

    name: str
    version: Version
    origin: str
    sources: list[tuple[str, str]]
    tests: list[tuple[str, str]] = field(default_factory=list)
    dependencies: frozenset[str] = frozenset()


def _parse_unit(raw: RawPackage) -> PackageUnit:
    def parse_all(pairs: Iterable[tuple[str, str]]) -> list[ModuleAst]:
        mods = []
        for rel, text in pairs:
            mod = parse_module(text, f"{raw.name}/{rel}")
            if mod.package_name != raw.name:
                raise InvalidManifestError(
                    f"{raw.name}/{rel} declares package "
                    f"{mod.package_name!r}, expected {raw.name!r}")
            mods.append(mod)
        return mods

    return PackageUnit(name=raw.name, version=raw.version, origin=raw.origin,
                       modules=parse_all(raw.sources),
                       test_modules=parse_all(raw.tests),
                       dependencies=raw.dependencies)


def link_program(raw_packages: Sequence[RawPackage],
                 tree: DependencyTree | None = None) -> Program:
    """Parse and check a set of packages into a program.

    Exactly one package must have origin ``client``.
    """
    units = [_parse_unit(raw) for raw in raw_packages]
    return _link_units(units, tree)


def _link_units(units: Sequence[PackageUnit],
                tree: DependencyTree | None) -> Program:
    clients = [u for u in units if u.origin == ORIGIN_CLIENT]
    if len(clients) != 1:
        raise InvalidManifestError(
            f"a program needs exactly one client package, got "
            f"{len(clients)}")
    packages = {u.name: u for u in units}
    if len(packages) != len(units):
        raise InvalidManifestError("duplicate package names in program")
    index = check_program(
        {name: unit.all_modules for name, unit in packages.items()},
        allowed_imports={name: unit.dependencies
                         for name, unit in packages.items()})
    return Program(client=clients[0].name, packages=packages, index=index,
                   tree=tree)


def load_project(project_dir: Path | str, registry: FileRegistry,
                 pins: Mapping[str, Version] | None = None) -> Program:
    """Load the project in ``project_dir``, resolving its dependencies
    against ``registry`` (current versions unless pinned)."""
    project_dir = Path(project_dir)
    manifest = Manifest.load(project_dir / "manifest.json")
    tree = resolve(manifest, registry, pins)
    if manifest.name in tree.resolved:
        raise InvalidManifestError(
            f"project {manifest.name!r} collides with a dependency of the "
            f"same name")

    def read_all(rels: Sequence[str]) -> list[tuple[str, str]]:
        out = []
        for rel in rels:
            path = project_dir / rel
            if not path.is_file():
                raise InvalidManifestError(
                    f"{manifest.name}: listed file {rel} does not exist")
            try:
                out.append((rel, path.read_text()))
            except UnicodeDecodeError:
                raise InvalidManifestError(
                    f"{manifest.name}: listed file {rel} is not valid "
                    f"UTF-8 text") from None
        return out

    raws = [RawPackage(name=manifest.name, version=manifest.version,
                       origin=ORIGIN_CLIENT,
                       sources=read_all(manifest.sources),
                       tests=read_all(manifest.tests),
                       dependencies=frozenset(manifest.dependencies))]
    for pkg in sorted(tree.resolved):
        version = tree.resolved[pkg]
        dep_manifest = registry.manifest(pkg, version)
        raws.append(RawPackage(
            name=pkg, version=version, origin=tree.origin(pkg),
            sources=registry.fetch_sources(pkg, version),
            dependencies=frozenset(dep_manifest.dependencies)))
    return link_program(raws, tree)


def relink_with_sources(program: Program, package: str,
                        sources: Mapping[str, str]) -> Program:
    """Link a variant of ``program`` in which ``package``'s source files are
    replaced by ``sources`` (relative path -> text).

    Other packages' parsed modules are reused as objects; the checker pass
    re-annotates them, which is safe because checking is idempotent and the
    replacement must keep every function signature intact for the client to
    stay well-typed.
    """
    old = program.packages[package]
    raw = RawPackage(name=package, version=old.version, origin=old.origin,
                     sources=sorted(sources.items()),
                     dependencies=old.dependencies)
    units = [(_parse_unit(raw) if name == package else unit)
             for name, unit in program.packages.items()]
    return _link_units(units, program.tree)
