"""Package registry: versions, ranges, manifests, storage and resolution.

A registry is a plain directory tree — ``<root>/<package>/<version>/`` holds
``manifest.json`` plus the package's sources — so test fixtures can ship
ready-made registries and ``publish`` is just a validated copy.  Version
resolution picks, for every required package, the highest published version
satisfying the intersection of all requirers' ranges, deterministically.
"""

from __future__ import annotations

import json
import re
import shutil
from dataclasses import dataclass, field
from functools import total_ordering
from pathlib import Path
from typing import Iterable, Mapping

from filelock import FileLock

from .errors import (
    DependencyCycleError,
    InvalidManifestError,
    RegistryError,
    UnknownPackageError,
    UnknownVersionError,
    UnresolvableDependencyError,
    VersionAlreadyPublishedError,
)
from .minilang import parse_module

_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_NUM_RE = re.compile(r"^(0|[1-9][0-9]*)$")

SOURCE_SUFFIX = ".ml0"
MANIFEST_NAME = "manifest.json"


@total_ordering
@dataclass(frozen=True, slots=True)
class Version:
    """A semantic version triple ``MAJOR.MINOR.PATCH``."""

    major: int
    minor: int
    patch: int

    @classmethod
    def parse(cls, text: str) -> "Version":
        parts = text.strip().split(".")
        if len(parts) != 3 or not all(_NUM_RE.match(p) for p in parts):
            raise ValueError(f"invalid version {text!r} "
                             f"(expected MAJOR.MINOR.PATCH)")
        return cls(int(parts[0]), int(parts[1]), int(parts[2]))

    def key(self) -> tuple[int, int, int]:
        return (self.major, self.minor, self.patch)

    def __lt__(self, other: "Version") -> bool:
        return self.key() < other.key()

    def __str__(self) -> str:
        return f"{self.major}.{self.minor}.{self.patch}"


_COMPARATOR_RE = re.compile(r"^(>=|<=|>|<|=)(.+)$")
_OPS = {
    ">=": lambda a, b: a >= b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    "<": lambda a, b: a < b,
    "=": lambda a, b: a == b,
}


@dataclass(frozen=True, slots=True)
class VersionRange:
    """A conjunction of comparators, e.g. ``">=1.0.0 <2.0.0"`` or ``"*"``."""

    comparators: tuple[tuple[str, Version], ...]

    @classmethod
    def parse(cls, text: str) -> "VersionRange":
        words = text.split()
        if not words:
            raise ValueError("empty version range")
        if words == ["*"]:
            return cls(())
        comps = []
        for word in words:
            m = _COMPARATOR_RE.match(word)
            if not m:
                raise ValueError(f"invalid range comparator {word!r}")
            comps.append((m.group(1), Version.parse(m.group(2))))
        return cls(tuple(comps))

    def satisfies(self, version: Version) -> bool:
        return all(_OPS[op](version, v) for op, v in self.comparators)

    def intersect(self, other: "VersionRange") -> "VersionRange":
        return VersionRange(self.comparators + other.comparators)

    def __str__(self) -> str:
        if not self.comparators:
            return "*"
        return " ".join(f"{op}{v}" for op, v in self.comparators)


ANY_VERSION = VersionRange(())


@dataclass(slots=True)
class Manifest:
    """Parsed ``manifest.json``.

    ``sources`` and ``tests`` are relative paths inside the package
    directory; dependencies map package names to version ranges.
    """

    name: str
    version: Version
    dependencies: dict[str, VersionRange] = field(default_factory=dict)
    sources: list[str] = field(default_factory=list)
    tests: list[str] = field(default_factory=list)

    @classmethod
    def from_json(cls, data, where: str = "manifest.json") -> "Manifest":
        def fail(msg: str) -> InvalidManifestError:
            return InvalidManifestError(f"{where}: {msg}")

        if not isinstance(data, dict):
            raise fail("manifest must be a JSON object")
        name = data.get("name")
        if not isinstance(name, str) or not _IDENT_RE.match(name):
            raise fail(f"invalid package name {name!r}")
        try:
            version = Version.parse(data.get("version", ""))
        except ValueError as exc:
            raise fail(str(exc)) from None
        deps: dict[str, VersionRange] = {}
        raw_deps = data.get("dependencies", {})
        if not isinstance(raw_deps, dict):
            raise fail("dependencies must be an object")
        for dep, range_text in raw_deps.items():
            if not _IDENT_RE.match(dep):
                raise fail(f"invalid dependency name {dep!r}")
            if dep == name:
                raise fail(f"package {name!r} depends on itself")
            if not isinstance(range_text, str):
                raise fail(f"dependency {dep!r}: range must be a string")
            try:
                deps[dep] = VersionRange.parse(range_text)
            except ValueError as exc:
                raise fail(f"dependency {dep!r}: {exc}") from None

        def path_list(key: str) -> list[str]:
            raw = data.get(key, [])
            if not isinstance(raw, list) or not all(isinstance(p, str) for p in raw):
                raise fail(f"{key} must be a list of paths")
            seen = set()
            for p in raw:
                if not p.endswith(SOURCE_SUFFIX):
                    raise fail(f"{key} entry {p!r} must end with {SOURCE_SUFFIX}")
                if p.startswith("/") or ".." in Path(p).parts:
                    raise fail(f"{key} entry {p!r} must be a relative path")
                if p in seen:
                    raise fail(f"duplicate {key} entry {p!r}")
                seen.add(p)
            return list(raw)

        return cls(name=name, version=version, dependencies=deps,
                   sources=path_list("sources"), tests=path_list("tests"))

    @classmethod
    def load(cls, path: Path) -> "Manifest":
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise InvalidManifestError(f"no manifest at {path}") from None
        except UnicodeDecodeError:
            raise InvalidManifestError(
                f"{path}: not valid UTF-8 text") from None
        except json.JSONDecodeError as exc:
            raise InvalidManifestError(f"{path}: invalid JSON: {exc}") from None
        return cls.from_json(data, where=str(path))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "version": str(self.version),
            "dependencies": {dep: str(rng)
                             for dep, rng in sorted(self.dependencies.items())},
            "sources": list(self.sources),
            "tests": list(self.tests),
        }


class FileRegistry:
    """Registry backed by a directory tree.

    Reads need no locking (published versions are immutable); ``publish``
    serialises writers with a lock file in the registry root.
    """

    def __init__(self, root: Path | str):
        self.root = Path(root)

    def exists(self) -> bool:
        return self.root.is_dir()

    def _require(self) -> None:
        if not self.exists():
            raise RegistryError(f"registry directory {self.root} does not "
                                f"exist (publish with --init to create it)")

    def packages(self) -> list[str]:
        self._require()
        return sorted(p.name for p in self.root.iterdir()
                      if p.is_dir() and _IDENT_RE.match(p.name))

    def versions(self, package: str) -> list[Version]:
        self._require()
        pdir = self.root / package
        if not pdir.is_dir():
            raise UnknownPackageError(f"package {package!r} is not in the "
                                      f"registry at {self.root}")
        out = []
        for vdir in pdir.iterdir():
            if vdir.is_dir():
                try:
                    out.append(Version.parse(vdir.name))
                except ValueError:
                    continue
        return sorted(out)

    def has_version(self, package: str, version: Version) -> bool:
        return (self.root / package / str(version) / MANIFEST_NAME).is_file()

    def _version_dir(self, package: str, version: Version) -> Path:
        vdir = self.root / package / str(version)
        if not (vdir / MANIFEST_NAME).is_file():
            if not (self.root / package).is_dir():
                raise UnknownPackageError(
                    f"package {package!r} is not in the registry at "
                    f"{self.root}")
            raise UnknownVersionError(
                f"{package}@{version} is not in the registry at {self.root}")
        return vdir

    def manifest(self, package: str, version: Version) -> Manifest:
        vdir = self._version_dir(package, version)
        manifest = Manifest.load(vdir / MANIFEST_NAME)
        if manifest.name != package or manifest.version != version:
            raise InvalidManifestError(
                f"{vdir / MANIFEST_NAME}: manifest says "
                f"{manifest.name}@{manifest.version}, stored as "
                f"{package}@{version}")
        return manifest

    def fetch_sources(self, package: str, version: Version) -> list[tuple[str, str]]:
        """The package's source files as (relative path, text) pairs."""
        vdir = self._version_dir(package, version)
        manifest = self.manifest(package, version)
        out = []
        for rel in manifest.sources:
            src = vdir / rel
            if not src.is_file():
                raise RegistryError(f"{package}@{version}: missing source "
                                    f"file {rel}")
            try:
                out.append((rel, src.read_text()))
            except UnicodeDecodeError:
                raise RegistryError(f"{package}@{version}: source file {rel} "
                                    f"is not valid UTF-8 text") from None
        return out

    def publish(self, package_dir: Path | str, init: bool = False) -> Manifest:
        """Validate and copy a package directory into the registry."""
        package_dir = Path(package_dir)
        manifest = Manifest.load(package_dir / MANIFEST_NAME)
        # Validate sources before touching the registry: files must exist,
        # parse, and declare the package named in the manifest.
        for rel in (*manifest.sources, *manifest.tests):
            src = package_dir / rel
            if not src.is_file():
                raise InvalidManifestError(
                    f"{manifest.name}@{manifest.version}: listed file {rel} "
                    f"does not exist")
            try:
                text = src.read_text()
            except UnicodeDecodeError:
                raise InvalidManifestError(
                    f"{rel} is not valid UTF-8 text") from None
            mod = parse_module(text, rel)
            if mod.package_name != manifest.name:
                raise InvalidManifestError(
                    f"{rel} declares package {mod.package_name!r}, expected "
                    f"{manifest.name!r}")
        if init:
            self.root.mkdir(parents=True, exist_ok=True)
        self._require()
        with FileLock(str(self.root / ".lock")):
            vdir = self.root / manifest.name / str(manifest.version)
            if (vdir / MANIFEST_NAME).exists():
                raise VersionAlreadyPublishedError(
                    f"{manifest.name}@{manifest.version} is already "
                    f"published")
            vdir.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(package_dir / MANIFEST_NAME, vdir / MANIFEST_NAME)
            for rel in (*manifest.sources, *manifest.tests):
                dst = vdir / rel
                dst.parent.mkdir(parents=True, exist_ok=True)
                shutil.copyfile(package_dir / rel, dst)
        return manifest


@dataclass(slots=True)
class DependencyTree:
    """Outcome of resolution: one version per required package."""

    root: Manifest
    resolved: dict[str, Version]
    # requirer name (the root manifest's name included) -> dep -> version
    edges: dict[str, dict[str, Version]]

    @property
    def direct(self) -> frozenset[str]:
        return frozenset(self.root.dependencies)

    def origin(self, package: str) -> str:
        return "direct-dep" if package in self.direct else "transitive-dep"


_MAX_RESOLVE_ROUNDS = 100


def resolve(root: Manifest, registry: FileRegistry,
            pins: Mapping[str, Version] | None = None) -> DependencyTree:
    """Resolve the root manifest's dependency closure against the registry.

    ``pins`` force specific versions (the pinned version must exist, but is
    exempt from range checks) — this is how an update to a version outside
    the currently declared ranges is simulated.
    """
    pins = dict(pins or {})
    for pkg, version in pins.items():
        if not registry.has_version(pkg, version):
            raise UnknownVersionError(
                f"cannot pin {pkg}@{version}: not in the registry")

    chosen: dict[str, Version] = {}
    for _ in range(_MAX_RESOLVE_ROUNDS):
        # Gather every requirement visible from the root plus the currently
        # chosen versions, then re-pick; repeat until stable.
        requirements: dict[str, list[tuple[str, VersionRange]]] = {}
        for dep, rng in root.dependencies.items():
            requirements.setdefault(dep, []).append((root.name, rng))
        for pkg in sorted(chosen):
            man = registry.manifest(pkg, chosen[pkg])
            for dep, rng in man.dependencies.items():
                requirements.setdefault(dep, []).append((pkg, rng))

        new_chosen: dict[str, Version] = {}
        for dep in sorted(requirements):
            if dep in pins:
                new_chosen[dep] = pins[dep]
                continue
            available = registry.versions(dep)
            ranges = [rng for _, rng in requirements[dep]]
            ok = [v for v in available
                  if all(rng.satisfies(v) for rng in ranges)]
            if not ok:
                requirers = ", ".join(
                    f"{who} needs {rng}" for who, rng in requirements[dep])
                raise UnresolvableDependencyError(
                    f"no version of {dep!r} satisfies all requirements "
                    f"({requirers}; available: "
                    f"{', '.join(map(str, available)) or 'none'})")
            new_chosen[dep] = ok[-1]
        if new_chosen == chosen:
            break
        chosen = new_chosen
    else:
        raise UnresolvableDependencyError(
            "resolution did not converge (requirement oscillation)")

    edges: dict[str, dict[str, Version]] = {
        root.name: {dep: chosen[dep] for dep in sorted(root.dependencies)}}
    for pkg in sorted(chosen):
        man = registry.manifest(pkg, chosen[pkg])
        edges[pkg] = {dep: chosen[dep] for dep in sorted(man.dependencies)}

    _reject_cycles(root.name, edges)
    return DependencyTree(root=root, resolved=chosen, edges=edges)


def _reject_cycles(root_name: str, edges: dict[str, dict[str, Version]]) -> None:
    state: dict[str, int] = {}  # 1 = on stack, 2 = done

    def visit(pkg: str, trail: tuple[str, ...]) -> None:
        mark = state.get(pkg)
        if mark == 1:
            cycle = trail[trail.index(pkg):] + (pkg,)
            raise DependencyCycleError(
                "dependency cycle: " + " -> ".join(cycle))
        if mark == 2:
            return
        state[pkg] = 1
        for dep in edges.get(pkg, {}):
            visit(dep, trail + (pkg,))
        state[pkg] = 2

    visit(root_name, ())


def parse_pin(text: str) -> tuple[str, Version]:
    """Parse a ``package=version`` pin argument."""
    name, sep, version_text = text.partition("=")
    if not sep or not _IDENT_RE.match(name):
        raise ValueError(f"invalid pin {text!r} (expected PACKAGE=VERSION)")
    return name, Version.parse(version_text)
