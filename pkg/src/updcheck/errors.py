"""Exception hierarchy shared across the toolkit.

Two families live here.  ``UpdcheckError`` subclasses are tool-level failures
(bad input, broken registry state, impossible requests) that the CLI maps to
non-zero exit codes.  ``RuntimeFault`` subclasses are faults raised *by
interpreted MiniLang code* (division by zero, exhausted fuel, failed
assertions); the test runner catches them and turns them into per-test
outcomes rather than aborting the process.
"""

from __future__ import annotations


class UpdcheckError(Exception):
    """Base class for all tool-level errors."""


# --------------------------------------------------------------------------
# MiniLang front-end


class MiniLangError(UpdcheckError):
    """A source-level error with an optional location."""

    def __init__(self, message: str, file: str | None = None,
                 line: int | None = None, col: int | None = None):
        self.message = message
        self.file = file
        self.line = line
        self.col = col
        super().__init__(self._render())

    def _render(self) -> str:
        loc = ""
        if self.file is not None:
            loc = self.file
        if self.line is not None:
            loc += f":{self.line}"
            if self.col is not None:
                loc += f":{self.col}"
        return f"{loc}: {self.message}" if loc else self.message


class ParseError(MiniLangError):
    """Lexical or syntactic error."""


class DuplicateDefinitionError(MiniLangError):
    """A name was declared twice in the same namespace."""


class TypeCheckError(MiniLangError):
    """A well-formed module violates the static semantics."""


# --------------------------------------------------------------------------
# Registry / resolution


class RegistryError(UpdcheckError):
    pass


class InvalidManifestError(RegistryError):
    pass


class UnknownPackageError(RegistryError):
    pass


class UnknownVersionError(RegistryError):
    pass


class VersionAlreadyPublishedError(RegistryError):
    pass


class UnresolvableDependencyError(RegistryError):
    pass


class DependencyCycleError(RegistryError):
    pass


# --------------------------------------------------------------------------
# Analyses


class UnknownDependencyError(UpdcheckError):
    """The named package is not part of the project's dependency tree."""


class MismatchedProgramError(UpdcheckError):
    """A trace and a call graph come from different programs."""


class RedBaselineError(UpdcheckError):
    """The benchmark refused to run because the unmutated suite is not green."""


class UnknownFixtureError(UpdcheckError):
    pass


class FixtureFormatError(UpdcheckError):
    pass


class UsageError(UpdcheckError):
    """Bad command-line invocation (maps to exit code 64)."""


# --------------------------------------------------------------------------
# Faults raised by interpreted code.  These deliberately do not inherit from
# UpdcheckError: reaching the CLI unhandled would be a bug, not a user error.


class RuntimeFault(Exception):
    def __init__(self, message: str, file: str | None = None,
                 line: int | None = None):
        self.message = message
        self.file = file
        self.line = line
        loc = f" at {file}:{line}" if file is not None and line is not None else ""
        super().__init__(message + loc)


class DivisionByZeroFault(RuntimeFault):
    pass


class FuelExhaustedFault(RuntimeFault):
    pass


class CallDepthFault(RuntimeFault):
    pass


class AssertFailedFault(RuntimeFault):
    pass


class MissingReturnFault(RuntimeFault):
    pass
