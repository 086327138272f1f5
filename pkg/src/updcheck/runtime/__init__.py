"""MiniLang execution: interpreter kernels, test runner, call tracing."""

from .interp import (
    CORE_COMPILED,
    CORE_NAME,
    DEFAULT_FUEL,
    DEFAULT_MAX_DEPTH,
    Interpreter,
    core,
)
from .testrun import TestOutcome, TestResult, TraceLog, render_outcome, run_tests

__all__ = [
    "Interpreter",
    "run_tests",
    "render_outcome",
    "TestOutcome",
    "TestResult",
    "TraceLog",
    "core",
    "CORE_COMPILED",
    "CORE_NAME",
    "DEFAULT_FUEL",
    "DEFAULT_MAX_DEPTH",
]
