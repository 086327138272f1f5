"""Interpreter façade: kernel selection and program execution state.

Two interchangeable kernels exist: ``_evalcore`` (always present, plain
Python) and ``_evalcore_c`` (the same source compiled by Cython at build
time).  The compiled one is preferred when it imported as an actual
extension; setting ``UPDCHECK_PURE=1`` forces the plain kernel.  Both are
importable side by side, which is how ``benchmarks/bench_cores.py`` compares
them.
"""

from __future__ import annotations

import os
import sys
from types import ModuleType

from ..minilang.ast import FunctionDecl
from ..project import Program

DEFAULT_FUEL = 10_000_000
DEFAULT_MAX_DEPTH = 128

# Deep MiniLang call chains expand to many Python frames (one per nested
# statement/expression); make sure the pure kernel has room for max depth.
_PY_RECURSION_FLOOR = 24_000


def _load_core() -> tuple[ModuleType, bool]:
    from . import _evalcore

    if os.environ.get("UPDCHECK_PURE", "") not in ("", "0"):
        return _evalcore, False
    try:
        from . import _evalcore_c as compiled
    except ImportError:
        return _evalcore, False
    path = getattr(compiled, "__file__", "") or ""
    if path.endswith(".py"):
        # The build-time source copy is importable even when compilation was
        # skipped; it is not a compiled kernel, so don't report it as one.
        return _evalcore, False
    return compiled, True


core, CORE_COMPILED = _load_core()
CORE_NAME = "compiled" if CORE_COMPILED else "pure"


class Interpreter:
    """Executes functions of one linked program."""

    def __init__(self, program: Program, kernel: ModuleType | None = None,
                 fuel: int = DEFAULT_FUEL,
                 max_depth: int = DEFAULT_MAX_DEPTH):
        self.program = program
        self.kernel = kernel if kernel is not None else core
        self.fuel = fuel
        self.max_depth = max_depth
        index = program.index
        self.funcs = index.functions
        self.dispatch = {key: index.functions[qn]
                         for key, qn in index.dispatch.items()}
        self.client_src = frozenset(program.client_src_functions())
        if sys.getrecursionlimit() < _PY_RECURSION_FLOOR:
            sys.setrecursionlimit(_PY_RECURSION_FLOOR)

    def new_rt(self, trace: set | None):
        return self.kernel.RT(self.funcs, self.dispatch, self.client_src,
                              trace, self.fuel, self.max_depth)

    def call(self, fn: FunctionDecl | str, args: list | None = None,
             trace: set | None = None, rt=None):
        """Call a function by declaration or qualified name; returns its
        value.  A fresh RT is used unless one is passed in."""
        if isinstance(fn, str):
            fn = self.funcs[fn]
        if rt is None:
            rt = self.new_rt(trace)
        return self.kernel.call_function(rt, fn, list(args or ()), None)
