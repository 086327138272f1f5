"""MiniLang front end: AST, lexer, parser, pretty-printer and checker.

MiniLang is the small statically typed language this toolkit analyses.  Its
grammar is documented in ``docs/grammar.md``; source files use the ``.ml0``
extension.
"""

from . import ast
from .checker import BUILTIN_FUNCTIONS, BUILTIN_PACKAGE, ProgramIndex, check_program
from .parser import parse_module
from .printer import fragment, print_expr, print_function, print_module, print_stmt

__all__ = [
    "ast",
    "parse_module",
    "print_module",
    "print_function",
    "print_stmt",
    "print_expr",
    "fragment",
    "check_program",
    "ProgramIndex",
    "BUILTIN_PACKAGE",
    "BUILTIN_FUNCTIONS",
]
