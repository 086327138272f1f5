"""Hand-written lexer for MiniLang.

Produces a flat token list; whitespace and comments (``//`` and ``/* */``)
are trivia and never reach the parser.  Integer literals must fit in a
signed 64-bit value (negative numbers are spelled with unary minus).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError
from .ast import INT_MAX

KEYWORDS = frozenset({
    "package", "import", "interface", "class", "extends", "implements",
    "fn", "private", "var", "if", "else", "while", "return", "assert",
    "true", "false", "this", "new", "abs", "int", "bool",
})

# Longest-match first for the two-character operators.
TWO_CHAR = ("->", "==", "!=", "<=", ">=", "&&", "||")
ONE_CHAR = "{}().,;:=<>+-*/%!^"

T_IDENT = "ident"
T_INT = "int"
T_EOF = "eof"
# Keywords and punctuation tokens use their own spelling as the token type.


@dataclass(slots=True)
class Token:
    type: str
    value: str
    line: int
    col: int

    def __repr__(self) -> str:  # compact, for parser error messages
        return f"{self.type}({self.value!r})@{self.line}:{self.col}"


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def error(msg: str) -> ParseError:
        return ParseError(msg, file=file, line=line, col=col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "*":
            start_line, start_col = line, col
            i += 2
            col += 2
            while True:
                if i + 1 >= n:
                    line, col = start_line, start_col
                    raise error("unterminated block comment")
                if text[i] == "*" and text[i + 1] == "/":
                    i += 2
                    col += 2
                    break
                if text[i] == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                i += 1
            continue
        if ch.isdigit():
            start = i
            start_col = col
            while i < n and text[i].isdigit():
                i += 1
                col += 1
            if i < n and (text[i].isalpha() or text[i] == "_"):
                raise error("identifier may not start with a digit")
            lit = text[start:i]
            if int(lit) > INT_MAX:
                col = start_col
                raise error(f"integer literal out of 64-bit range: {lit}")
            tokens.append(Token(T_INT, lit, line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            start = i
            start_col = col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
                col += 1
            word = text[start:i]
            ttype = word if word in KEYWORDS else T_IDENT
            tokens.append(Token(ttype, word, line, start_col))
            continue
        two = text[i:i + 2]
        if two in TWO_CHAR:
            tokens.append(Token(two, two, line, col))
            i += 2
            col += 2
            continue
        if ch in ONE_CHAR:
            tokens.append(Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        raise error(f"unexpected character {ch!r}")

    tokens.append(Token(T_EOF, "", line, col))
    return tokens
