"""Go lexer with automatic semicolon insertion.

Positions are reported in bytes (1-based columns, 0-based offsets), the same
convention the Go toolchain uses, so reported locations line up with
``go vet`` and the race detector.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate

KEYWORDS = frozenset(
    """break case chan const continue default defer else fallthrough for func go goto
    if import interface map package range return select struct switch type var""".split()
)

# ident, literal, these keywords or these operators at end of line => implicit ';'
_SEMI_KEYWORDS = frozenset({"break", "continue", "fallthrough", "return"})
_SEMI_OPS = frozenset({"++", "--", ")", "]", "}"})

_OPERATORS = [
    "<<=", ">>=", "&^=", "...",
    "&&", "||", "<-", "++", "--", "==", "!=", "<=", ">=", ":=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "&^",
    "+", "-", "*", "/", "%", "&", "|", "^", "<", ">", "=", "!", "~",
    "(", ")", "[", "]", "{", "}", ",", ";", ".", ":",
]

_NUMBER = (
    r"0[xX][0-9a-fA-F_]*(?:\.[0-9a-fA-F_]*)?(?:[pP][+-]?[0-9_]+)?i?"
    r"|0[bB][01_]+i?"
    r"|0[oO][0-7_]+i?"
    r"|(?:\d[\d_]*(?:\.[\d_]*)?|\.\d[\d_]*)(?:[eE][+-]?[\d_]+)?i?"
)

_TOKEN_RE = re.compile(
    "|".join(
        [
            r"(?P<ws>[ \t\r\f﻿]+)",
            r"(?P<nl>\n)",
            r"(?P<lcomment>//[^\n]*)",
            r"(?P<bcomment>/\*.*?\*/)",
            r"(?P<raw>`[^`]*`)",
            r'(?P<string>"(?:\\.|[^"\\\n])*")',
            r"(?P<char>'(?:\\[^\n]|[^'\\\n])+')",
            rf"(?P<number>{_NUMBER})",
            r"(?P<ident>[^\W\d]\w*)",
            "(?P<op>" + "|".join(re.escape(op) for op in _OPERATORS) + ")",
        ]
    ),
    re.DOTALL,
)


@dataclass(frozen=True, order=True)
class SourcePosition:
    byte_offset: int
    line: int
    column: int
    file: str = ""

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Span:
    start: SourcePosition
    end: SourcePosition

    def __post_init__(self):
        if self.end.byte_offset < self.start.byte_offset:
            raise ValueError(f"inverted span {self.start}..{self.end}")

    def contains(self, other: "Span") -> bool:
        return (
            self.start.byte_offset <= other.start.byte_offset
            and other.end.byte_offset <= self.end.byte_offset
        )

    @property
    def file(self) -> str:
        return self.start.file


class ParseError(Exception):
    """Lexical or syntactic failure at a known source position."""

    def __init__(self, message: str, position: SourcePosition):
        super().__init__(f"{position}: {message}")
        self.message = message
        self.position = position


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, int, string, char, op, semi, eof
    value: str
    start: int  # char index into the source text
    end: int


@dataclass(frozen=True)
class Comment:
    text: str
    start: int
    end: int


class SourceMap:
    """Converts character indices of a decoded file into byte positions."""

    def __init__(self, text: str, path: str):
        self.path = path
        self.text = text
        self._line_starts = [0] + [m.end() for m in re.finditer("\n", text)]
        if text.isascii():
            self._byte_at = None
        else:
            self._byte_at = [0, *accumulate(len(ch.encode("utf-8")) for ch in text)]

    def byte_offset(self, index: int) -> int:
        return index if self._byte_at is None else self._byte_at[index]

    def position(self, index: int) -> SourcePosition:
        row = bisect_right(self._line_starts, index) - 1
        line_start = self._line_starts[row]
        column = self.byte_offset(index) - self.byte_offset(line_start) + 1
        return SourcePosition(self.byte_offset(index), row + 1, column, self.path)

    def span(self, start: int, end: int) -> Span:
        return Span(self.position(start), self.position(end))


def tokenize(source: SourceMap) -> tuple[list[Token], list[Comment]]:
    text = source.text
    tokens: list[Token] = []
    comments: list[Comment] = []
    pos = 0

    def needs_semi() -> bool:
        if not tokens:
            return False
        last = tokens[-1]
        if last.kind in ("ident", "int", "float", "imag", "char", "string"):
            return True
        if last.kind == "keyword":
            return last.value in _SEMI_KEYWORDS
        return last.kind == "op" and last.value in _SEMI_OPS

    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            snippet = text[pos]
            if snippet in "\"'`" or text.startswith("/*", pos):
                raise ParseError("unterminated literal or comment", source.position(pos))
            raise ParseError(f"unexpected character {snippet!r}", source.position(pos))
        kind = m.lastgroup
        start, end = m.span()
        value = m.group()
        if kind == "nl":
            if needs_semi():
                tokens.append(Token("semi", "\n", start, start))
        elif kind == "lcomment":
            comments.append(Comment(value, start, end))
        elif kind == "bcomment":
            comments.append(Comment(value, start, end))
            if "\n" in value and needs_semi():
                tokens.append(Token("semi", "\n", start, start))
        elif kind == "ws":
            pass
        elif kind == "ident":
            tokens.append(Token("keyword" if value in KEYWORDS else "ident", value, start, end))
        elif kind == "number":
            prefix = value[:2].lower()
            if value.endswith("i"):
                num_kind = "imag"
            elif prefix == "0x":
                num_kind = "float" if re.search(r"[.pP]", value) else "int"
            elif prefix in ("0b", "0o"):
                num_kind = "int"
            else:
                num_kind = "float" if re.search(r"[.eE]", value) else "int"
            tokens.append(Token(num_kind, value, start, end))
        elif kind in ("raw", "string"):
            tokens.append(Token("string", value, start, end))
        elif kind == "char":
            tokens.append(Token("char", value, start, end))
        elif value == ";":
            tokens.append(Token("semi", ";", start, end))
        else:
            tokens.append(Token("op", value, start, end))
        pos = end

    if needs_semi():
        tokens.append(Token("semi", "\n", len(text), len(text)))
    tokens.append(Token("eof", "", len(text), len(text)))
    return tokens, comments
