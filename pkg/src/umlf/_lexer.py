"""Tokenizer and recursive-descent helpers shared by the .umlf and .inst readers."""

from __future__ import annotations

import re
from dataclasses import dataclass

IDENT = "IDENT"
STRING = "STRING"
PUNCT = "PUNCT"
EOF = "EOF"

# Hyphens are allowed inside identifiers so multi-word tags lex as one token,
# but never before a non-word character ("A->B" is three tokens).
_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z_][A-Za-z0-9_]*)*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>->|[{}()\[\]:,.=])
    """,
    re.VERBOSE,
)
PLAIN_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class ParseError:
    """One problem found in a source file; line and column are 1-based."""

    line: int
    column: int
    expected: str
    found: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: expected {self.expected}, found {self.found}"


class SourceError(ValueError):
    """Raised when a source file cannot be read into a value."""

    def __init__(self, errors: list[ParseError], source: str = "<input>"):
        self.errors = errors
        self.source = source
        detail = "; ".join(str(e) for e in errors[:3])
        more = f" (+{len(errors) - 3} more)" if len(errors) > 3 else ""
        super().__init__(f"{source}: {detail}{more}")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int

    def shown(self) -> str:
        return "end of input" if self.kind == EOF else repr(self.text)


def unquote(text: str) -> str:
    body = text[1:-1]
    return re.sub(r"\\(.)", r"\1", body)


def quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def tokenize(text: str, errors: list[ParseError]) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            errors.append(ParseError(line, col, "token", repr(text[pos])))
            pos += 1
            continue
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            tokens.append(Token(IDENT, m.group(), line, col))
        elif kind == "string":
            tokens.append(Token(STRING, m.group(), line, col))
        elif kind == "punct":
            tokens.append(Token(PUNCT, m.group(), line, col))
        pos = m.end()
    # EOF sits on the last character so its position stays inside the text.
    if text:
        last = len(text) - 1
        eof_line = text.count("\n", 0, last) + 1
        eof_col = last - (text.rfind("\n", 0, last) + 1) + 1
    else:
        eof_line, eof_col = 1, 1
    tokens.append(Token(EOF, "", eof_line, eof_col))
    return tokens


class Syntax(Exception):
    """Internal control flow: abandon the current construct and resynchronise."""


class TokenStream:
    def __init__(self, text: str):
        self.errors: list[ParseError] = []
        self.tokens = tokenize(text, self.errors)
        self.i = 0
        # Brace depth of each token; braces themselves get the outer depth.
        self.depth: list[int] = []
        d = 0
        for t in self.tokens:
            if t.kind == PUNCT and t.text == "}":
                d = max(d - 1, 0)
            self.depth.append(d)
            if t.kind == PUNCT and t.text == "{":
                d += 1

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in (IDENT, PUNCT) and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        if t.kind != EOF:
            self.i += 1
        return t

    def fail(self, expected: str, tok: Token | None = None) -> Syntax:
        t = tok or self.tok
        self.errors.append(ParseError(t.line, t.column, expected, t.shown()))
        return Syntax()

    def report(self, tok: Token, expected: str, found: str | None = None) -> None:
        self.errors.append(ParseError(tok.line, tok.column, expected, found or tok.shown()))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.fail(repr(text))
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != IDENT:
            raise self.fail(what)
        return self.advance()

    def name(self, what: str = "name") -> Token:
        """An identifier without hyphens (class, member, event names)."""
        t = self.ident(what)
        if not PLAIN_NAME.match(t.text):
            self.report(t, what)
        return t

    def string(self) -> Token:
        if self.tok.kind != STRING:
            raise self.fail("string")
        return self.advance()

    def ident_list(self, what: str, closer: str) -> list[Token]:
        """``a, b, c`` up to (not consuming) ``closer``; may be empty."""
        items: list[Token] = []
        if self.at(closer):
            return items
        items.append(self.ident(what))
        while self.accept(","):
            items.append(self.ident(what))
        return items

    def sync(self, level: int, stops: set[str]) -> None:
        """Skip to the next ``stops`` keyword at ``level`` or the brace closing it."""
        while self.tok.kind != EOF:
            d = self.depth[self.i]
            if d == level and self.tok.kind == IDENT and self.tok.text in stops:
                return
            if d == level - 1 and self.tok.kind == PUNCT and self.tok.text == "}":
                return
            self.advance()

    @property
    def level(self) -> int:
        return self.depth[self.i]
