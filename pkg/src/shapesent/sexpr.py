"""A small S-expression reader that keeps source positions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, column: int = 0,
                 filename: Optional[str] = None):
        self.message = message
        self.line = line
        self.column = column
        self.filename = filename
        super().__init__(str(self))

    def __str__(self) -> str:
        return f"{self.filename or '<input>'}:{self.line}:{self.column}: {self.message}"


@dataclass(frozen=True)
class Sym:
    name: str
    pos: tuple[int, int] = field(default=(0, 0), compare=False)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Int:
    value: int
    pos: tuple[int, int] = field(default=(0, 0), compare=False)

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class SList:
    items: tuple
    pos: tuple[int, int] = field(default=(0, 0), compare=False)

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __iter__(self):
        return iter(self.items)

    def __str__(self) -> str:
        return "(" + " ".join(str(x) for x in self.items) + ")"

    @property
    def head(self) -> Optional[str]:
        if self.items and isinstance(self.items[0], Sym):
            return self.items[0].name
        return None


SExpr = Union[Sym, Int, SList]

_DELIMS = set("();\"")


def read_all(text: str, filename: Optional[str] = None) -> list[SExpr]:
    """Read every top-level S-expression in ``text``."""
    stack: list[tuple[tuple[int, int], list]] = []
    top: list[SExpr] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
        elif c.isspace():
            i += 1
            col += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "(":
            stack.append(((line, col), []))
            i += 1
            col += 1
        elif c == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col, filename)
            pos, items = stack.pop()
            node = SList(tuple(items), pos)
            (stack[-1][1] if stack else top).append(node)
            i += 1
            col += 1
        elif c == '"':
            raise ParseError("string literals are not supported", line, col, filename)
        else:
            start = i
            while i < n and not text[i].isspace() and text[i] not in _DELIMS:
                i += 1
            tok = text[start:i]
            pos = (line, col)
            col += i - start
            if tok.isdigit() and tok.isascii():
                node = Int(int(tok), pos)
            else:
                node = Sym(tok, pos)
            (stack[-1][1] if stack else top).append(node)
    if stack:
        pos = stack[-1][0]
        raise ParseError("unclosed '('", pos[0], pos[1], filename)
    return top
