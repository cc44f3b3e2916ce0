"""Reader and writer for the plain-text document format.

Grammar (UTF-8, ``#`` starts a comment, newlines inside brackets are
insignificant, ``\\r\\n`` and ``\\n`` are both accepted)::

    document  := { statement NEWLINE }
    statement := KEY [ STRING ] "=" value
    value     := INTEGER | RATIONAL | STRING | "true" | "false" | "inf" | "-inf"
               | "[" [ value { "," value } [ "," ] ] "]"
               | "{" [ KEY "=" value { "," KEY "=" value } [ "," ] ] "}"
    KEY       := [A-Za-z_][A-Za-z0-9_]*
    INTEGER   := ["-"] digits
    RATIONAL  := ["-"] digits "/" digits
    STRING    := '"' characters with \\" and \\\\ escapes '"'

A document loads as a list of ``Statement(key, label, value)``; values map
to int, Fraction, str, bool, float infinity, list and dict.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Any, NamedTuple

from ..errors import ParseError


class Statement(NamedTuple):
    key: str
    label: str | None
    value: Any


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\r?\n)
  | (?P<num>-?\d+(?:/\d+)?)
  | (?P<inf>-?inf\b)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>[\[\]{}=,])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    pos, line, col0 = 0, 1, 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - col0 + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            out.append((kind, m.group(), line, pos - col0 + 1))
        if kind == "nl":
            line += 1
            col0 = m.end()
        pos = m.end()
    out.append(("eof", "", line, pos - col0 + 1))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        self.depth = 0
        self.lines = []

    def peek(self):
        j = self.i
        while self.depth and self.toks[j][0] == "nl":
            j += 1
        self.i = j
        return self.toks[j]

    def take(self, kind=None, text=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (text and tok[1] != text):
            want = text or kind
            raise ParseError(f"expected {want}, found {tok[1] or tok[0]!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def document(self):
        stmts = []
        while True:
            tok = self.peek()
            if tok[0] == "eof":
                return stmts
            if tok[0] == "nl":
                self.i += 1
                continue
            key_tok = self.take("name")
            key = key_tok[1]
            self.lines.append(key_tok[2])
            label = None
            if self.peek()[0] == "str":
                label = _unquote(self.take("str")[1])
            self.take("punct", "=")
            value = self.value()
            end = self.peek()
            if end[0] not in ("nl", "eof"):
                raise ParseError(f"expected end of line, found {end[1]!r}", end[2], end[3])
            stmts.append(Statement(key, label, value))

    def value(self):
        tok = self.peek()
        kind, text = tok[0], tok[1]
        if kind == "num":
            self.i += 1
            if "/" in text:
                num, den = text.split("/")
                if int(den) == 0:
                    raise ParseError("zero denominator", tok[2], tok[3])
                return Fraction(int(num), int(den))
            return int(text)
        if kind == "inf":
            self.i += 1
            return -math.inf if text.startswith("-") else math.inf
        if kind == "str":
            self.i += 1
            return _unquote(text)
        if kind == "name" and text in ("true", "false"):
            self.i += 1
            return text == "true"
        if text == "[":
            return self._seq("]", self._list_item, list)
        if text == "{":
            return self._seq("}", self._table_item, dict)
        raise ParseError(f"expected a value, found {text or kind!r}", tok[2], tok[3])

    def _list_item(self):
        return self.value()

    def _table_item(self):
        key = self.take("name")[1]
        self.take("punct", "=")
        return key, self.value()

    def _seq(self, close, item, build):
        self.i += 1
        self.depth += 1
        items = []
        while self.peek()[1] != close:
            items.append(item())
            if self.peek()[1] == ",":
                self.i += 1
            elif self.peek()[1] != close:
                tok = self.peek()
                raise ParseError(f"expected ',' or {close!r}, found {tok[1] or tok[0]!r}", tok[2], tok[3])
        self.depth -= 1
        self.i += 1
        if build is dict:
            keys = [k for k, _ in items]
            if len(set(keys)) != len(keys):
                raise ParseError("duplicate key in table")
            return dict(items)
        return items


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def loads(text: str) -> list[Statement]:
    return loads_with_lines(text)[0]


def loads_with_lines(text: str):
    """Like :func:`loads`, also returning the line number of each statement."""
    if text.startswith("﻿"):
        text = text[1:]
    parser = _Parser(text)
    stmts = parser.document()
    return stmts, parser.lines


def dump_value(v, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        raise TypeError("only infinite floats are representable")
    if isinstance(v, str):
        return _quote(v)
    if isinstance(v, (list, tuple)):
        flat = all(not isinstance(x, (list, tuple, dict)) for x in v)
        if flat or all(isinstance(x, (list, tuple)) and all(not isinstance(y, (list, tuple, dict)) for y in x) for x in v):
            return "[" + ", ".join(dump_value(x, indent) for x in v) + "]"
        return "[\n" + "".join(f"{pad}{dump_value(x, indent + 1)},\n" for x in v) + "  " * indent + "]"
    if isinstance(v, dict):
        for k in v:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", k):
                raise ValueError(f"bad table key {k!r}")
        if all(not isinstance(x, (list, tuple, dict)) for x in v.values()):
            return "{" + ", ".join(f"{k} = {dump_value(x, indent)}" for k, x in v.items()) + "}"
        return "{\n" + "".join(f"{pad}{k} = {dump_value(x, indent + 1)},\n" for k, x in v.items()) + "  " * indent + "}"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(stmts) -> str:
    lines = []
    for st in stmts:
        key, label, value = st
        head = key if label is None else f"{key} {_quote(label)}"
        lines.append(f"{head} = {dump_value(value)}")
    return "\n".join(lines) + "\n"
