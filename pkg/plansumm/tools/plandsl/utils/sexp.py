# plansumm/tools/plandsl/utils/sexp.py

"""S-expression reader that keeps line/column positions for diagnostics."""

from __future__ import annotations

from typing import Iterator, List, Sequence, Union

import pyparsing as pp

from plansumm.core.errors import DslSyntaxError


class Symbol(str):
    """A bare token carrying its source position."""

    line: int = 0
    col: int = 0

    def __new__(cls, text: str, line: int = 0, col: int = 0):
        obj = super().__new__(cls, text)
        obj.line = line
        obj.col = col
        return obj


class SList:
    """A parenthesised list. Not a `list` so pyparsing never flattens it."""

    __slots__ = ("items", "line", "col")

    def __init__(self, items: Sequence["Node"], line: int = 0, col: int = 0):
        self.items = list(items)
        self.line = line
        self.col = col

    def __iter__(self) -> Iterator["Node"]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, index):
        return self.items[index]

    @property
    def head(self) -> str:
        if self.items and isinstance(self.items[0], Symbol):
            return str(self.items[0])
        return ""

    def __repr__(self) -> str:
        return "(" + " ".join(repr(i) if isinstance(i, SList) else str(i) for i in self.items) + ")"


Node = Union[Symbol, SList]

# --- Grammar ---

_LPAR, _RPAR = map(pp.Suppress, "()")
_COMMENT = pp.Regex(r";[^\n]*")

_symbol = pp.Regex(r"[^\s();]+").set_name("symbol")
_symbol.set_parse_action(lambda s, loc, toks: Symbol(toks[0], pp.lineno(loc, s), pp.col(loc, s)))

_sexp = pp.Forward().set_name("s-expression")
_slist = pp.Group(_LPAR + pp.ZeroOrMore(_sexp) + _RPAR).set_name("list")
_slist.set_parse_action(lambda s, loc, toks: SList(list(toks[0]), pp.lineno(loc, s), pp.col(loc, s)))
_sexp <<= _symbol | _slist

_document = pp.ZeroOrMore(_sexp)
_document.ignore(_COMMENT)


def read_all(text: str) -> List[Node]:
    """Parse every top-level s-expression in `text`."""
    try:
        result = _document.parse_string(text, parse_all=True)
    except pp.ParseException as e:
        raise DslSyntaxError(e.lineno, e.col, _expected(e)) from e
    return list(result)


def _expected(e: pp.ParseException) -> str:
    found = e.line[e.col - 1:e.col] if e.line else ""
    if found == ")":
        return "an s-expression (unbalanced ')')"
    if not found:
        return "')' before end of input"
    return str(e.msg).replace("Expected ", "") or "s-expression"


def syntax_error(node: Node, expected: str) -> DslSyntaxError:
    return DslSyntaxError(getattr(node, "line", 0), getattr(node, "col", 0), expected)
