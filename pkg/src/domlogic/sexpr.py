"""Thin wrapper around sexpdata producing nested lists of strings."""
from __future__ import annotations

from typing import Union

import sexpdata

from .errors import ParseError

SExpr = Union[str, list]


def _convert(node) -> SExpr:
    if isinstance(node, list):
        return [_convert(x) for x in node]
    if isinstance(node, sexpdata.Symbol):
        return node.value()
    if isinstance(node, (int, float)):
        return str(node)
    if isinstance(node, str):
        return node
    if isinstance(node, sexpdata.Quoted):
        raise ParseError("quoted forms are not supported")
    raise ParseError(f"unexpected token {node!r}")


def parse(text: str) -> SExpr:
    try:
        tree = sexpdata.loads(text, nil=None, true=None, false=None)
    except Exception as exc:  # sexpdata raises several exception types
        raise ParseError(str(exc)) from exc
    return _convert(tree)


def parse_many(text: str) -> list[SExpr]:
    try:
        trees = sexpdata.parse(text, nil=None, true=None, false=None)
    except Exception as exc:
        raise ParseError(str(exc)) from exc
    return [_convert(t) for t in trees]


def dumps(node: SExpr) -> str:
    if isinstance(node, list):
        return "(" + " ".join(dumps(x) for x in node) + ")"
    return node


def expect_list(node: SExpr, head: str, arity: int | None = None) -> list:
    if not isinstance(node, list) or not node or node[0] != head:
        raise ParseError(f"expected ({head} ...), got {dumps(node)}")
    if arity is not None and len(node) - 1 != arity:
        raise ParseError(f"({head} ...) takes {arity} arguments, got {len(node) - 1}")
    return node[1:]
