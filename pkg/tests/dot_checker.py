"""Minimal DOT grammar parser used to validate emitted graphs in tests.

Supports the subset the exporters produce: ``digraph NAME { stmts }`` with
node statements, edge statements and bracketed attribute lists, quoted or
bare identifiers.  Raises ValueError on anything malformed and returns the
node ids and edges it saw.
"""

from __future__ import annotations

import re

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<quoted>"(?:[^"\\]|\\.)*")
      | (?P<symbol>->|[{}\[\];=,])
      | (?P<bare>[A-Za-z0-9_.]+)
    )""",
    re.VERBOSE,
)


def tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            if text[pos:].strip():
                raise ValueError(f"unexpected character at {pos}: {text[pos:pos+20]!r}")
            break
        pos = match.end()
        token = match.group("quoted") or match.group("symbol") or match.group("bare")
        tokens.append(token)
    return tokens


class DotGraph:
    def __init__(self):
        self.nodes: dict[str, dict[str, str]] = {}
        self.edges: list[tuple[str, str, dict[str, str]]] = []


def parse_dot(text: str) -> DotGraph:
    tokens = tokenize(text)
    cursor = 0

    def peek():
        return tokens[cursor] if cursor < len(tokens) else None

    def take(expected=None):
        nonlocal cursor
        if cursor >= len(tokens):
            raise ValueError("unexpected end of input")
        token = tokens[cursor]
        if expected is not None and token != expected:
            raise ValueError(f"expected {expected!r}, got {token!r}")
        cursor += 1
        return token

    def attr_list() -> dict[str, str]:
        attrs: dict[str, str] = {}
        if peek() != "[":
            return attrs
        take("[")
        while peek() != "]":
            key = take()
            take("=")
            attrs[key] = take()
            if peek() == ",":
                take(",")
        take("]")
        return attrs

    graph = DotGraph()
    take("digraph")
    if peek() != "{":
        take()  # optional graph name
    take("{")
    while peek() != "}":
        first = take()
        if peek() == "=":  # graph-level attribute like rankdir=BT
            take("=")
            take()
            take(";")
            continue
        if peek() == "->":
            take("->")
            target = take()
            attrs = attr_list()
            graph.edges.append((first, target, attrs))
        else:
            graph.nodes[first] = attr_list()
        take(";")
    take("}")
    if cursor != len(tokens):
        raise ValueError(f"trailing tokens: {tokens[cursor:]}")
    for source, target, _ in graph.edges:
        if source not in graph.nodes or target not in graph.nodes:
            raise ValueError(f"edge references undeclared node: {source} -> {target}")
    return graph
