"""Reading and writing Penn Treebank bracketed trees, one tree per line."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from tree_reorder.errors import EmptyTree, LabelMissing, UnbalancedBrackets

log = logging.getLogger(__name__)

WRAPPER_LABELS = frozenset({"ROOT", "TOP"})

ESCAPES = {
    "-LRB-": "(",
    "-RRB-": ")",
    "-LCB-": "{",
    "-RCB-": "}",
    "-LSB-": "[",
    "-RSB-": "]",
}

_TOKEN = re.compile(r"\(|\)|[^()\s]+")
_SALVAGE = re.compile(r"\(\s*[^()\s]+\s+([^()\s]+)\s*\)")


@dataclass(frozen=True, slots=True)
class ParseNode:
    label: str
    children: tuple[ParseNode, ...] = ()
    token: str | None = None

    def __post_init__(self):
        if not self.label or any(c.isspace() or c in "()" for c in self.label):
            raise ValueError(f"invalid label {self.label!r}")
        if (self.token is None) == (not self.children):
            raise ValueError(f"node {self.label} must be either a leaf with a token or have children")

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    def child_labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.children)

    def with_children(self, children: Iterable[ParseNode]) -> ParseNode:
        return ParseNode(self.label, tuple(children))

    def at(self, path: Iterable[int]) -> ParseNode:
        node = self
        for i in path:
            node = node.children[i]
        return node

    def replace_at(self, path: tuple[int, ...], new: ParseNode) -> ParseNode:
        if not path:
            return new
        head, rest = path[0], path[1:]
        children = list(self.children)
        children[head] = children[head].replace_at(rest, new)
        return self.with_children(children)

    def __str__(self) -> str:
        return render_ptb(self)


def leaf(label: str, token: str) -> ParseNode:
    return ParseNode(label, (), token)


def node(label: str, *children: ParseNode) -> ParseNode:
    return ParseNode(label, tuple(children))


def _lex(line: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start()) for m in _TOKEN.finditer(line)]


class _Reader:
    def __init__(self, line: str):
        self.tokens = _lex(line)
        self.i = 0
        self.end = len(line)

    def peek(self) -> tuple[str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> tuple[str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def read(self, top: bool = False) -> ParseNode:
        _, open_pos = self.take()
        nxt = self.peek()
        if nxt is None:
            raise UnbalancedBrackets("missing ')'", open_pos)
        label = None
        if nxt[0] not in "()":
            label, _ = self.take()
            nxt = self.peek()
            if nxt is not None and nxt[0] not in "()":
                word, _ = self.take()
                self._close(open_pos)
                return leaf(label, word)

        children = []
        while True:
            nxt = self.peek()
            if nxt is None:
                raise UnbalancedBrackets("missing ')'", open_pos)
            value, pos = nxt
            if value == ")":
                self.take()
                break
            if value != "(":
                raise LabelMissing(f"bare token {value!r} where a bracketed node was expected", pos)
            children.append(self.read())

        if label is None:
            if not children:
                raise EmptyTree(f"empty brackets at offset {open_pos}")
            if top and len(children) == 1:
                return children[0]
            raise LabelMissing("internal node without a label", open_pos)
        if not children:
            raise EmptyTree(f"node {label} has no children (at offset {open_pos})")
        if top and label in WRAPPER_LABELS and len(children) == 1 and not children[0].is_leaf:
            return children[0]
        return ParseNode(label, tuple(children))

    def _close(self, open_pos: int) -> None:
        nxt = self.peek()
        if nxt is None:
            raise UnbalancedBrackets("missing ')'", open_pos)
        if nxt[0] != ")":
            raise LabelMissing(f"unexpected {nxt[0]!r} after a leaf token", nxt[1])
        self.take()


def parse_ptb(line: str) -> ParseNode:
    reader = _Reader(line)
    first = reader.peek()
    if first is None:
        raise EmptyTree("empty input")
    if first[0] != "(":
        if first[0] == ")":
            raise UnbalancedBrackets("unexpected ')'", first[1])
        raise UnbalancedBrackets("tree must start with '('", first[1])
    tree = reader.read(top=True)
    rest = reader.peek()
    if rest is not None:
        raise UnbalancedBrackets(f"unexpected {rest[0]!r} after the tree", rest[1])
    return tree


def render_ptb(tree: ParseNode) -> str:
    if tree.is_leaf:
        return f"({tree.label} {tree.token})"
    return f"({tree.label} {' '.join(render_ptb(c) for c in tree.children)})"


def flatten(tree: ParseNode, unescape: bool = False) -> list[str]:
    out = []
    stack = [tree]
    while stack:
        n = stack.pop()
        if n.is_leaf:
            out.append(ESCAPES.get(n.token, n.token) if unescape else n.token)
        else:
            stack.extend(reversed(n.children))
    return out


def salvage_tokens(line: str) -> list[str]:
    """Best-effort token list for a line that failed to parse."""
    words = _SALVAGE.findall(line)
    if words:
        return words
    return re.sub(r"[()]", " ", line).split()


class TreebankReader:
    """Iterates (line number, tree) pairs, skipping blank lines."""

    def __init__(self, lines: Iterable[str]):
        self.lines = lines
        self.blank_lines = 0

    def __iter__(self) -> Iterator[tuple[int, ParseNode]]:
        for lineno, line in enumerate(self.lines, start=1):
            if not line.strip():
                self.blank_lines += 1
                log.warning("line %d: blank line skipped", lineno)
                continue
            yield lineno, parse_ptb(line)
