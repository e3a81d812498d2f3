"""Reordering rule notation.

A rule names the constituent it applies at, a left-hand pattern over that
constituent's children and the order in which the matched pieces are emitted::

    VP(vpw pp1 pp2* : pp2* pp1 vpw)
    NP(np1 PP[prep NP[np2 sbar]] : np2 prep np1 sbar)

Pattern elements are tag-class names with an optional numeric index and an
optional quantifier (``?``, ``*``, ``+``). ``X[ ... ]`` matches one child
accepted by ``X`` whose own children match the inner pattern; the wrapper
itself is dissolved by the rewrite. Wrapper names that are not tag classes
are read as literal Penn labels.

A rule document holds one rule per line, ``#`` comments, blank lines and
optional ``@id: name`` lines naming the rule that follows. Document order is
precedence order.
"""
from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass, field, replace
from typing import Iterator, NamedTuple

import pyparsing as pp

from tree_reorder.errors import (
    DroppedLhsElement,
    DuplicateLhsElement,
    DuplicateRhsReference,
    DuplicateRuleId,
    RuleError,
    RuleSyntaxError,
    UnknownClass,
    UnresolvedRhsReference,
)
from tree_reorder.tags import BUILTIN_TAGS, TagRegistry

log = logging.getLogger(__name__)

_ELEMENT = re.compile(r"([A-Za-z_$]+)(\d+)?([?*+])?")
_WRAPPER = re.compile(r"([A-Za-z_$]+)(\d+)?\s*\[")
_LITERAL_LABEL = re.compile(r"[A-Z][A-Z$]*")
_ANNOTATION = re.compile(r"^\s*@id\s*:\s*(\S+)\s*$")
_RULE_ID = re.compile(r"[A-Za-z0-9_.\-]+")


class Quantifier(enum.StrEnum):
    ONE = ""
    OPTIONAL = "?"
    STAR = "*"
    PLUS = "+"


class SlotRef(NamedTuple):
    name: str
    index: int | None = None

    def __str__(self) -> str:
        return self.name if self.index is None else f"{self.name}{self.index}"


@dataclass(frozen=True, slots=True)
class PatternElement:
    name: str
    index: int | None = None
    quantifier: Quantifier = Quantifier.ONE
    nested: tuple[PatternElement, ...] | None = None
    literal: bool = False

    @property
    def key(self) -> SlotRef:
        return SlotRef(self.name, self.index)

    @property
    def is_leaf(self) -> bool:
        return self.nested is None

    def leaves(self) -> Iterator[PatternElement]:
        if self.nested is None:
            yield self
        else:
            for el in self.nested:
                yield from el.leaves()

    def render(self) -> str:
        head = str(self.key)
        if self.nested is not None:
            return f"{head}[{' '.join(el.render() for el in self.nested)}]"
        return head + self.quantifier


@dataclass(frozen=True)
class ReorderRule:
    id: str
    category: str
    lhs: tuple[PatternElement, ...]
    rhs: tuple[SlotRef, ...]
    priority: int = 1
    source_text: str = ""
    tags: TagRegistry = field(default=BUILTIN_TAGS, compare=False, repr=False)

    def leaves(self) -> list[PatternElement]:
        return [leaf for el in self.lhs for leaf in el.leaves()]

    def leaf(self, ref: SlotRef) -> PatternElement:
        for el in self.leaves():
            if el.key == ref:
                return el
        raise UnresolvedRhsReference(f"{ref} does not name a left-hand element")

    def __str__(self) -> str:
        return render_rule(self)


# ========= grammar =========
def _element_action(s, loc, toks):
    name, index, quant = _ELEMENT.fullmatch(toks[0]).groups()
    return PatternElement(name, int(index) if index else None, Quantifier(quant or ""))


def _wrapper_action(s, loc, toks):
    name, index = _WRAPPER.fullmatch(toks[0]).groups()
    return PatternElement(name, int(index) if index else None, nested=tuple(toks[1]))


def _ref_action(s, loc, toks):
    name, index, quant = _ELEMENT.fullmatch(toks[0]).groups()
    return [(SlotRef(name, int(index) if index else None), quant, loc)]


def _build_rule_parser() -> pp.ParserElement:
    category = pp.Regex(r"[^\s()\[\]:#@]+")("category")
    element = pp.Forward()
    leaf = pp.Regex(_ELEMENT.pattern).set_parse_action(_element_action)
    wrapper = (
        pp.Regex(_WRAPPER.pattern)
        + pp.Group(pp.OneOrMore(element))
        + pp.Suppress("]")
    ).set_parse_action(_wrapper_action)
    element <<= wrapper | leaf
    ref = pp.Regex(_ELEMENT.pattern).set_parse_action(_ref_action)
    rule = (
        category
        + pp.Suppress("(")
        + pp.Group(pp.OneOrMore(element))("lhs")
        + pp.Suppress(":")
        + pp.Group(pp.OneOrMore(ref))("rhs")
        + pp.Suppress(")")
    )
    rule.ignore(pp.python_style_comment)
    return rule


_RULE_PARSER = _build_rule_parser()


# ========= validation =========
def _resolve(el: PatternElement, tags: TagRegistry) -> PatternElement:
    if el.nested is None:
        tags.get(el.name)
        return el
    nested = tuple(_resolve(sub, tags) for sub in el.nested)
    if el.name in tags:
        return replace(el, nested=nested)
    if _LITERAL_LABEL.fullmatch(el.name) and el.index is None:
        return replace(el, nested=nested, literal=True)
    raise UnknownClass(f"unknown tag class {el.name!r}")


def parse_rule(
    text: str,
    *,
    rule_id: str = "r1",
    priority: int = 1,
    tags: TagRegistry = BUILTIN_TAGS,
) -> ReorderRule:
    try:
        res = _RULE_PARSER.parse_string(text, parse_all=True)
    except pp.ParseException as e:
        raise RuleSyntaxError(f"cannot parse rule: {e.msg}", e.loc) from None

    lhs = tuple(_resolve(el, tags) for el in res["lhs"])
    leaves: dict[SlotRef, PatternElement] = {}
    for el in (leaf for top in lhs for leaf in top.leaves()):
        if el.key in leaves:
            raise DuplicateLhsElement(f"left-hand element {el.key} appears more than once")
        leaves[el.key] = el

    rhs: list[SlotRef] = []
    for ref, quant, loc in res["rhs"]:
        if ref not in leaves:
            raise UnresolvedRhsReference(f"right-hand reference {ref} does not name a left-hand element")
        if ref in rhs:
            raise DuplicateRhsReference(f"right-hand reference {ref} appears more than once")
        if quant and quant != leaves[ref].quantifier:
            raise RuleSyntaxError(
                f"quantifier {quant!r} on {ref} differs from its left-hand "
                f"{leaves[ref].quantifier or 'none'!r}",
                loc,
            )
        rhs.append(ref)
    dropped = [str(k) for k in leaves if k not in rhs]
    if dropped:
        raise DroppedLhsElement(f"left-hand elements missing from the right-hand side: {', '.join(dropped)}")

    return ReorderRule(
        id=rule_id,
        category=res["category"],
        lhs=lhs,
        rhs=tuple(rhs),
        priority=priority,
        source_text=text.split("#", 1)[0].strip(),
        tags=tags,
    )


def parse_ruleset(text: str, tags: TagRegistry = BUILTIN_TAGS) -> list[ReorderRule]:
    rules: list[ReorderRule] = []
    seen: dict[str, int] = {}
    pending: tuple[str, int] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _ANNOTATION.match(raw)
        if m:
            if pending is not None:
                raise RuleSyntaxError(f"@id: {pending[0]} is not followed by a rule").at_line(pending[1])
            if not _RULE_ID.fullmatch(m.group(1)):
                raise RuleSyntaxError(f"invalid rule id {m.group(1)!r}").at_line(lineno)
            pending = (m.group(1), lineno)
            continue
        priority = len(rules) + 1
        rule_id = pending[0] if pending else f"r{priority}"
        pending = None
        if rule_id in seen:
            raise DuplicateRuleId(f"rule id {rule_id!r} already used on line {seen[rule_id]}").at_line(lineno)
        try:
            rule = parse_rule(stripped, rule_id=rule_id, priority=priority, tags=tags)
        except (RuleError, UnknownClass) as e:
            raise e.at_line(lineno)
        seen[rule_id] = lineno
        rules.append(rule)
    if pending is not None:
        raise RuleSyntaxError(f"@id: {pending[0]} is not followed by a rule").at_line(pending[1])
    log.debug("parsed %d rules", len(rules))
    return rules


def render_rule(rule: ReorderRule) -> str:
    lhs = " ".join(el.render() for el in rule.lhs)
    rhs = " ".join(str(ref) + rule.leaf(ref).quantifier for ref in rule.rhs)
    return f"{rule.category}({lhs} : {rhs})"


def render_ruleset(rules: list[ReorderRule]) -> str:
    lines = []
    for rule in sorted(rules, key=lambda r: r.priority):
        lines.append(f"@id: {rule.id}")
        lines.append(render_rule(rule))
    return "\n".join(lines) + ("\n" if lines else "")
