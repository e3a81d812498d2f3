"""Anchored matching of a rule's left-hand pattern against a child sequence."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from tree_reorder.dsl import PatternElement, Quantifier, ReorderRule, SlotRef
from tree_reorder.errors import CategoryMismatch
from tree_reorder.tags import TagRegistry
from tree_reorder.treebank import ParseNode

_BOUNDS: dict[Quantifier, tuple[int, int | None]] = {
    Quantifier.ONE: (1, 1),
    Quantifier.OPTIONAL: (0, 1),
    Quantifier.STAR: (0, None),
    Quantifier.PLUS: (1, None),
}


@dataclass(frozen=True)
class Binding:
    slots: dict[SlotRef, tuple[ParseNode, ...]]
    consumed_wrappers: tuple[ParseNode, ...] = field(default=())

    def lengths(self, rule: ReorderRule) -> tuple[int, ...]:
        """Slot lengths in left-hand leaf order."""
        return tuple(len(self.slots[el.key]) for el in rule.leaves())


def bounds(el: PatternElement, tags: TagRegistry) -> tuple[int, int | None]:
    lo, hi = _BOUNDS[el.quantifier]
    if el.nested is None and tags.get(el.name).sequence:
        # dcP / OP bind a run: `x` is one-or-more, `x?` zero-or-more
        hi = None
    return lo, hi


def accepts(el: PatternElement, node: ParseNode, tags: TagRegistry) -> bool:
    if el.literal:
        return node.label == el.name
    return tags.class_matches(el.name, node.label)


class _Matcher:
    def __init__(self, tags: TagRegistry):
        self.tags = tags

    def match(
        self, elements: Sequence[PatternElement], children: Sequence[ParseNode]
    ) -> tuple[dict[SlotRef, tuple[ParseNode, ...]], list[ParseNode]] | None:
        failed: set[tuple[int, int]] = set()

        def go(ei: int, ci: int):
            if ei == len(elements):
                return ({}, []) if ci == len(children) else None
            if (ei, ci) in failed:
                return None
            el = elements[ei]
            result = None
            if el.nested is not None:
                if ci < len(children):
                    child = children[ci]
                    if not child.is_leaf and accepts(el, child, self.tags):
                        inner = self.match(el.nested, child.children)
                        if inner is not None:
                            rest = go(ei + 1, ci + 1)
                            if rest is not None:
                                result = (inner[0] | rest[0], [child, *inner[1], *rest[1]])
            else:
                lo, hi = bounds(el, self.tags)
                run = 0
                while (
                    ci + run < len(children)
                    and (hi is None or run < hi)
                    and accepts(el, children[ci + run], self.tags)
                ):
                    run += 1
                # longest first gives the leftmost-longest tiling
                for n in range(run, lo - 1, -1):
                    rest = go(ei + 1, ci + n)
                    if rest is not None:
                        result = ({el.key: tuple(children[ci : ci + n]), **rest[0]}, rest[1])
                        break
            if result is None:
                failed.add((ei, ci))
            return result

        return go(0, 0)


def match_children(rule: ReorderRule, node: ParseNode) -> Binding | None:
    if node.is_leaf or node.label != rule.category:
        raise CategoryMismatch(f"rule {rule.id} applies at {rule.category}, not {node.label}")
    found = _Matcher(rule.tags).match(rule.lhs, node.children)
    if found is None:
        return None
    slots, wrappers = found
    return Binding(slots, tuple(wrappers))


def rewrite(rule: ReorderRule, binding: Binding) -> tuple[ParseNode, ...]:
    return tuple(n for ref in rule.rhs for n in binding.slots[ref])


def apply_rule(rule: ReorderRule, node: ParseNode) -> ParseNode | None:
    """The node with its children rewritten, or None when the rule does not match."""
    if node.is_leaf or node.label != rule.category:
        return None
    binding = match_children(rule, node)
    if binding is None:
        return None
    return node.with_children(rewrite(rule, binding))
