"""Tag classes: named groups of Penn labels used as pattern symbols in rules."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from tree_reorder.errors import DuplicateClass, TagError, UnknownClass

log = logging.getLogger(__name__)

CLASS_NAME = re.compile(r"[A-Za-z_$]+")
_TAG_LINE = re.compile(r"^\s*([A-Za-z_$]+)\s*=\s*(.*?)\s*$")
# '#' is also a Penn label, so only whitespace-led '#' starts a comment
_COMMENT = re.compile(r"(^|\s)#.*$")


@dataclass(frozen=True, slots=True)
class TagClass:
    """A named label set. An empty member set accepts any label.

    ``sequence`` classes bind a run of one or more children rather than a
    single child (dcP and OP).
    """

    name: str
    members: frozenset[str]
    sequence: bool = False

    def matches(self, label: str) -> bool:
        return not self.members or label in self.members


class TagRegistry:
    """Immutable name -> TagClass mapping. ``register`` returns a new registry."""

    def __init__(self, classes: Iterable[TagClass] = ()):
        table: dict[str, TagClass] = {}
        for cls in classes:
            if cls.name in table:
                raise DuplicateClass(f"tag class {cls.name!r} defined twice")
            table[cls.name] = cls
        self._classes: dict[str, TagClass] = table

    def __contains__(self, name: object) -> bool:
        return name in self._classes

    def __iter__(self):
        return iter(self._classes.values())

    def __len__(self) -> int:
        return len(self._classes)

    def __repr__(self) -> str:
        return f"TagRegistry({sorted(self._classes)})"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._classes)

    def get(self, name: str) -> TagClass:
        try:
            return self._classes[name]
        except KeyError:
            raise UnknownClass(f"unknown tag class {name!r}") from None

    def class_matches(self, name: str, label: str) -> bool:
        return self.get(name).matches(label)

    def register(
        self,
        name: str,
        members: Iterable[str],
        *,
        override: bool = False,
        sequence: bool | None = None,
    ) -> TagRegistry:
        if not CLASS_NAME.fullmatch(name):
            raise TagError(f"invalid tag class name {name!r}: letters, '_' and '$' only")
        if name in self._classes and not override:
            raise DuplicateClass(f"tag class {name!r} is already registered")
        members = frozenset(members)
        for label in members:
            if not label or any(c.isspace() or c in "()" for c in label):
                raise TagError(f"invalid label {label!r} in tag class {name!r}")
        if sequence is None:
            sequence = name in self._classes and self._classes[name].sequence
        table = dict(self._classes)
        table[name] = TagClass(name, members, sequence)
        return TagRegistry(table.values())


_ADVP, _NP, _PP = "ADVP", "NP", "PP"

BUILTIN_TAGS = TagRegistry(
    [
        TagClass("dcP", frozenset(), sequence=True),
        TagClass("pp", frozenset({_PP})),
        TagClass("whP", frozenset({"WHNP", "WHADVP", "WHADJP", "WHPP"})),
        TagClass("vp", frozenset({"VP"})),
        TagClass("sbar", frozenset({"SBAR"})),
        TagClass("np", frozenset({_NP})),
        TagClass("vpw", frozenset({"VBN", "VBP", "VB", "VBG", "MD", "VBZ", "VBD"})),
        TagClass("prep", frozenset({"IN", "TO", "VBN", "VBG"})),
        TagClass("adv", frozenset({"RB", "RBR", "RBS"})),
        TagClass("adj", frozenset({"JJ", "JJR", "JJS"})),
        TagClass("advP", frozenset({_ADVP})),
        TagClass("punct", frozenset({","})),
        TagClass("adjP", frozenset({"ADJP"})),
        TagClass("OP", frozenset({_ADVP, _NP, _PP}), sequence=True),
    ]
)


def class_matches(name: str, label: str, registry: TagRegistry = BUILTIN_TAGS) -> bool:
    return registry.class_matches(name, label)


def register_class(
    name: str,
    members: Iterable[str],
    registry: TagRegistry = BUILTIN_TAGS,
    override: bool = False,
) -> TagRegistry:
    return registry.register(name, members, override=override)


def parse_tag_text(text: str, registry: TagRegistry = BUILTIN_TAGS) -> TagRegistry:
    """Extend ``registry`` with ``name = LABEL ...`` lines.

    A name already present is overridden; a name defined twice in the same
    text is a DuplicateClass.
    """
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _COMMENT.sub("", raw)
        if not line.strip():
            continue
        m = _TAG_LINE.match(line)
        if m is None:
            raise TagError(f"expected 'name = LABEL ...', got {raw.strip()!r}").at_line(lineno)
        name, labels = m.group(1), m.group(2).split()
        if name in seen:
            raise DuplicateClass(f"tag class {name!r} defined twice").at_line(lineno)
        seen.add(name)
        try:
            registry = registry.register(name, labels, override=True)
        except TagError as e:
            raise e.at_line(lineno)
        log.debug("tag class %s = %s", name, " ".join(sorted(labels)) or "(any)")
    return registry


def load_tag_file(path: str | Path, registry: TagRegistry = BUILTIN_TAGS) -> TagRegistry:
    return parse_tag_text(Path(path).read_text(encoding="utf-8"), registry)
