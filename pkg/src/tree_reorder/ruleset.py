"""The packaged English -> Hindi rule set and its worked-example fixtures."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from io import StringIO
from typing import Iterable, Sequence

import pandas as pd

from tree_reorder.dsl import ReorderRule, parse_ruleset
from tree_reorder.engine import EngineConfig, apply_rules, select_rules
from tree_reorder.tags import BUILTIN_TAGS, TagRegistry
from tree_reorder.treebank import ParseNode, flatten, parse_ptb

log = logging.getLogger(__name__)

RULES_RESOURCE = "en_hi.rules"
FIXTURES_RESOURCE = "en_hi_fixtures.json"
NUMBERED_RULE_IDS = tuple(f"eq{i}" for i in range(1, 19))
BASE_RULE_IDS = ("base1",)
# verb-final movement plus postpositions only
LIMITED_RULE_IDS = ("eq8", "eq13", "base1")
LIMITED = "limited"


def _data(name: str) -> str:
    return resources.files("tree_reorder").joinpath("data", name).read_text(encoding="utf-8")


def builtin_rules_text() -> str:
    return _data(RULES_RESOURCE)


@lru_cache(maxsize=None)
def _builtin(tags: TagRegistry) -> tuple[ReorderRule, ...]:
    rules = parse_ruleset(builtin_rules_text(), tags)
    ids = tuple(r.id for r in rules)
    assert ids == NUMBERED_RULE_IDS + BASE_RULE_IDS, f"builtin rule ids out of order: {ids}"
    return tuple(rules)


def builtin_rules(subset: Iterable[str] | None = None, tags: TagRegistry = BUILTIN_TAGS) -> list[ReorderRule]:
    """The 18 numbered rules (eq1..eq18) followed by base1, optionally restricted by id."""
    return select_rules(_builtin(tags), subset)


def limited_rules(tags: TagRegistry = BUILTIN_TAGS) -> list[ReorderRule]:
    return builtin_rules(LIMITED_RULE_IDS, tags)


@dataclass(frozen=True)
class FixtureCase:
    rule_id: str
    english: str
    tree: str
    partial: str
    full: str
    full_exact: bool
    printed_partial: str
    printed_full: str
    hindi: str
    notes: str = ""

    @property
    def partial_rule_ids(self) -> frozenset[str]:
        """Rules behind the ``partial`` line: the named rule, or the limited subset."""
        if self.rule_id == LIMITED:
            return frozenset(LIMITED_RULE_IDS)
        return frozenset({self.rule_id})

    def parsed(self) -> ParseNode:
        return parse_ptb(self.tree)

    @property
    def tokens(self) -> list[str]:
        return flatten(self.parsed())


def fixture_frame() -> pd.DataFrame:
    df = pd.read_json(StringIO(_data(FIXTURES_RESOURCE)), orient="records", dtype=False)
    return df.fillna({"notes": ""})


def fixtures() -> list[FixtureCase]:
    return [FixtureCase(**row) for row in fixture_frame().to_dict(orient="records")]


def normalize(tokens: str | Sequence[str]) -> list[str]:
    if isinstance(tokens, str):
        tokens = tokens.split()
    return [t.lower() for t in tokens]


def first_divergence(expected: str | Sequence[str], got: str | Sequence[str]) -> int | None:
    """Index of the first differing token (case-insensitive), or None when equal."""
    a, b = normalize(expected), normalize(got)
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return i
    return None if len(a) == len(b) else min(len(a), len(b))


def reorder_fixture(case: FixtureCase, rules: Sequence[ReorderRule], config: EngineConfig) -> list[str]:
    out, _ = apply_rules(case.parsed(), rules, config)
    return flatten(out)


def check_fixtures(
    cases: Sequence[FixtureCase] | None = None,
    rules: Sequence[ReorderRule] | None = None,
    fixpoint: bool = True,
) -> pd.DataFrame:
    """Partial (one rule) and full (whole set) results for every fixture.

    ``*_ok`` compare against the stored expectations; ``*_printed_at`` give the
    first token where the output leaves the printed example, if anywhere.
    """
    cases = fixtures() if cases is None else cases
    rules = builtin_rules() if rules is None else rules
    full_cfg = EngineConfig(fixpoint=fixpoint)
    rows = []
    for case in cases:
        partial = reorder_fixture(case, rules, EngineConfig(enabled_rule_ids=case.partial_rule_ids))
        full = reorder_fixture(case, rules, full_cfg)
        rows.append(
            {
                "rule_id": case.rule_id,
                "partial_ok": first_divergence(case.partial, partial) is None,
                "full_ok": first_divergence(case.full, full) is None,
                "full_exact": case.full_exact,
                "partial_printed_at": first_divergence(case.printed_partial, partial),
                "full_printed_at": first_divergence(case.printed_full, full),
                "partial_output": " ".join(partial),
                "full_output": " ".join(full),
            }
        )
    df = pd.DataFrame(rows)
    if not df.empty:
        log.info("fixtures: %d partial ok, %d full ok of %d", df.partial_ok.sum(), df.full_ok.sum(), len(df))
    return df
