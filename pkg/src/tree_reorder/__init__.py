"""Syntactic source-side reordering for phrase-based machine translation."""
from tree_reorder.dsl import ReorderRule, parse_rule, parse_ruleset, render_rule
from tree_reorder.engine import EngineConfig, RuleTrace, apply_rules, reorder_sentence, run_corpus
from tree_reorder.matching import Binding, match_children, rewrite
from tree_reorder.ruleset import builtin_rules, fixtures
from tree_reorder.tags import BUILTIN_TAGS, class_matches, register_class
from tree_reorder.treebank import ParseNode, flatten, parse_ptb, render_ptb

__all__ = [
    "BUILTIN_TAGS",
    "Binding",
    "EngineConfig",
    "ParseNode",
    "ReorderRule",
    "RuleTrace",
    "apply_rules",
    "builtin_rules",
    "class_matches",
    "fixtures",
    "flatten",
    "match_children",
    "parse_ptb",
    "parse_rule",
    "parse_ruleset",
    "register_class",
    "render_ptb",
    "render_rule",
    "reorder_sentence",
    "rewrite",
    "run_corpus",
]


def main() -> None:
    from tree_reorder.cli import main as cli_main

    raise SystemExit(cli_main())
