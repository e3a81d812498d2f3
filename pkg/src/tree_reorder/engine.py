"""Drives rule application over trees, sentences and corpora."""
from __future__ import annotations

import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Iterable, Iterator, Mapping, Sequence

import pandas as pd

from tree_reorder.dsl import ReorderRule
from tree_reorder.errors import (
    ConfigError,
    CorpusIOError,
    EngineError,
    IterationLimitExceeded,
    ReorderError,
    TreebankError,
    UnknownRuleId,
)
from tree_reorder.matching import match_children, rewrite
from tree_reorder.treebank import ParseNode, flatten, parse_ptb, salvage_tokens

log = logging.getLogger(__name__)

DEFAULT_RULES = os.getenv("REORDER_RULES", "builtin")
DEFAULT_TAGS = os.getenv("REORDER_TAGS") or None
DEFAULT_MAX_ITERATIONS = 10
DEFAULT_WORKERS = 1

_TRUE = {"1", "true", "yes", "on"}


@dataclass(frozen=True)
class EngineConfig:
    fixpoint: bool = False
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    enabled_rule_ids: frozenset[str] | None = None
    trace: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None, **overrides) -> EngineConfig:
        env = os.environ if environ is None else environ
        cfg = {k: v for k, v in overrides.items() if v is not None}
        cfg.setdefault("fixpoint", env.get("REORDER_FIXPOINT", "0").strip().lower() in _TRUE)
        if "max_iterations" not in cfg:
            cfg["max_iterations"] = _env_int(env, "REORDER_MAX_ITERATIONS", DEFAULT_MAX_ITERATIONS)
        try:
            return cls(**cfg)
        except ValueError as e:
            raise ConfigError(str(e)) from None


def _env_int(env: Mapping[str, str], name: str, default: int) -> int:
    raw = env.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{name} must be >= 1, got {value}")
    return value


def workers_from_env(environ: Mapping[str, str] | None = None) -> int:
    return _env_int(os.environ if environ is None else environ, "REORDER_WORKERS", DEFAULT_WORKERS)


@dataclass(frozen=True)
class TraceStep:
    path: tuple[int, ...]
    rule_id: str
    before: tuple[str, ...]
    after: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.rule_id} at {list(self.path)}: {' '.join(self.before)} -> {' '.join(self.after)}"


@dataclass
class RuleTrace:
    steps: list[TraceStep] = field(default_factory=list)
    input_tokens: list[str] = field(default_factory=list)
    output_tokens: list[str] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "step": i,
                "path": " ".join(map(str, s.path)),
                "rule_id": s.rule_id,
                "before": " ".join(s.before),
                "after": " ".join(s.after),
            }
            for i, s in enumerate(self.steps, start=1)
        ]
        return pd.DataFrame(rows, columns=["step", "path", "rule_id", "before", "after"])

    def format(self) -> str:
        lines = [f"input:  {' '.join(self.input_tokens)}"]
        lines += [f"  {s}" for s in self.steps]
        lines.append(f"output: {' '.join(self.output_tokens)}")
        return "\n".join(lines)


def select_rules(rules: Sequence[ReorderRule], ids: Iterable[str] | None) -> list[ReorderRule]:
    if ids is None:
        return list(rules)
    wanted = set(ids)
    known = {r.id for r in rules}
    unknown = sorted(wanted - known)
    if unknown:
        raise UnknownRuleId(f"unknown rule id(s): {', '.join(unknown)}")
    return [r for r in rules if r.id in wanted]


def _by_category(rules: Sequence[ReorderRule]) -> dict[str, list[ReorderRule]]:
    table: dict[str, list[ReorderRule]] = {}
    for rule in sorted(rules, key=lambda r: r.priority):
        table.setdefault(rule.category, []).append(rule)
    return table


def apply_rules(
    tree: ParseNode,
    rules: Sequence[ReorderRule],
    config: EngineConfig = EngineConfig(),
) -> tuple[ParseNode, RuleTrace]:
    """Pre-order rewrite: the first matching rule fires at a node, then its new children are visited."""
    table = _by_category(select_rules(rules, config.enabled_rule_ids))
    steps: list[TraceStep] = []

    def visit(node: ParseNode, path: tuple[int, ...]) -> ParseNode:
        if node.is_leaf:
            return node
        candidates = table.get(node.label, ())
        fired = 0
        while candidates:
            for rule in candidates:
                binding = match_children(rule, node)
                if binding is not None:
                    break
            else:
                break
            if fired == config.max_iterations:
                raise IterationLimitExceeded(path, config.max_iterations)
            children = rewrite(rule, binding)
            if config.trace:
                steps.append(
                    TraceStep(path, rule.id, node.child_labels(), tuple(c.label for c in children))
                )
            log.debug("%s fired at %s", rule.id, list(path))
            unchanged = children == node.children
            node = node.with_children(children)
            fired += 1
            if not config.fixpoint or unchanged:
                break
        return node.with_children(visit(c, path + (i,)) for i, c in enumerate(node.children))

    out = visit(tree, ())
    return out, RuleTrace(steps, flatten(tree), flatten(out))


def replay(tree: ParseNode, steps: Iterable[TraceStep], rules: Sequence[ReorderRule]) -> ParseNode:
    """Re-apply recorded steps by path and rule id, checking the recorded labels."""
    by_id = {r.id: r for r in rules}
    for n, step in enumerate(steps, start=1):
        rule = by_id.get(step.rule_id)
        if rule is None:
            raise UnknownRuleId(f"step {n}: unknown rule id {step.rule_id!r}")
        try:
            target = tree.at(step.path)
        except IndexError:
            raise EngineError(f"step {n}: path {list(step.path)} does not exist") from None
        if target.is_leaf or target.child_labels() != step.before:
            raise EngineError(f"step {n}: node at {list(step.path)} does not have the recorded children")
        binding = match_children(rule, target)
        if binding is None:
            raise EngineError(f"step {n}: {rule.id} no longer matches at {list(step.path)}")
        children = rewrite(rule, binding)
        if tuple(c.label for c in children) != step.after:
            raise EngineError(f"step {n}: {rule.id} produced different children at {list(step.path)}")
        tree = tree.replace_at(step.path, target.with_children(children))
    return tree


def reorder_sentence(
    line: str,
    rules: Sequence[ReorderRule],
    config: EngineConfig = EngineConfig(),
    unescape: bool = False,
) -> str:
    out, _ = apply_rules(parse_ptb(line), rules, config)
    return " ".join(flatten(out, unescape=unescape))


# ========= corpus =========
@dataclass
class CorpusSummary:
    lines: int = 0
    blank_lines: int = 0
    parse_failures: int = 0
    engine_failures: int = 0
    firings: Counter = field(default_factory=Counter)

    @property
    def failures(self) -> int:
        return self.parse_failures + self.engine_failures

    def merge(self, other: CorpusSummary) -> CorpusSummary:
        return CorpusSummary(
            self.lines + other.lines,
            self.blank_lines + other.blank_lines,
            self.parse_failures + other.parse_failures,
            self.engine_failures + other.engine_failures,
            self.firings + other.firings,
        )

    def absorb(self, other: CorpusSummary) -> None:
        self.lines += other.lines
        self.blank_lines += other.blank_lines
        self.parse_failures += other.parse_failures
        self.engine_failures += other.engine_failures
        self.firings.update(other.firings)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            sorted(self.firings.items()), columns=["rule_id", "firings"]
        )

    def format(self) -> str:
        fired = ", ".join(f"{k}={v}" for k, v in sorted(self.firings.items())) or "none"
        return (
            f"lines={self.lines} blank={self.blank_lines} "
            f"parse_failures={self.parse_failures} engine_failures={self.engine_failures} "
            f"firings: {fired}"
        )


@dataclass
class LineResult:
    lineno: int
    output: str
    summary: CorpusSummary
    error: str | None = None


def process_line(
    item: tuple[int, str],
    rules: Sequence[ReorderRule],
    config: EngineConfig,
    unescape: bool = False,
) -> LineResult:
    """One corpus line. Failing lines pass their original tokens through."""
    lineno, line = item
    summary = CorpusSummary(lines=1)
    if not line.strip():
        summary.blank_lines = 1
        return LineResult(lineno, "", summary)
    try:
        tree = parse_ptb(line)
        out, trace = apply_rules(tree, rules, config)
    except TreebankError as e:
        summary.parse_failures = 1
        return LineResult(lineno, " ".join(salvage_tokens(line)), summary, str(e))
    except ReorderError as e:
        summary.engine_failures = 1
        return LineResult(lineno, " ".join(salvage_tokens(line)), summary, str(e))
    summary.firings.update(s.rule_id for s in trace.steps)
    return LineResult(lineno, " ".join(flatten(out, unescape=unescape)), summary)


def _numbered(lines: Iterable[str]) -> Iterator[tuple[int, str]]:
    it = iter(lines)
    lineno = 0
    while True:
        lineno += 1
        try:
            line = next(it)
        except StopIteration:
            return
        except (OSError, UnicodeDecodeError) as e:
            raise CorpusIOError(str(e), lineno) from e
        yield lineno, line.rstrip("\r\n")


def iter_corpus(
    lines: Iterable[str],
    rules: Sequence[ReorderRule],
    config: EngineConfig = EngineConfig(),
    *,
    summary: CorpusSummary | None = None,
    workers: int = DEFAULT_WORKERS,
    unescape: bool = False,
) -> Iterator[str]:
    """Yields one output line per input line, in input order.

    Counters are merged into ``summary`` as lines complete.
    """
    summary = summary if summary is not None else CorpusSummary()
    # the rule order is fixed once here so workers never re-sort
    rules = select_rules(rules, config.enabled_rule_ids)
    config = EngineConfig(config.fixpoint, config.max_iterations, None, trace=True)
    work = partial(process_line, rules=rules, config=config, unescape=unescape)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(work, _numbered(lines), chunksize=64)
            yield from _collect(results, summary)
    else:
        yield from _collect(map(work, _numbered(lines)), summary)


def _collect(results: Iterable[LineResult], summary: CorpusSummary) -> Iterator[str]:
    for res in results:
        if res.error is not None:
            log.warning("line %d: %s; passing original tokens through", res.lineno, res.error)
        summary.absorb(res.summary)
        yield res.output


def run_corpus(
    lines: Iterable[str],
    rules: Sequence[ReorderRule],
    config: EngineConfig = EngineConfig(),
    *,
    workers: int = DEFAULT_WORKERS,
    unescape: bool = False,
) -> tuple[list[str], CorpusSummary]:
    summary = CorpusSummary()
    out = list(iter_corpus(lines, rules, config, summary=summary, workers=workers, unescape=unescape))
    log.info("reordered %s", summary.format())
    return out, summary
