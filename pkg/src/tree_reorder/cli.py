import argparse
import logging
import os
import sys
from contextlib import contextmanager
from pathlib import Path

import pandas as pd

from tree_reorder.dsl import parse_ruleset, render_rule
from tree_reorder.engine import (
    DEFAULT_RULES,
    DEFAULT_TAGS,
    CorpusSummary,
    EngineConfig,
    apply_rules,
    iter_corpus,
    replay,
    workers_from_env,
)
from tree_reorder.errors import ConfigError, CorpusIOError, ReorderError
from tree_reorder.metrics import EvalCorpus, evaluate
from tree_reorder.phrases import (
    DEFAULT_MAX_LEN,
    DEFAULT_MIN_LEN,
    ExtractionMode,
    compare_reports,
    format_comparison,
    phrase_report,
    read_alignments,
)
from tree_reorder.records import read_phrase_record, write_record
from tree_reorder.ruleset import LIMITED, builtin_rules, builtin_rules_text, limited_rules
from tree_reorder.tags import BUILTIN_TAGS, load_tag_file
from tree_reorder.treebank import parse_ptb

log = logging.getLogger(__name__)

EXIT_OK, EXIT_DATA, EXIT_IO = 0, 1, 2
# argparse exits with 2 on usage errors too
EXIT_USAGE = 2

DEFAULT_LOG_LEVEL = os.getenv("REORDER_LOG_LEVEL", "WARNING")


# ========= helpers =========
@contextmanager
def _open_in(path: str):
    if path == "-":
        yield sys.stdin
    else:
        with open(path, encoding="utf-8") as f:
            yield f


@contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as f:
            yield f


def _read_lines(path: str) -> list[str]:
    with _open_in(path) as f:
        return [line.rstrip("\r\n") for line in f]


def _ids(text: str | None) -> frozenset[str] | None:
    if not text:
        return None
    return frozenset(x.strip() for x in text.split(",") if x.strip())


def load_tags(path: str | None):
    return load_tag_file(path) if path else BUILTIN_TAGS


def load_rules(source: str, tags=BUILTIN_TAGS):
    """``builtin``, ``limited``, ``only:ID,...`` (a builtin subset) or a rule file path."""
    if source == "builtin":
        return builtin_rules(tags=tags)
    if source == LIMITED:
        return limited_rules(tags)
    if source.startswith("only:"):
        return builtin_rules(subset=_ids(source[5:]) or (), tags=tags)
    return parse_ruleset(Path(source).read_text(encoding="utf-8"), tags)


def _engine_config(args) -> EngineConfig:
    return EngineConfig.from_env(
        fixpoint=args.fixpoint,
        max_iterations=args.max_iterations,
        enabled_rule_ids=_ids(args.enable),
    )


# ========= commands =========
def cmd_reorder(args) -> int:
    rules = load_rules(args.rules, load_tags(args.tags))
    workers = args.workers if args.workers is not None else workers_from_env()
    summary = CorpusSummary()
    with _open_in(args.input) as src, _open_out(args.output) as out:
        for line in iter_corpus(
            src, rules, _engine_config(args), summary=summary, workers=workers, unescape=args.unescape
        ):
            out.write(line + "\n")
    print(summary.format(), file=sys.stderr)
    if args.record:
        write_record(summary.to_frame(), args.record)
    if args.strict and summary.failures:
        return EXIT_DATA
    return EXIT_OK


def cmd_trace(args) -> int:
    rules = load_rules(args.rules, load_tags(args.tags))
    config = _engine_config(args)
    failed = False
    frames = []
    with _open_in(args.input) as src, _open_out(args.output) as out:
        for lineno, line in enumerate(src, start=1):
            if not line.strip():
                continue
            try:
                tree = parse_ptb(line)
                result, trace = apply_rules(tree, rules, config)
            except ReorderError as e:
                log.warning("line %d: %s", lineno, e)
                failed = True
                continue
            out.write(f"# line {lineno}\n{trace.format()}\n")
            if args.replay:
                ok = replay(tree, trace.steps, rules) == result
                out.write(f"replay: {'OK' if ok else 'MISMATCH'}\n")
                failed |= not ok
            frames.append(trace.to_frame().assign(line=lineno))
    if args.record:
        write_record(pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(), args.record)
    if failed and (args.strict or args.replay):
        return EXIT_DATA
    return EXIT_OK


def cmd_rules_validate(args) -> int:
    tags = load_tags(args.tags)
    if args.path is None:
        rules = parse_ruleset(builtin_rules_text(), tags)
    else:
        rules = load_rules(args.path, tags)
    for r in rules:
        print(f"{r.priority:>3} {r.id:<8} {render_rule(r)}")
    print(f"{len(rules)} rules OK", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    hyp = _read_lines(args.hyp)
    refs = [_read_lines(r) for r in args.ref]
    corpus = EvalCorpus.from_lines(hyp, refs, lowercase=not args.keep_case)
    report = evaluate(corpus, args.max_n, args.nist_max_n, args.smooth)
    print(report.format())
    if args.record:
        write_record(report.to_frame(), args.record)
    return EXIT_OK


def _triple_report(src, tgt, align, args):
    corpus = read_alignments(_read_lines(src), _read_lines(tgt), _read_lines(align))
    return phrase_report(corpus, args.min_len, args.max_len, args.mode)


def cmd_phrase_stats(args) -> int:
    triple = (args.src, args.tgt, args.align)
    compare = (args.compare_src, args.compare_tgt, args.compare_align)
    for name, group in (("--src/--tgt/--align", triple), ("--compare-*", compare)):
        if any(group) and not all(group):
            print(f"phrase-stats: {name} must be given together", file=sys.stderr)
            return EXIT_USAGE

    if args.baseline_record:
        baseline = read_phrase_record(args.baseline_record)
    elif all(triple):
        baseline = _triple_report(*triple, args)
    else:
        print("phrase-stats: need --src/--tgt/--align or --baseline-record", file=sys.stderr)
        return EXIT_USAGE

    variant = None
    if args.variant_record:
        variant = read_phrase_record(args.variant_record)
    elif all(compare):
        variant = _triple_report(*compare, args)
    elif args.baseline_record and all(triple):
        variant = _triple_report(*triple, args)

    if variant is None:
        print(baseline.format())
        frame = baseline.to_frame()
    else:
        frame = compare_reports(baseline, variant)
        print(format_comparison(frame))
    if args.record:
        write_record(frame, args.record)
    return EXIT_OK


# ========= parser =========
def _add_engine_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-i", "--input", default="-", help="tree-per-line input (default: stdin)")
    p.add_argument("-o", "--output", default="-", help="output path (default: stdout)")
    p.add_argument("--rules", default=DEFAULT_RULES, help="builtin, limited, only:ID,... or a rule file")
    p.add_argument("--tags", default=DEFAULT_TAGS, help="extra tag classes (name = LABEL ...)")
    p.add_argument("--enable", default=None, help="comma-separated rule ids to enable")
    p.add_argument("--fixpoint", action="store_true", default=None)
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--strict", action="store_true", help="exit 1 when any line fails")
    p.add_argument("--record", default=None, help="write a .json or .parquet record")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tree-reorder", description="Syntactic source reordering for phrase-based MT")
    ap.add_argument("--log-level", default=DEFAULT_LOG_LEVEL)
    sp = ap.add_subparsers(dest="cmd", required=True)

    p = sp.add_parser("reorder", help="Reorder trees, one token line per input line")
    _add_engine_args(p)
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: REORDER_WORKERS or 1)")
    p.add_argument("--unescape", action="store_true", help="map -LRB- and friends back to brackets")
    p.set_defaults(func=cmd_reorder)

    p = sp.add_parser("trace", help="Show every rule firing per line")
    _add_engine_args(p)
    p.add_argument("--replay", action="store_true", help="re-apply the trace and check the result")
    p.set_defaults(func=cmd_trace)

    p = sp.add_parser("rules-validate", help="Parse and check a rule file")
    p.add_argument("path", nargs="?", default=None)
    p.add_argument("--tags", default=DEFAULT_TAGS)
    p.set_defaults(func=cmd_rules_validate)

    p = sp.add_parser("eval", help="BLEU, NIST, mWER and mPER")
    p.add_argument("--hyp", required=True)
    p.add_argument("-r", "--ref", action="append", required=True, help="reference file (repeatable)")
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--nist-max-n", type=int, default=5)
    p.add_argument("--smooth", action="store_true")
    p.add_argument("--keep-case", action="store_true")
    p.add_argument("--record", default=None)
    p.set_defaults(func=cmd_eval)

    p = sp.add_parser("phrase-stats", help="Phrase counts per length, optionally against a baseline")
    for name in ("src", "tgt", "align", "compare-src", "compare-tgt", "compare-align"):
        p.add_argument(f"--{name}", default=None)
    p.add_argument("--baseline-record", default=None)
    p.add_argument("--variant-record", default=None)
    p.add_argument("--min-len", type=int, default=DEFAULT_MIN_LEN)
    p.add_argument("--max-len", type=int, default=DEFAULT_MAX_LEN)
    p.add_argument("--mode", choices=[m.value for m in ExtractionMode], default=ExtractionMode.EXTENDED.value)
    p.add_argument("--record", default=None)
    p.set_defaults(func=cmd_phrase_stats)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        logging.basicConfig(
            level=args.log_level.upper(),
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )
    except ValueError as e:
        print(f"tree-reorder: bad log level: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"{args.cmd}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusIOError, OSError) as e:
        print(f"{args.cmd}: {e}", file=sys.stderr)
        return EXIT_IO
    except ReorderError as e:
        print(f"{args.cmd}: {e}", file=sys.stderr)
        return EXIT_DATA
