"""Phrase-pair extraction from word alignments and per-length phrase counts.

Counts are bucketed by source phrase length. ``total`` counts every extracted
pair occurrence; ``distinct`` counts distinct lowercased source strings.
"""
from __future__ import annotations

import enum
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import pandas as pd

from tree_reorder.errors import (
    AlignmentOutOfRange,
    BucketMismatch,
    LineCountMismatch,
    MalformedPair,
    NegativeIndex,
    PhraseError,
)

log = logging.getLogger(__name__)

DEFAULT_MIN_LEN = 2
DEFAULT_MAX_LEN = 7

_PAIR = re.compile(r"(-?\d+)-(-?\d+)")

Span = tuple[int, int]
PhrasePair = tuple[Span, Span]


class ExtractionMode(enum.StrEnum):
    STRICT = "strict"
    EXTENDED = "extended"


def parse_alignment_line(text: str) -> frozenset[tuple[int, int]]:
    links = set()
    for tok in text.split():
        m = _PAIR.fullmatch(tok)
        if m is None:
            raise MalformedPair(f"malformed alignment pair {tok!r}, expected i-j")
        i, j = int(m.group(1)), int(m.group(2))
        if i < 0 or j < 0:
            raise NegativeIndex(f"negative index in alignment pair {tok!r}")
        links.add((i, j))
    return frozenset(links)


@dataclass(frozen=True)
class SentenceAlignment:
    source: tuple[str, ...]
    target: tuple[str, ...]
    links: frozenset[tuple[int, int]]

    def __post_init__(self):
        for i, j in self.links:
            if i >= len(self.source) or j >= len(self.target):
                raise AlignmentOutOfRange(
                    f"link {i}-{j} outside a {len(self.source)}x{len(self.target)} sentence pair"
                )

    @classmethod
    def from_lines(cls, source: str, target: str, alignment: str) -> SentenceAlignment:
        return cls(tuple(source.split()), tuple(target.split()), parse_alignment_line(alignment))


def extract_phrase_pairs(
    sa: SentenceAlignment,
    max_len: int = DEFAULT_MAX_LEN,
    mode: ExtractionMode | str = ExtractionMode.EXTENDED,
) -> set[PhrasePair]:
    """Alignment-consistent span pairs, spans inclusive, source length <= max_len.

    ``strict`` keeps tight pairs whose four boundary words are aligned;
    ``extended`` also lets both spans run over adjacent unaligned words.
    """
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    mode = ExtractionMode(mode)
    n, m = len(sa.source), len(sa.target)
    src_aligned = {i for i, _ in sa.links}
    tgt_aligned = {j for _, j in sa.links}
    pairs: set[PhrasePair] = set()

    for i1 in range(n):
        for i2 in range(i1, min(n, i1 + max_len)):
            targets = [j for i, j in sa.links if i1 <= i <= i2]
            if not targets:
                continue
            j1, j2 = min(targets), max(targets)
            if any(j1 <= j <= j2 and not i1 <= i <= i2 for i, j in sa.links):
                continue
            if mode is ExtractionMode.STRICT:
                if i1 in src_aligned and i2 in src_aligned:
                    pairs.add(((i1, i2), (j1, j2)))
                continue
            lo = j1
            while True:
                hi = j2
                while True:
                    pairs.add(((i1, i2), (lo, hi)))
                    hi += 1
                    if hi >= m or hi in tgt_aligned:
                        break
                lo -= 1
                if lo < 0 or lo in tgt_aligned:
                    break
    return pairs


# ========= reports =========
def source_key(sa: SentenceAlignment, span: Span) -> str:
    return " ".join(sa.source[span[0] : span[1] + 1]).lower()


@dataclass(frozen=True)
class PhraseReport:
    min_len: int
    max_len: int
    totals: dict[int, int]
    distinct: dict[int, int]

    def __post_init__(self):
        if not 1 <= self.min_len <= self.max_len:
            raise PhraseError(f"invalid length range {self.min_len}..{self.max_len}")
        for length in self.lengths:
            t, d = self.totals.get(length, 0), self.distinct.get(length, 0)
            if t < 0 or d < 0 or d > t:
                raise PhraseError(f"length {length}: need 0 <= distinct <= total, got {d} and {t}")

    @property
    def lengths(self) -> range:
        return range(self.min_len, self.max_len + 1)

    @classmethod
    def from_counts(
        cls,
        totals: dict[int, int] | Sequence[int],
        distinct: dict[int, int] | Sequence[int],
        min_len: int = DEFAULT_MIN_LEN,
    ) -> PhraseReport:
        """Build a report from raw per-length counts (sequences start at ``min_len``)."""
        if not isinstance(totals, dict):
            totals = {min_len + k: v for k, v in enumerate(totals)}
        if not isinstance(distinct, dict):
            distinct = {min_len + k: v for k, v in enumerate(distinct)}
        lengths = set(totals) | set(distinct)
        if not lengths:
            raise PhraseError("no phrase counts given")
        return cls(min(lengths), max(lengths), dict(totals), dict(distinct))

    @classmethod
    def from_frame(cls, df: pd.DataFrame) -> PhraseReport:
        df = df.sort_values("length")
        lengths = [int(x) for x in df["length"]]
        return cls(
            lengths[0],
            lengths[-1],
            dict(zip(lengths, (int(x) for x in df["phrases"]))),
            dict(zip(lengths, (int(x) for x in df["distinct_phrases"]))),
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "length": list(self.lengths),
                "phrases": [self.totals.get(L, 0) for L in self.lengths],
                "distinct_phrases": [self.distinct.get(L, 0) for L in self.lengths],
            }
        )

    def format(self) -> str:
        return self.to_frame().to_string(index=False)


@dataclass
class PhraseTally:
    """Mergeable accumulator behind a PhraseReport."""

    min_len: int = DEFAULT_MIN_LEN
    max_len: int = DEFAULT_MAX_LEN
    totals: Counter = field(default_factory=Counter)
    keys: dict[int, set[str]] = field(default_factory=dict)
    sentences: int = 0

    def add(self, sa: SentenceAlignment, mode: ExtractionMode | str = ExtractionMode.EXTENDED) -> None:
        self.sentences += 1
        for src, _ in extract_phrase_pairs(sa, self.max_len, mode):
            length = src[1] - src[0] + 1
            if length < self.min_len:
                continue
            self.totals[length] += 1
            self.keys.setdefault(length, set()).add(source_key(sa, src))

    def merge(self, other: PhraseTally) -> PhraseTally:
        if (self.min_len, self.max_len) != (other.min_len, other.max_len):
            raise BucketMismatch("cannot merge tallies over different length ranges")
        keys = {L: self.keys.get(L, set()) | other.keys.get(L, set()) for L in set(self.keys) | set(other.keys)}
        return PhraseTally(self.min_len, self.max_len, self.totals + other.totals, keys, self.sentences + other.sentences)

    def report(self) -> PhraseReport:
        lengths = range(self.min_len, self.max_len + 1)
        return PhraseReport(
            self.min_len,
            self.max_len,
            {L: self.totals.get(L, 0) for L in lengths},
            {L: len(self.keys.get(L, ())) for L in lengths},
        )


def read_alignments(
    source: Iterable[str], target: Iterable[str], alignment: Iterable[str]
) -> Iterator[SentenceAlignment]:
    src, tgt, ali = list(source), list(target), list(alignment)
    if len(tgt) != len(src):
        raise LineCountMismatch("target file", len(src), len(tgt))
    if len(ali) != len(src):
        raise LineCountMismatch("alignment file", len(src), len(ali))
    for lineno, (s, t, a) in enumerate(zip(src, tgt, ali), start=1):
        try:
            yield SentenceAlignment.from_lines(s, t, a)
        except PhraseError as e:
            raise e.at_line(lineno)


def phrase_report(
    corpus: Iterable[SentenceAlignment],
    min_len: int = DEFAULT_MIN_LEN,
    max_len: int = DEFAULT_MAX_LEN,
    mode: ExtractionMode | str = ExtractionMode.EXTENDED,
) -> PhraseReport:
    tally = PhraseTally(min_len, max_len)
    for sa in corpus:
        tally.add(sa, mode)
    log.info("extracted phrases from %d sentence pairs", tally.sentences)
    return tally.report()


def compare_reports(baseline: PhraseReport, variant: PhraseReport) -> pd.DataFrame:
    """IOBL (variant - baseline) and %IOBL per length; %IOBL is NaN when the baseline is 0."""
    if (baseline.min_len, baseline.max_len) != (variant.min_len, variant.max_len):
        raise BucketMismatch(
            f"baseline covers lengths {baseline.min_len}..{baseline.max_len}, "
            f"variant covers {variant.min_len}..{variant.max_len}"
        )

    def pct(delta: int, base: int) -> float:
        return 100.0 * delta / base if base else math.nan

    rows = []
    for L in baseline.lengths:
        bt, vt = baseline.totals.get(L, 0), variant.totals.get(L, 0)
        bd, vd = baseline.distinct.get(L, 0), variant.distinct.get(L, 0)
        rows.append(
            {
                "length": L,
                "baseline_phrases": bt,
                "phrases": vt,
                "iobl_phrases": vt - bt,
                "pct_iobl_phrases": pct(vt - bt, bt),
                "baseline_distinct": bd,
                "distinct_phrases": vd,
                "iobl_distinct": vd - bd,
                "pct_iobl_distinct": pct(vd - bd, bd),
            }
        )
    return pd.DataFrame(rows)


def _pct(v: float) -> str:
    return "n/a" if math.isnan(v) else f"{v:.2f}"


def format_comparison(df: pd.DataFrame) -> str:
    return df.to_string(
        index=False,
        formatters={c: _pct for c in ("pct_iobl_phrases", "pct_iobl_distinct")},
    )
