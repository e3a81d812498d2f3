"""Corpus-level BLEU, NIST, multi-reference WER and multi-reference PER.

Metrics work on token lists; ``tokenize`` is the lowercase/whitespace split
used by the command line.
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import Levenshtein
import pandas as pd

from tree_reorder.errors import EmptyCorpus, EvalError, LineCountMismatch, ZeroReferenceLength

log = logging.getLogger(__name__)

Tokens = Sequence[str]

# brevity factor is 0.5 when the system is 2/3 of the reference length
NIST_BETA = math.log(0.5) / math.log(1.5) ** 2


def tokenize(line: str, lowercase: bool = True) -> list[str]:
    return (line.lower() if lowercase else line).split()


def ngrams(tokens: Tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


@dataclass(frozen=True)
class Segment:
    hypothesis: tuple[str, ...]
    references: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class EvalCorpus:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        if not self.segments:
            raise EmptyCorpus("evaluation corpus has no segments")
        for i, seg in enumerate(self.segments, start=1):
            if not seg.references:
                raise EvalError(f"segment {i} has no reference")
            for toks in (seg.hypothesis, *seg.references):
                if any(not t or t != t.strip() for t in toks):
                    raise EvalError(f"segment {i}: tokens must be non-empty and whitespace-free")

    @classmethod
    def of(cls, pairs: Iterable[tuple[Tokens, Iterable[Tokens]]]) -> EvalCorpus:
        return cls(tuple(Segment(tuple(h), tuple(tuple(r) for r in refs)) for h, refs in pairs))

    @classmethod
    def from_lines(
        cls,
        hypotheses: Sequence[str],
        references: Sequence[Sequence[str]],
        lowercase: bool = True,
    ) -> EvalCorpus:
        """One hypothesis list plus one line list per reference set."""
        for k, refs in enumerate(references, start=1):
            if len(refs) != len(hypotheses):
                raise LineCountMismatch(f"reference set {k}", len(hypotheses), len(refs))
        return cls.of(
            (tokenize(h, lowercase), [tokenize(refs[i], lowercase) for refs in references])
            for i, h in enumerate(hypotheses)
        )

    def __len__(self) -> int:
        return len(self.segments)


def levenshtein(a: Tokens, b: Tokens) -> int:
    return Levenshtein.distance(list(a), list(b))


# ========= BLEU =========
@dataclass
class BleuStats:
    matches: list[int]
    totals: list[int]
    hyp_len: int = 0
    ref_len: int = 0

    def __add__(self, other: BleuStats) -> BleuStats:
        return BleuStats(
            [a + b for a, b in zip(self.matches, other.matches)],
            [a + b for a, b in zip(self.totals, other.totals)],
            self.hyp_len + other.hyp_len,
            self.ref_len + other.ref_len,
        )


def _closest_ref_len(hyp_len: int, refs: Sequence[Tokens]) -> int:
    return min((abs(len(r) - hyp_len), len(r)) for r in refs)[1]


def bleu_stats(seg: Segment, max_n: int) -> BleuStats:
    matches, totals = [], []
    for n in range(1, max_n + 1):
        hyp = ngrams(seg.hypothesis, n)
        best: Counter = Counter()
        for ref in seg.references:
            best |= ngrams(ref, n)
        matches.append(sum(min(c, best[g]) for g, c in hyp.items()))
        totals.append(max(len(seg.hypothesis) - n + 1, 0))
    return BleuStats(matches, totals, len(seg.hypothesis), _closest_ref_len(len(seg.hypothesis), seg.references))


@dataclass(frozen=True)
class BleuResult:
    score: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_len: int
    ref_len: int


def bleu(corpus: EvalCorpus, max_n: int = 4, smooth: bool = False) -> BleuResult:
    """Corpus BLEU in [0, 1].

    The brevity penalty lies in (0, 1] for a non-empty hypothesis side. An
    empty one has no length to compare, so its penalty is reported as 0, the
    limit of exp(1 - r/c) as c goes to 0, and the score is 0.
    """
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    stats = BleuStats([0] * max_n, [0] * max_n)
    for seg in corpus.segments:
        stats = stats + bleu_stats(seg, max_n)

    precisions = []
    for n, (m, t) in enumerate(zip(stats.matches, stats.totals), start=1):
        if smooth and n > 1:
            precisions.append((m + 1) / (t + 1))
        else:
            precisions.append(m / t if t else 0.0)

    c, r = stats.hyp_len, stats.ref_len
    if c == 0:
        bp = 0.0
    else:
        bp = 1.0 if c >= r else math.exp(1 - r / c)
    if bp == 0.0 or min(precisions) == 0.0:
        score = 0.0
    else:
        score = bp * math.exp(sum(math.log(p) for p in precisions) / max_n)
    return BleuResult(score, tuple(precisions), bp, c, r)


# ========= NIST =========
def _info_weights(corpus: EvalCorpus, max_n: int) -> dict[tuple[str, ...], float]:
    counts: Counter = Counter()
    words = 0
    for seg in corpus.segments:
        for ref in seg.references:
            words += len(ref)
            for n in range(1, max_n + 1):
                counts.update(ngrams(ref, n))
    info = {}
    for gram, c in counts.items():
        context = words if len(gram) == 1 else counts[gram[:-1]]
        info[gram] = math.log2(context / c)
    return info


def nist(corpus: EvalCorpus, max_n: int = 5) -> float:
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    info = _info_weights(corpus, max_n)
    gained = [0.0] * max_n
    totals = [0] * max_n
    hyp_len = 0
    ref_len = 0.0
    for seg in corpus.segments:
        hyp_len += len(seg.hypothesis)
        ref_len += sum(len(r) for r in seg.references) / len(seg.references)
        for n in range(1, max_n + 1):
            hyp = ngrams(seg.hypothesis, n)
            best: Counter = Counter()
            for ref in seg.references:
                best |= ngrams(ref, n)
            gained[n - 1] += sum(min(c, best[g]) * info[g] for g, c in hyp.items() if best[g])
            totals[n - 1] += sum(hyp.values())

    if hyp_len == 0:
        return 0.0
    score = sum(g / t for g, t in zip(gained, totals) if t)
    ratio = min(hyp_len / ref_len, 1.0) if ref_len else 1.0
    return score * math.exp(NIST_BETA * math.log(ratio) ** 2)


# ========= error rates =========
def _position_independent(hyp: Tokens, ref: Tokens) -> int:
    overlap = sum((Counter(hyp) & Counter(ref)).values())
    return max(len(hyp), len(ref)) - overlap


@dataclass
class ErrorCounts:
    word_errors: int = 0
    position_errors: int = 0
    ref_words: int = 0

    def __add__(self, other: ErrorCounts) -> ErrorCounts:
        return ErrorCounts(
            self.word_errors + other.word_errors,
            self.position_errors + other.position_errors,
            self.ref_words + other.ref_words,
        )


def error_counts(seg: Segment) -> ErrorCounts:
    """Both rates normalize by the reference closest in edit distance (earlier one on ties)."""
    dists = [levenshtein(seg.hypothesis, r) for r in seg.references]
    best = min(range(len(dists)), key=dists.__getitem__)
    per = min(_position_independent(seg.hypothesis, r) for r in seg.references)
    return ErrorCounts(dists[best], per, len(seg.references[best]))


def _corpus_errors(corpus: EvalCorpus) -> ErrorCounts:
    total = ErrorCounts()
    for seg in corpus.segments:
        total = total + error_counts(seg)
    if total.ref_words == 0:
        raise ZeroReferenceLength("the closest references have no words")
    return total


def mwer(corpus: EvalCorpus) -> float:
    e = _corpus_errors(corpus)
    return 100.0 * e.word_errors / e.ref_words


def mper(corpus: EvalCorpus) -> float:
    e = _corpus_errors(corpus)
    return 100.0 * e.position_errors / e.ref_words


# ========= report =========
@dataclass(frozen=True)
class EvalReport:
    bleu: float
    nist: float
    mwer: float
    mper: float
    precisions: tuple[float, ...] = field(default=())
    brevity_penalty: float = 1.0
    hyp_len: int = 0
    ref_len: int = 0
    segments: int = 0

    def format(self) -> str:
        return f"BLEU {self.bleu:.4f} NIST {self.nist:.4f} mWER {self.mwer:.2f} mPER {self.mper:.2f}"

    def to_frame(self) -> pd.DataFrame:
        row = {
            "bleu": self.bleu,
            "nist": self.nist,
            "mwer": self.mwer,
            "mper": self.mper,
            "brevity_penalty": self.brevity_penalty,
            "hyp_len": self.hyp_len,
            "ref_len": self.ref_len,
            "segments": self.segments,
        }
        row.update({f"p{n}": p for n, p in enumerate(self.precisions, start=1)})
        return pd.DataFrame([row])


def evaluate(corpus: EvalCorpus, max_n: int = 4, nist_max_n: int = 5, smooth: bool = False) -> EvalReport:
    b = bleu(corpus, max_n, smooth)
    errors = _corpus_errors(corpus)
    report = EvalReport(
        bleu=b.score,
        nist=nist(corpus, nist_max_n),
        mwer=100.0 * errors.word_errors / errors.ref_words,
        mper=100.0 * errors.position_errors / errors.ref_words,
        precisions=b.precisions,
        brevity_penalty=b.brevity_penalty,
        hyp_len=b.hyp_len,
        ref_len=b.ref_len,
        segments=len(corpus),
    )
    log.info("evaluated %d segments: %s", len(corpus), report.format())
    return report
