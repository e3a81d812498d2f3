import math
import random

import pytest

from tree_reorder.errors import (
    AlignmentOutOfRange,
    BucketMismatch,
    LineCountMismatch,
    MalformedPair,
    NegativeIndex,
    PhraseError,
)
from tree_reorder.phrases import (
    PhraseReport,
    PhraseTally,
    SentenceAlignment,
    compare_reports,
    extract_phrase_pairs,
    format_comparison,
    parse_alignment_line,
    phrase_report,
    read_alignments,
)


def sa(src, tgt, links):
    return SentenceAlignment(tuple(src.split()), tuple(tgt.split()), frozenset(links))


def brute_force(s, max_len, strict):
    src_aligned = {i for i, _ in s.links}
    tgt_aligned = {j for _, j in s.links}
    out = set()
    n, m = len(s.source), len(s.target)
    for i1 in range(n):
        for i2 in range(i1, min(n, i1 + max_len)):
            for j1 in range(m):
                for j2 in range(j1, m):
                    inside = [(i, j) for i, j in s.links if i1 <= i <= i2 and j1 <= j <= j2]
                    if not inside:
                        continue
                    if any((i1 <= i <= i2) != (j1 <= j <= j2) for i, j in s.links):
                        continue
                    if strict and not ({i1, i2} <= src_aligned and {j1, j2} <= tgt_aligned):
                        continue
                    out.add(((i1, i2), (j1, j2)))
    return out


def test_small_examples():
    assert extract_phrase_pairs(sa("a b", "x y", {(0, 0), (1, 1)})) == {
        ((0, 0), (0, 0)),
        ((1, 1), (1, 1)),
        ((0, 1), (0, 1)),
    }
    assert extract_phrase_pairs(sa("a b", "x y z", {(0, 0), (1, 2)})) == {
        ((0, 0), (0, 0)),
        ((0, 0), (0, 1)),
        ((1, 1), (2, 2)),
        ((1, 1), (1, 2)),
        ((0, 1), (0, 2)),
    }
    assert extract_phrase_pairs(sa("a b", "x y z", {(0, 0), (1, 2)}), mode="strict") == {
        ((0, 0), (0, 0)),
        ((1, 1), (2, 2)),
        ((0, 1), (0, 2)),
    }


def test_unaligned_sentence_has_no_pairs():
    assert extract_phrase_pairs(sa("a b", "x", set())) == set()


def test_max_len_caps_the_source_only():
    s = sa("a", "x y z", {(0, 0), (0, 2)})
    assert extract_phrase_pairs(s, max_len=1) == {((0, 0), (0, 2))}
    s = sa("a b c", "x y z", {(0, 0), (1, 1), (2, 2)})
    assert max(p[0][1] - p[0][0] + 1 for p in extract_phrase_pairs(s, max_len=2)) == 2


def _random_alignment(rnd):
    src = " ".join(f"s{i}" for i in range(rnd.randint(1, 8)))
    tgt = " ".join(f"t{j}" for j in range(rnd.randint(1, 8)))
    n, m = len(src.split()), len(tgt.split())
    links = {(rnd.randrange(n), rnd.randrange(m)) for _ in range(rnd.randint(0, n + m))}
    return sa(src, tgt, links)


def test_extraction_against_brute_force():
    rnd = random.Random(42)
    for _ in range(2000):
        s = _random_alignment(rnd)
        max_len = rnd.randint(1, 8)
        assert extract_phrase_pairs(s, max_len, "extended") == brute_force(s, max_len, strict=False)
        assert extract_phrase_pairs(s, max_len, "strict") == brute_force(s, max_len, strict=True)


@pytest.mark.slow
def test_extraction_against_brute_force_sweep():
    rnd = random.Random(4242)
    for _ in range(10_000):
        s = _random_alignment(rnd)
        assert extract_phrase_pairs(s, 7) == brute_force(s, 7, strict=False)


def test_parse_alignment_line():
    assert parse_alignment_line("0-0 1-2  2-1") == {(0, 0), (1, 2), (2, 1)}
    assert parse_alignment_line("") == frozenset()
    with pytest.raises(MalformedPair):
        parse_alignment_line("0-0 1:2")
    with pytest.raises(NegativeIndex):
        parse_alignment_line("0--1")


def test_out_of_range_link():
    with pytest.raises(AlignmentOutOfRange):
        SentenceAlignment.from_lines("a b", "x", "1-1")


def test_read_alignments_errors():
    with pytest.raises(LineCountMismatch):
        list(read_alignments(["a"], ["x", "y"], ["0-0"]))
    with pytest.raises(MalformedPair) as exc:
        list(read_alignments(["a", "b"], ["x", "y"], ["0-0", "zz"]))
    assert exc.value.lineno == 2


def test_report_counts_totals_and_distinct():
    corpus = [
        SentenceAlignment.from_lines("the cat", "x y", "0-0 1-1"),
        SentenceAlignment.from_lines("The Cat", "x y", "0-0 1-1"),
    ]
    report = phrase_report(corpus, min_len=1, max_len=2)
    assert report.totals == {1: 4, 2: 2}
    assert report.distinct == {1: 2, 2: 1}
    assert report.to_frame().columns.tolist() == ["length", "phrases", "distinct_phrases"]


def test_tally_merge():
    a, b = PhraseTally(1, 2), PhraseTally(1, 2)
    a.add(SentenceAlignment.from_lines("the cat", "x y", "0-0 1-1"))
    b.add(SentenceAlignment.from_lines("a cat", "x y", "0-0 1-1"))
    merged = a.merge(b).report()
    assert merged.totals == {1: 4, 2: 2} and merged.distinct == {1: 3, 2: 2}
    with pytest.raises(BucketMismatch):
        a.merge(PhraseTally(2, 7))


def test_report_validation():
    with pytest.raises(PhraseError):
        PhraseReport.from_counts({2: 5}, {2: 6})
    with pytest.raises(PhraseError):
        PhraseReport(3, 2, {}, {})


def test_iobl_comparison():
    base = PhraseReport.from_counts({2: 537017, 4: 406069}, {2: 200000, 4: 268431})
    reordered = PhraseReport.from_counts({2: 579878, 4: 531904}, {2: 210000, 4: 409966})
    df = compare_reports(base, reordered).set_index("length")
    assert df.loc[2, "iobl_phrases"] == 42861
    assert df.loc[2, "pct_iobl_phrases"] == pytest.approx(7.98, abs=0.01)
    assert df.loc[4, "iobl_distinct"] == 141535
    assert df.loc[4, "pct_iobl_distinct"] == pytest.approx(52.72, abs=0.01)
    assert df.loc[3, "phrases"] == 0 and math.isnan(df.loc[3, "pct_iobl_phrases"])
    assert "n/a" in format_comparison(df.reset_index())


def test_comparison_needs_same_buckets():
    with pytest.raises(BucketMismatch):
        compare_reports(PhraseReport.from_counts([1, 1], [1, 1]), PhraseReport.from_counts([1, 1, 1], [1, 1, 1]))
