import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tree_reorder.dsl import SlotRef, parse_rule
from tree_reorder.errors import CategoryMismatch
from tree_reorder.matching import apply_rule, match_children, rewrite
from tree_reorder.tags import BUILTIN_TAGS
from tree_reorder.treebank import flatten, leaf, node, parse_ptb

LABELS = ["NP", "PP", "VBZ", "RB", "ADVP", "SBAR"]
CLASSES = ["np", "pp", "vpw", "adv", "advP", "OP", "dcP"]
QUANTS = ["", "?", "*", "+"]
QUANT_BOUNDS = {"": (1, 1), "?": (0, 1), "*": (0, None), "+": (1, None)}
# classes that bind a run of children
SEQUENCE = {"dcP", "OP"}
WRAPPER = "PP"


# A pattern is a list of (class, quantifier) leaves and lists of such leaves
# standing for a PP[...] wrapper. Children are labels and (label, labels)
# pairs for internal nodes.
def _build(children):
    counter = iter(range(1000))
    kids = []
    for child in children:
        if isinstance(child, str):
            kids.append(leaf(child, f"w{next(counter)}"))
        else:
            label, inner = child
            kids.append(node(label, *(leaf(lab, f"w{next(counter)}") for lab in inner)))
    return node("X", *kids)


def _rule(pattern):
    index = iter(range(1, 1000))
    refs = []

    def render(name, q):
        ref = f"{name}{next(index)}"
        refs.append(ref)
        return ref + q

    parts = []
    for el in pattern:
        if isinstance(el, tuple):
            parts.append(render(*el))
        else:
            parts.append(f"{WRAPPER}[{' '.join(render(*sub) for sub in el)}]")
    return parse_rule(f"X({' '.join(parts)} : {' '.join(reversed(refs))})")


def tilings(pattern, children):
    """Every leaf-length vector with which ``pattern`` covers ``children`` exactly."""
    if not pattern:
        return [()] if not children else []
    first, rest = pattern[0], pattern[1:]
    out = []
    if isinstance(first, list):
        if children and not isinstance(children[0], str) and children[0][0] == WRAPPER:
            for inner in tilings(first, children[0][1]):
                out.extend(inner + tail for tail in tilings(rest, children[1:]))
        return out
    name, q = first
    lo, hi = QUANT_BOUNDS[q]
    if name in SEQUENCE:
        hi = None
    top = len(children) if hi is None else min(hi, len(children))
    for n in range(lo, top + 1):
        labels = [c if isinstance(c, str) else c[0] for c in children[:n]]
        if all(BUILTIN_TAGS.class_matches(name, lab) for lab in labels):
            out.extend((n, *tail) for tail in tilings(rest, children[n:]))
    return out


def brute_force(pattern, children):
    """The lexicographically largest tiling wins."""
    found = tilings(pattern, children)
    return max(found) if found else None


def _check(pattern, children):
    rule = _rule(pattern)
    tree = _build(children)
    expected = brute_force(pattern, children)
    binding = match_children(rule, tree)
    if expected is None:
        assert binding is None
        return
    assert binding is not None
    assert binding.lengths(rule) == expected
    out = rewrite(rule, binding)
    assert sorted(flatten(node("X", *out))) == sorted(flatten(tree))


def _random_case(rnd):
    pattern = []
    for _ in range(rnd.randint(1, 4)):
        if rnd.random() < 0.25:
            pattern.append([(rnd.choice(CLASSES), rnd.choice(QUANTS)) for _ in range(rnd.randint(1, 2))])
        else:
            pattern.append((rnd.choice(CLASSES), rnd.choice(QUANTS)))
    children = []
    for _ in range(rnd.randint(1, 6)):
        if rnd.random() < 0.2:
            children.append((WRAPPER, [rnd.choice(LABELS) for _ in range(rnd.randint(1, 3))]))
        else:
            children.append(rnd.choice(LABELS))
    return pattern, children


def test_brute_force_handles_wrappers():
    pattern = [("vpw", ""), [("prep", ""), ("dcP", "")]]
    assert brute_force(pattern, ["VBZ", ("PP", ["VBN", "NP", "NP"])]) == (1, 1, 2)
    assert brute_force(pattern, ["VBZ", "PP"]) is None
    _check(pattern, ["VBZ", ("PP", ["VBN", "NP", "NP"])])


def test_known_tilings():
    rule = parse_rule("X(dcP1 np dcP2 : dcP2 np dcP1)")
    b = match_children(rule, _build(["NP", "NP", "NP", "PP"]))
    # the first run takes as much as it can
    assert b.lengths(rule) == (2, 1, 1)

    rule = parse_rule("X(vpw adv? dcP : dcP adv? vpw)")
    assert match_children(rule, _build(["VBZ", "RB", "NP"])).lengths(rule) == (1, 1, 1)
    assert match_children(rule, _build(["VBZ", "NP"])).lengths(rule) == (1, 0, 1)
    assert match_children(rule, _build(["VBZ"])) is None


def test_pattern_is_anchored():
    rule = parse_rule("X(np pp : pp np)")
    assert match_children(rule, _build(["NP", "PP"])) is not None
    assert match_children(rule, _build(["NP", "PP", "RB"])) is None
    assert match_children(rule, _build(["RB", "NP", "PP"])) is None


def test_wrappers_are_dissolved():
    rule = parse_rule("NP(np1 PP[prep NP[np2 sbar]] : np2 prep np1 sbar)")
    tree = parse_ptb("(NP (NP (NN time)) (PP (IN of) (NP (NP (NN year)) (SBAR (S (NN x))))))")
    binding = match_children(rule, tree)
    assert [w.label for w in binding.consumed_wrappers] == ["PP", "NP"]
    assert binding.slots[SlotRef("np", 2)][0].label == "NP"
    out = apply_rule(rule, tree)
    assert out.child_labels() == ("NP", "IN", "NP", "SBAR")
    assert flatten(out) == ["year", "of", "time", "x"]


def test_wrapper_needs_an_internal_node():
    rule = parse_rule("VP(vpw PP[prep dcP] : dcP prep vpw)")
    assert match_children(rule, parse_ptb("(VP (VB go) (PP (IN to) (NP (NN x))))")) is not None
    assert match_children(rule, parse_ptb("(VP (VB go) (PP up))")) is None


def test_category_mismatch():
    rule = parse_rule("PP(prep dcP : dcP prep)")
    tree = parse_ptb("(NP (IN of) (NN x))")
    with pytest.raises(CategoryMismatch):
        match_children(rule, tree)
    assert apply_rule(rule, tree) is None
    assert apply_rule(rule, leaf("PP", "x")) is None


@given(st.randoms(use_true_random=False))
@settings(max_examples=300, deadline=None)
def test_matches_brute_force(rnd):
    _check(*_random_case(rnd))


@pytest.mark.slow
def test_matches_brute_force_sweep():
    rnd = random.Random(20240817)
    for _ in range(10_000):
        _check(*_random_case(rnd))
