import pytest

from tree_reorder.dsl import Quantifier, SlotRef, parse_rule, parse_ruleset, render_rule, render_ruleset
from tree_reorder.errors import (
    DroppedLhsElement,
    DuplicateLhsElement,
    DuplicateRhsReference,
    DuplicateRuleId,
    RuleSyntaxError,
    UnknownClass,
    UnresolvedRhsReference,
)
from tree_reorder.ruleset import builtin_rules_text
from tree_reorder.tags import BUILTIN_TAGS


def test_parse_simple_rule():
    r = parse_rule("VP(vpw pp1 pp2* : pp2* pp1 vpw)", rule_id="eq8")
    assert r.id == "eq8" and r.category == "VP"
    assert [str(el.key) for el in r.lhs] == ["vpw", "pp1", "pp2"]
    assert r.lhs[2].quantifier is Quantifier.STAR
    assert r.rhs == (SlotRef("pp", 2), SlotRef("pp", 1), SlotRef("vpw"))


def test_nested_wrappers():
    r = parse_rule("NP(np1 PP[prep NP[np2 sbar]] : np2 prep np1 sbar)")
    pp_el = r.lhs[1]
    assert pp_el.name == "PP" and pp_el.literal
    inner = pp_el.nested[1]
    assert inner.name == "NP" and inner.literal
    assert [str(el.key) for el in r.leaves()] == ["np1", "prep", "np2", "sbar"]


def test_comment_and_spacing():
    r = parse_rule("  PP( adv  prep? dcP:dcP prep? adv )   # postpositions")
    assert r.source_text == "PP( adv  prep? dcP:dcP prep? adv )"
    assert render_rule(r) == "PP(adv prep? dcP : dcP prep? adv)"


@pytest.mark.parametrize(
    "text, exc",
    [
        ("VP(vpw pp : pp vpw", RuleSyntaxError),
        ("VP(vpw pp pp : pp vpw)", DuplicateLhsElement),
        ("VP(vpw pp : np vpw)", UnresolvedRhsReference),
        ("VP(vpw pp : pp pp vpw)", DuplicateRhsReference),
        ("VP(vpw pp : pp)", DroppedLhsElement),
        ("VP(vpw pp? : pp* vpw)", RuleSyntaxError),
        ("VP(vpw foo : foo vpw)", UnknownClass),
        ("VP(vpw Pp[prep] : prep vpw)", UnknownClass),
    ],
)
def test_rule_errors(text, exc):
    with pytest.raises(exc):
        parse_rule(text)


def test_syntax_error_has_position():
    with pytest.raises(RuleSyntaxError) as e:
        parse_rule("VP(vpw pp ; pp vpw)")
    assert e.value.position is not None


def test_rhs_quantifier_may_be_omitted():
    r = parse_rule("VP(vpw pp? : pp vpw)")
    assert render_rule(r) == "VP(vpw pp? : pp? vpw)"


def test_custom_tags_resolve():
    tags = BUILTIN_TAGS.register("det", ["DT"])
    r = parse_rule("NP(det np : np det)", tags=tags)
    assert r.tags is tags


def test_ruleset_ids_and_priorities():
    text = "# c\n@id: first\nNP(np vp : vp np)\n\nPP(prep dcP : dcP prep)\n"
    rules = parse_ruleset(text)
    assert [(r.id, r.priority) for r in rules] == [("first", 1), ("r2", 2)]


def test_ruleset_errors_carry_line():
    with pytest.raises(DuplicateRuleId) as e:
        parse_ruleset("@id: a\nNP(np vp : vp np)\n@id: a\nPP(prep dcP : dcP prep)\n")
    assert e.value.lineno == 4

    with pytest.raises(UnresolvedRhsReference) as e:
        parse_ruleset("NP(np vp : vp np)\n\nNP(np vp : x np)\n")
    assert e.value.lineno == 3

    with pytest.raises(RuleSyntaxError):
        parse_ruleset("NP(np vp : vp np)\n@id: dangling\n")


def test_builtin_text_renders_stably():
    rules = parse_ruleset(builtin_rules_text())
    assert len(rules) == 19
    again = parse_ruleset(render_ruleset(rules))
    assert [(r.id, r.category, r.lhs, r.rhs) for r in again] == [(r.id, r.category, r.lhs, r.rhs) for r in rules]


def test_class_named_wrapper_is_not_literal():
    r = parse_rule("NP(np1 pp[prep np2] : np2 prep np1)")
    assert r.lhs[1].name == "pp" and not r.lhs[1].literal
