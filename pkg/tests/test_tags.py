import pickle

import pytest

from tree_reorder.errors import DuplicateClass, TagError, UnknownClass
from tree_reorder.tags import BUILTIN_TAGS, class_matches, load_tag_file, parse_tag_text, register_class

CLASS_TABLE = [
    ("dcP", set(), True),
    ("pp", {"PP"}, False),
    ("whP", {"WHNP", "WHADVP", "WHADJP", "WHPP"}, False),
    ("vp", {"VP"}, False),
    ("sbar", {"SBAR"}, False),
    ("np", {"NP"}, False),
    ("vpw", {"VBN", "VBP", "VB", "VBG", "MD", "VBZ", "VBD"}, False),
    ("prep", {"IN", "TO", "VBN", "VBG"}, False),
    ("adv", {"RB", "RBR", "RBS"}, False),
    ("adj", {"JJ", "JJR", "JJS"}, False),
    ("advP", {"ADVP"}, False),
    ("punct", {","}, False),
    ("adjP", {"ADJP"}, False),
    ("OP", {"ADVP", "NP", "PP"}, True),
]
ALL_LABELS = set().union(*(members for _, members, _ in CLASS_TABLE)) | {"S", "NNP", "DT", "-LRB-"}


def test_builtin_classes():
    assert BUILTIN_TAGS.names == tuple(name for name, _, _ in CLASS_TABLE)
    assert class_matches("vpw", "VBZ")
    assert class_matches("prep", "VBN") and class_matches("vpw", "VBN")
    assert not class_matches("np", "NNP")


@pytest.mark.parametrize(("name", "members", "sequence"), CLASS_TABLE, ids=[t[0] for t in CLASS_TABLE])
def test_class_members(name, members, sequence):
    cls = BUILTIN_TAGS.get(name)
    assert cls.members == members
    assert cls.sequence is sequence
    accepted = {label for label in ALL_LABELS if class_matches(name, label)}
    assert accepted == (ALL_LABELS if not members else members)


def test_op_is_union_of_its_phrase_classes():
    union = BUILTIN_TAGS.get("np").members | BUILTIN_TAGS.get("pp").members | BUILTIN_TAGS.get("advP").members
    assert BUILTIN_TAGS.get("OP").members == union


def test_empty_class_accepts_any_label():
    reg = register_class("any", [])
    for label in ("NP", "VBZ", ",", "PRP$", "-RRB-", "X"):
        assert reg.class_matches("any", label)
    assert "any" not in BUILTIN_TAGS


def test_dcp_accepts_anything():
    for label in ("NP", "VP", "-LRB-", "#", "PRP$"):
        assert class_matches("dcP", label)


def test_sequence_flags():
    assert {c.name for c in BUILTIN_TAGS if c.sequence} == {"dcP", "OP"}


def test_unknown_class():
    with pytest.raises(UnknownClass):
        class_matches("nope", "NP")


def test_register_returns_new_registry():
    reg = register_class("det", ["DT", "PDT"])
    assert class_matches("det", "PDT", reg)
    assert "det" not in BUILTIN_TAGS

    with pytest.raises(DuplicateClass):
        register_class("np", ["NNP"], reg)
    reg2 = register_class("np", ["NP", "NNP"], reg, override=True)
    assert class_matches("np", "NNP", reg2)
    assert not class_matches("np", "NNP", reg)


def test_override_keeps_sequence_flag():
    reg = BUILTIN_TAGS.register("OP", ["NP"], override=True)
    assert reg.get("OP").sequence


@pytest.mark.parametrize("name", ["np1", "a-b", ""])
def test_invalid_names(name):
    with pytest.raises(TagError):
        register_class(name, ["NP"])


def test_registry_pickles():
    assert pickle.loads(pickle.dumps(BUILTIN_TAGS)).get("vpw") == BUILTIN_TAGS.get("vpw")


def test_tag_text():
    text = "# extra classes\nnoun = NN NNS  # common nouns\nsym = PRP$ WP$\nvpw = VB VBZ\n"
    reg = parse_tag_text(text)
    assert class_matches("noun", "NNS", reg)
    assert reg.get("sym").members == frozenset({"PRP$", "WP$"})
    assert not class_matches("vpw", "MD", reg)


def test_tag_text_errors_carry_line():
    with pytest.raises(DuplicateClass) as exc:
        parse_tag_text("a = NN\n\na = NNS\n")
    assert exc.value.lineno == 3

    with pytest.raises(TagError) as exc:
        parse_tag_text("a = NN\nnot a line\n")
    assert exc.value.lineno == 2


def test_load_tag_file(tmp_path):
    p = tmp_path / "extra.tags"
    p.write_text("noun = NN\n", encoding="utf-8")
    assert class_matches("noun", "NN", load_tag_file(p))
