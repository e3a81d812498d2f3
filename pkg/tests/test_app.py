import pytest

pytest.importorskip("streamlit")

from tree_reorder.app import tree_dot  # noqa: E402
from tree_reorder.treebank import parse_ptb  # noqa: E402


def test_tree_dot():
    dot = tree_dot(parse_ptb('(NP (DT a) (NN "b"))'))
    assert dot.startswith("digraph T {") and dot.endswith("}")
    assert "n0 -> n1;" in dot and "n0 -> n2;" in dot
    assert 'label="NN\\n\\"b\\""' in dot
