import os

import pandas as pd
import streamlit as st

from tree_reorder.cli import load_rules, load_tags
from tree_reorder.engine import DEFAULT_RULES, DEFAULT_TAGS, EngineConfig, apply_rules
from tree_reorder.errors import ReorderError
from tree_reorder.ruleset import check_fixtures, first_divergence, fixtures
from tree_reorder.treebank import ParseNode, flatten, parse_ptb, render_ptb

st.set_page_config(page_title="tree-reorder • Rule Playground", layout="wide")


def _init_state():
    st.session_state.setdefault("logs_run", [])
    st.session_state.setdefault("tree_text", "")


def _log(key: str, msg: str) -> None:
    st.session_state[key].append(msg)


def tree_dot(tree: ParseNode) -> str:
    """Graphviz source for a parse tree, leaves drawn as label/token boxes."""
    lines = ["digraph T {", "  node [shape=plaintext];", "  ordering=out;"]
    counter = 0

    def walk(node: ParseNode) -> str:
        nonlocal counter
        name = f"n{counter}"
        counter += 1
        if node.is_leaf:
            label = f"{node.label}\\n{node.token}".replace('"', '\\"')
            lines.append(f'  {name} [label="{label}", shape=box, style=rounded];')
            return name
        lines.append(f'  {name} [label="{node.label}"];')
        for child in node.children:
            lines.append(f"  {name} -> {walk(child)};")
        return name

    walk(tree)
    lines.append("}")
    return "\n".join(lines)


def _show_tree(tree: ParseNode) -> None:
    dot = tree_dot(tree)
    try:
        st.graphviz_chart(dot, use_container_width=True)
    except Exception:
        st.caption("Graphviz not available; showing the bracketed tree instead:")
        st.code(render_ptb(tree), language="text")


def run():
    _init_state()

    rules_source = os.getenv("REORDER_RULES", DEFAULT_RULES)
    tags_path = os.getenv("REORDER_TAGS", DEFAULT_TAGS or "")
    try:
        base = EngineConfig.from_env()
    except ReorderError as e:
        st.error(f"Bad environment setting: {e}")
        return

    with st.sidebar:
        st.header("⚙️ Config")
        st.caption("Environment-driven settings; the toggles below override them for this session.")
        st.code(
            f"REORDER_RULES={rules_source}\nREORDER_TAGS={tags_path}\n"
            f"REORDER_FIXPOINT={int(base.fixpoint)}\nREORDER_MAX_ITERATIONS={base.max_iterations}",
            language="bash",
        )
        try:
            rules = load_rules(rules_source, load_tags(tags_path or None))
        except (ReorderError, OSError) as e:
            st.error(f"Rule load failed: {e}")
            return
        fixpoint = st.toggle("Fixpoint mode", value=base.fixpoint)
        max_iterations = st.number_input("Max firings per node", min_value=1, max_value=100, value=base.max_iterations)
        enabled = st.multiselect("Enabled rules", options=[r.id for r in rules], default=[r.id for r in rules])
        if st.button("Clear logs"):
            st.session_state.logs_run = []
            st.success("Cleared logs.")

    st.title("🌳 tree-reorder: rule playground")
    st.write("Paste a bracketed parse or pick a worked example, then watch the rules rewrite it.")

    cases = {c.rule_id: c for c in fixtures()}
    pick = st.selectbox("Worked example", options=["(none)", *cases])
    if pick != st.session_state.get("last_pick"):
        st.session_state.last_pick = pick
        if pick != "(none)":
            st.session_state.tree_text = cases[pick].tree
    st.session_state.tree_text = st.text_area("Tree", value=st.session_state.tree_text, height=120)

    config = EngineConfig(fixpoint, int(max_iterations), frozenset(enabled))
    if st.button("Reorder", use_container_width=True) and st.session_state.tree_text.strip():
        try:
            tree = parse_ptb(st.session_state.tree_text)
            out, trace = apply_rules(tree, rules, config)
        except ReorderError as e:
            st.error(f"Reorder failed: {e}")
            _log("logs_run", f"error: {e}")
        else:
            _log("logs_run", f"{len(trace.steps)} firings: {' '.join(trace.output_tokens)}")
            left, right = st.columns(2)
            with left:
                st.subheader("Input")
                st.write(" ".join(flatten(tree)))
                _show_tree(tree)
            with right:
                st.subheader("Reordered")
                st.write(" ".join(flatten(out)))
                _show_tree(out)
            st.subheader("Trace")
            st.dataframe(trace.to_frame(), use_container_width=True)
            if pick != "(none)":
                case = cases[pick]
                at = first_divergence(case.printed_full, trace.output_tokens)
                st.caption(
                    "Matches the printed example." if at is None else f"Leaves the printed example at token {at}."
                )

    with st.expander("Run log", expanded=False):
        st.code("\n".join(st.session_state.logs_run) or "(empty)", language="text")

    st.divider()
    st.header("📋 Fixture suite")
    if st.button("Check all fixtures", use_container_width=True):
        try:
            df: pd.DataFrame = check_fixtures(rules=rules, fixpoint=True)
        except ReorderError as e:
            st.error(f"Fixture check failed: {e}")
        else:
            st.dataframe(df, use_container_width=True)
            st.caption(f"partial ok: {int(df.partial_ok.sum())}/{len(df)}, full ok: {int(df.full_ok.sum())}/{len(df)}")


if __name__ == "__main__":
    run()
