import argparse
import sys
from pathlib import Path

import pandas as pd

from tree_reorder.dsl import render_ruleset
from tree_reorder.records import write_record
from tree_reorder.ruleset import builtin_rules, check_fixtures, fixture_frame


def cmd_export_fixtures(args):
    out = Path(args.out)
    df = fixture_frame()
    write_record(df, out)
    trees = out.with_suffix(".ptb")
    trees.write_text("\n".join(df["tree"]) + "\n", encoding="utf-8")
    print("exported:", out, trees)


def cmd_check_fixtures(args):
    df = check_fixtures(fixpoint=not args.no_fixpoint)
    with pd.option_context("display.max_colwidth", args.width, "display.width", 200):
        cols = ["rule_id", "partial_ok", "full_ok", "full_exact", "partial_printed_at", "full_printed_at"]
        print(df[cols].to_string(index=False))
    bad = df[~(df.partial_ok & df.full_ok)]
    if not bad.empty:
        for row in bad.itertuples():
            print(f"{row.rule_id}: partial={row.partial_output!r} full={row.full_output!r}", file=sys.stderr)
        sys.exit(1)
    print(f"all {len(df)} fixtures OK")


def cmd_render_rules(args):
    sys.stdout.write(render_ruleset(builtin_rules()))


def main():
    ap = argparse.ArgumentParser(description="Developer utilities for the builtin rule set")
    sp = ap.add_subparsers(dest="cmd", required=True)

    sp_export = sp.add_parser("export-fixtures", help="Write the fixture table (.json/.parquet) plus a .ptb tree file")
    sp_export.add_argument("--out", default="data/en_hi_fixtures.parquet")
    sp_export.set_defaults(func=cmd_export_fixtures)

    sp_check = sp.add_parser("check-fixtures", help="Run partial and full expectations for every fixture")
    sp_check.add_argument("--no-fixpoint", action="store_true")
    sp_check.add_argument("--width", type=int, default=60)
    sp_check.set_defaults(func=cmd_check_fixtures)

    sp_render = sp.add_parser("render-rules", help="Print the builtin rules in canonical form")
    sp_render.set_defaults(func=cmd_render_rules)

    args = ap.parse_args()
    args.func(args)


if __name__ == "__main__":
    main()
