import os
import tempfile
from pathlib import Path

import pandas as pd

from tree_reorder.cli import main as cli
from tree_reorder.records import read_record
from tree_reorder.ruleset import fixtures


def _step(name: str, argv: list[str]) -> None:
    code = cli(argv)
    print(f"{name}: exit {code}")
    if code != 0:
        raise SystemExit(f"{name} failed with exit code {code}")


def main() -> None:
    work = Path(os.getenv("E2E_DIR") or tempfile.mkdtemp(prefix="tree-reorder-e2e-"))
    work.mkdir(parents=True, exist_ok=True)
    print("E2E_DIR =", work)
    cases = fixtures()

    # Step 1: fixture trees -> reordered token lines
    trees = work / "fixtures.ptb"
    trees.write_text("\n".join(c.tree for c in cases) + "\n", encoding="utf-8")
    reordered = work / "reordered.txt"
    _step("STEP1 reorder", ["reorder", "-i", str(trees), "-o", str(reordered), "--fixpoint", "--strict",
                            "--record", str(work / "firings.parquet")])
    got = reordered.read_text(encoding="utf-8").splitlines()
    exact = sum(g.lower() == c.full.lower() for g, c in zip(got, cases))
    print(f"STEP1 full expectations met: {exact}/{len(cases)}")
    print("STEP1 firings:", read_record(work / "firings.parquet").to_dict(orient="records"))

    # Step 2: trace with replay check
    _step("STEP2 trace", ["trace", "-i", str(trees), "-o", str(work / "trace.txt"), "--replay",
                          "--record", str(work / "trace.json")])

    # Step 3: rule file validation
    _step("STEP3 rules-validate", ["rules-validate"])

    # Step 4: evaluation of the reordered output against the expected lines
    refs = work / "expected.txt"
    refs.write_text("\n".join(c.full for c in cases) + "\n", encoding="utf-8")
    _step("STEP4 eval", ["eval", "--hyp", str(reordered), "-r", str(refs), "--record", str(work / "eval.json")])

    # Step 5: phrase counts, baseline against a copy with one link dropped
    src, tgt, ali = work / "c.en", work / "c.hi", work / "c.align"
    src.write_text("a b c\nthe time of year\n", encoding="utf-8")
    tgt.write_text("x y z\nvarsh ka samay\n", encoding="utf-8")
    ali.write_text("0-0 1-1 2-2\n0-2 1-2 3-0\n", encoding="utf-8")
    ali2 = work / "c2.align"
    ali2.write_text("0-0 2-2\n0-2 1-2 3-0\n", encoding="utf-8")
    _step("STEP5 phrase-stats", ["phrase-stats", "--src", str(src), "--tgt", str(tgt), "--align", str(ali),
                                 "--compare-src", str(src), "--compare-tgt", str(tgt), "--compare-align", str(ali2),
                                 "--min-len", "1", "--record", str(work / "iobl.parquet")])
    print("STEP5 delta rows:", len(pd.read_parquet(work / "iobl.parquet")))
    print("OK E2E DONE")


if __name__ == "__main__":
    main()
