"""Machine-readable run records: Parquet when the path ends in .parquet, JSON otherwise."""
from __future__ import annotations

import logging
from pathlib import Path

import pandas as pd
import pyarrow as pa
import pyarrow.parquet as pq

from tree_reorder.errors import PhraseError
from tree_reorder.phrases import PhraseReport

log = logging.getLogger(__name__)

PARQUET_SUFFIXES = {".parquet", ".pq"}


def write_record(df: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() in PARQUET_SUFFIXES:
        t = pa.Table.from_pandas(df, preserve_index=False)
        pq.write_table(t, path)
    else:
        df.to_json(path, orient="records", indent=2)
    log.info("record written: %s (%d rows)", path, len(df))
    return path


def read_record(path: str | Path) -> pd.DataFrame:
    path = Path(path)
    if path.suffix.lower() in PARQUET_SUFFIXES:
        return pq.read_table(path).to_pandas()
    return pd.read_json(path, orient="records", dtype=False)


def read_phrase_record(path: str | Path) -> PhraseReport:
    df = read_record(path)
    missing = {"length", "phrases", "distinct_phrases"} - set(df.columns)
    if missing:
        raise PhraseError(f"{path}: not a phrase report, missing column(s) {sorted(missing)}")
    return PhraseReport.from_frame(df)
