import pandas as pd
import pytest

from tree_reorder.errors import PhraseError
from tree_reorder.phrases import PhraseReport
from tree_reorder.records import read_phrase_record, read_record, write_record


@pytest.mark.parametrize("name", ["report.json", "report.parquet"])
def test_phrase_report_record(tmp_path, name):
    report = PhraseReport.from_counts({2: 10, 3: 7}, {2: 4, 3: 7})
    path = write_record(report.to_frame(), tmp_path / "out" / name)
    assert path.exists()
    assert read_phrase_record(path) == report


def test_not_a_phrase_record(tmp_path):
    path = write_record(pd.DataFrame({"rule_id": ["eq1"], "firings": [2]}), tmp_path / "firings.json")
    assert read_record(path).to_dict(orient="records") == [{"rule_id": "eq1", "firings": 2}]
    with pytest.raises(PhraseError):
        read_phrase_record(path)
