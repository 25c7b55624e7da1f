import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from casimir.output import DataTable

finite = st.floats(allow_nan=False, allow_infinity=False)


def table(rows):
    return DataTable(["a", "dF"], ["m", "1e-15 N"], rows, {"command": "x", "timestamp": "now", "n": 3})


@given(st.lists(st.tuples(finite, finite), max_size=8))
def test_csv_round_trip(rows):
    t = table(rows)
    back = DataTable.from_csv(t.to_csv())
    assert back.columns == t.columns and back.units == t.units
    assert back.rows == t.rows
    assert back.metadata == t.metadata


@given(st.lists(st.tuples(finite, finite), max_size=8))
def test_json_round_trip(rows):
    t = table(rows)
    back = DataTable.from_json(t.to_json())
    assert back.rows == t.rows and back.units == t.units


def test_csv_layout():
    text = table([[1.0, 2.0]]).to_csv()
    lines = text.splitlines()
    assert lines[0].startswith("# ")
    assert lines[-3:] == ["a,dF", "m,1e-15 N", "1.0,2.0"]
    assert "timestamp" not in table([[1.0, 2.0]]).to_csv(timestamp=False)


def test_json_columns_are_arrays():
    doc = json.loads(table([[1.0, 2.0], [3.0, 4.0]]).to_json())
    assert doc["columns"]["dF"] == [2.0, 4.0]
    assert doc["units"]["a"] == "m"


def test_ragged_rows_rejected():
    with pytest.raises(ValueError):
        DataTable(["a", "b"], ["m", "m"], [[1.0]])
    with pytest.raises(ValueError):
        DataTable(["a", "b"], ["m"], [])
