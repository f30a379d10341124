import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qwsimplex.records import QueryLedger, RunRecord, fmt_number

probs = st.lists(st.floats(min_value=0, max_value=1), min_size=1, max_size=30)


def make(p):
    n = len(p)
    return RunRecord(np.arange(n), p, 3 * np.arange(n), np.arange(n), {"module": "t", "M": 4, "x": 0.1})


@given(probs)
def test_csv_roundtrip(p):
    rec = make(p)
    back = RunRecord.from_csv(rec.to_csv())
    assert back.to_csv() == rec.to_csv()
    assert np.allclose(back.success_probability, np.array(p), rtol=1e-11, atol=1e-300)


@given(probs)
def test_json_is_valid_and_complete(p):
    doc = json.loads(make(p).to_json())
    assert doc["columns"] == ["index", "success_probability", "walk_steps", "oracle_queries"]
    assert len(doc["rows"]) == len(p)


def test_csv_layout():
    text = make([0.5, 1 / 3]).to_csv()
    lines = text.splitlines()
    assert lines[:3] == ["# module=t", "# M=4", "# x=0.1"]
    assert lines[3] == "index,success_probability,walk_steps,oracle_queries"
    assert lines[5] == "1,0.333333333333,3,1"


@pytest.mark.parametrize("x,text", [(3, "3"), (np.int64(7), "7"), (0.1, "0.1"), (1 / 3, "0.333333333333"),
                                    (12.540000000000001, "12.54"), (1e-20, "1e-20")])
def test_fmt_number(x, text):
    assert fmt_number(x) == text


def test_record_invariants():
    with pytest.raises(ValueError):
        RunRecord([0, 0], [0.1, 0.2], [0, 0], [0, 0])
    with pytest.raises(ValueError):
        RunRecord([0, 1], [0.1, 1.1], [0, 1], [0, 1])
    with pytest.raises(ValueError):
        RunRecord([0, 1], [0.1], [0, 1], [0, 1])
    RunRecord([0], [1 + 1e-10], [0], [0])  # float slack allowed


def test_peak_window_and_crossing():
    rec = make([0.1, 0.6, 0.4, 0.9])
    assert rec.peak() == (3, 0.9)
    assert rec.window(2).peak() == (1, 0.6)
    assert rec.first_crossing(0.5) == 1
    assert rec.first_crossing(0.95) is None


@given(st.integers(min_value=0, max_value=1000), st.integers(min_value=1, max_value=100))
def test_query_ledger(q, k):
    QueryLedger(q, q * k, k)
    with pytest.raises(ValueError):
        QueryLedger(q, q * k + 1, k)
