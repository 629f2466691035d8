import csv
import io
import json
import math
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, strategies as st

from approxlab.emit import (OutputError, Table, format_value, to_csv, to_svg, write_csv,
                            write_json, write_svg)


def test_header_only_csv():
    assert to_csv(Table(["n", "E"])) == "n,E\r\n"


def test_rows_and_quoting():
    text = to_csv(Table(["name", "v"], [["a,b", 1.5], ['say "hi"', True]]))
    assert text == 'name,v\r\n"a,b",1.5\r\n"say ""hi""",true\r\n'
    rows = list(csv.reader(io.StringIO(text, newline="")))
    assert rows[1] == ["a,b", "1.5"]


def test_special_floats():
    assert format_value(math.inf) == "inf"
    assert format_value(-math.inf) == "-inf"
    assert format_value(math.nan) == "nan"
    assert format_value(False) == "false"
    import numpy as np
    assert format_value(np.float64(0.1)) == "0.10000000000000001"
    assert format_value(np.int64(7)) == "7"


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_roundtrip(v):
    assert float(format_value(v)) == v


def test_row_length_mismatch():
    with pytest.raises(ValueError):
        Table(["a", "b"], [[1]])


def test_column():
    assert Table(["a", "b"], [[1, 2], [3, 4]]).column("b") == [2, 4]


def test_write_and_errors(tmp_path):
    t = Table(["n"], [[1]])
    write_csv(t, tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_bytes() == b"n\r\n1\r\n"
    write_json({"b": 1, "a": [1.5]}, tmp_path / "t.json")
    text = (tmp_path / "t.json").read_text()
    assert json.loads(text) == {"a": [1.5], "b": 1}
    assert text.index('"a"') < text.index('"b"')
    with pytest.raises(OutputError) as info:
        write_csv(t, tmp_path / "missing" / "t.csv")
    assert "missing" in str(info.value)


def test_svg_has_one_polyline_per_series(tmp_path):
    svg = to_svg({"E_n": ([1, 2, 4], [1, 0.5, 0.25]), "omega": ([1, 2, 4], [2, 1, 0])},
                 title="a < b", annotations=["slope -1"])
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    lines = root.findall(f"{ns}polyline")
    assert len(lines) == 2
    # the zero value is skipped on log axes
    assert len(lines[1].get("points").split()) == 2
    texts = [t.text for t in root.iter(f"{ns}text")]
    assert "a < b" in texts and "slope -1" in texts
    write_svg(tmp_path / "c.svg", {"s": ([1, 10], [1, 10])})
    assert (tmp_path / "c.svg").read_text().startswith("<svg")


def test_svg_empty_series():
    ET.fromstring(to_svg({"none": ([], [])}))
