import json
import math

import numpy as np

from mvbound.serialize import OUTPUT_DIR_ENV, csv_text, dumps, resolve_output, write_csv, write_json


def test_dumps_canonical():
    text = dumps({"a": 1, "b": [1, 2.5, None], "c": {"d": True}, "e": []})
    assert text.endswith("}\n") and "\r" not in text
    assert json.loads(text) == {"a": 1, "b": [1, 2.5, None], "c": {"d": True}, "e": []}
    assert '"b": [1, 2.5, null]' in text


def test_dumps_floats_round_trip():
    xs = [0.1, 1 / 3, math.pi, 1e-300, -2.5e17]
    back = json.loads(dumps(xs))
    assert back == xs


def test_dumps_numpy_and_nonfinite():
    text = dumps({"x": np.int64(3), "y": np.float64(0.5), "z": np.bool_(False), "w": math.inf})
    assert json.loads(text) == {"x": 3, "y": 0.5, "z": False, "w": None}


def test_csv_text():
    assert csv_text(["a", "b"], []) == "a,b\n"
    assert csv_text(["a", "b"], [[1, None], [0.5, True]]) == "a,b\n1,\n0.5,True\n"


def test_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    assert resolve_output("x.json") == tmp_path / "x.json"
    write_json("x.json", {"k": 1})
    write_csv("y.csv", ["k"], [[1]])
    assert json.loads((tmp_path / "x.json").read_text()) == {"k": 1}
    assert (tmp_path / "y.csv").read_bytes() == b"k\n1\n"
    monkeypatch.delenv(OUTPUT_DIR_ENV)
    assert str(resolve_output("x.json")) == "x.json"
