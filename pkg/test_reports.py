#!/usr/bin/env python3
"""
test_reports.py

Deterministic CSV/JSON writers and failure collection.
"""

import json

import numpy as np
import pytest

from reports import (ReportError, collect_failures, config_hash, format_float, to_jsonable, with_header,
                     write_csv, write_failure_manifest, write_json)


def test_format_float_keeps_17_digits():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(2.0) == "2"


def test_csv_layout(tmp_path):
    path = write_csv(tmp_path / "t.csv", ["n", "x", "ok"], [(1, 0.5, True), (np.int64(2), np.float64(1.25), False)])
    assert path.read_bytes() == b"n,x,ok\n1,0.5,1\n2,1.25,0\n"


def test_csv_rejects_ragged_rows(tmp_path):
    with pytest.raises(ReportError):
        write_csv(tmp_path / "t.csv", ["a", "b"], [(1,)])


def test_jsonable_conversions():
    data = {"z": 1 + 2j, "arr": np.array([1.0, np.nan]), "flag": np.bool_(True), 3: np.inf}
    assert to_jsonable(data) == {"z": [1.0, 2.0], "arr": [1.0, "nan"], "flag": True, "3": "inf"}


def test_json_writer_is_deterministic(tmp_path):
    data = {"b": 1.5, "a": [np.float64(0.25), -np.inf]}
    first = write_json(tmp_path / "one.json", data).read_bytes()
    second = write_json(tmp_path / "two.json", data).read_bytes()
    assert first == second
    assert json.loads(first) == {"b": 1.5, "a": [0.25, "-inf"]}


def test_config_hash_ignores_key_order():
    assert config_hash({"a": 1, "b": [1.0, 2.0]}) == config_hash({"b": [1.0, 2.0], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_with_header_comes_first():
    out = with_header({"passed": True}, "verify", {"a": 1})
    assert list(out) == ["command", "config_sha256", "passed"]
    assert out["config_sha256"] == config_hash({"a": 1})


def test_collect_failures_walks_nested_sections():
    report = {"passed": False, "sector": {"passed": True},
              "strip": {"passed": False, "inner": {"passed": False}}, "rows": [{"passed": False}]}
    assert collect_failures(report) == ["strip", "strip.inner"]


def test_failure_manifest(tmp_path):
    path = write_failure_manifest(tmp_path, "verify", {"a": 1}, ["comb"], {"comb": "identities_report.json"})
    manifest = json.loads(path.read_text())
    assert path.name == "failure_manifest.json"
    assert manifest["failures"] == ["comb"]
    assert manifest["command"] == "verify"
