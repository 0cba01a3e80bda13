# -*- coding: utf-8 -*-
"""Tests for the circmode command line."""
import io
import json
import math

import pandas as pd
import pytest

from circmode.cli import main


def _run(argv):
    out = io.StringIO()
    status = main(argv, out=out)
    return status, out.getvalue()


def test_summarize_json(synthetic_csv):
    """Test the JSON summary document."""
    status, text = _run(["summarize", "-i", str(synthetic_csv), "--unit", "degrees", "--format", "json"])
    assert status == 0
    document = json.loads(text)
    assert document["schema"] == 1
    assert document["summary"]["n"] == 50
    assert document["summary"]["mean_defined"] is True


def test_summarize_human(two_point_file):
    """Test the human summary of two opposite directions."""
    status, text = _run(["summarize", "-i", str(two_point_file)])
    assert status == 0
    assert "n = 2" in text
    assert "undefined" in text


def test_test_command_is_deterministic(synthetic_csv):
    """Test that a fixed seed reproduces the JSON report byte for byte."""
    argv = ["test", "-i", str(synthetic_csv), "--unit", "degrees", "--B", "2", "--seed", "42", "--format", "json"]
    status, first = _run(argv)
    _, second = _run(argv)
    assert status == 0
    assert first == second
    report = json.loads(first)["report"]
    assert report["test"] == "likelihood_ratio"
    assert report["master_seed"] == 42
    assert len(report["replicates"]) == 2
    assert report["tuning"]["p_value_rule"] == "strict"


def test_emtest_prints_entropy_seed(synthetic_csv, monkeypatch):
    """Test that a seed drawn from entropy is shown so the run can be repeated."""
    monkeypatch.delenv("CIRCMODE_SEED", raising=False)
    status, text = _run(["emtest", "-i", str(synthetic_csv), "--unit", "degrees", "--B", "1"])
    assert status == 0
    assert "Seed drawn from entropy" in text
    assert "Excess-mass test" in text


def test_seed_from_environment(synthetic_csv, monkeypatch):
    """Test that $CIRCMODE_SEED is used when --seed is absent."""
    monkeypatch.setenv("CIRCMODE_SEED", "42")
    status, text = _run(["emtest", "-i", str(synthetic_csv), "--unit", "degrees", "--B", "1", "--format", "json"])
    assert status == 0
    assert json.loads(text)["report"]["master_seed"] == 42


def test_critbw_floor_hit(two_point_file):
    """Test the critical bandwidth command in the floor case."""
    status, text = _run(["critbw", "-i", str(two_point_file), "--k", "2", "--format", "json"])
    assert status == 0
    result = json.loads(text)["result"]
    assert result["floor_hit"] is True
    assert result["modes_below"] is None
    _, human = _run(["critbw", "-i", str(two_point_file), "--k", "2"])
    assert "floor hit" in human


def test_kde_curve_long_format(synthetic_csv):
    """Test the kde-curve CSV for several bandwidths."""
    argv = ["kde-curve", "-i", str(synthetic_csv), "--unit", "degrees", "--grid-size", "256"]
    argv += ["--h", "0.4", "--h", "0.25", "--h", "0.1", "--format", "csv"]
    status, text = _run(argv)
    assert status == 0
    frame = pd.read_csv(io.StringIO(text))
    assert list(frame.columns) == ["h", "x", "density"]
    assert len(frame) == 3 * 256
    assert (frame["density"] >= 0.0).all()
    for _, group in frame.groupby("h"):
        assert group["density"].sum() * 2 * math.pi / 256 == pytest.approx(1.0, abs=1e-3)


def test_simulate_csv():
    """Test a one-run study from the command line."""
    argv = ["simulate", "--models", "M1", "--sizes", "30", "--M", "1", "--B", "2", "--seed", "3"]
    status, text = _run(argv)
    assert status == 0
    lines = text.splitlines()
    assert lines[0] == "model,size,1%,5%,10%"
    assert lines[1].startswith("M1,30,")


def test_unusable_input_exits_with_two(tmp_path, two_point_file):
    """Test exit status 2 for missing files, ties and unknown models."""
    assert _run(["summarize", "-i", str(tmp_path / "absent.txt")])[0] == 2
    tied = tmp_path / "tied.txt"
    tied.write_text("1.0\n1.0\n2.0\n", encoding="utf-8")
    assert _run(["test", "-i", str(tied), "--B", "1", "--seed", "1"])[0] == 2
    assert _run(["simulate", "--models", "M99", "--M", "1", "--B", "1", "--seed", "1"])[0] == 2


def test_unreadable_rows_are_fatal_only_with_strict(tmp_path):
    """Test that unreadable rows are skipped by default and exit with two under --strict."""
    path = tmp_path / "mixed.txt"
    path.write_text("1.0\nabc\n2.0\n3.0\n", encoding="utf-8")
    status, text = _run(["summarize", "-i", str(path), "--format", "json"])
    assert status == 0
    assert json.loads(text)["summary"]["n"] == 3
    assert _run(["summarize", "-i", str(path), "--strict"])[0] == 2


def test_degenerate_sample_exits_with_one(two_point_file):
    """Test exit status 1 when the estimate cannot be smoothed to k modes."""
    status, text = _run(["critbw", "-i", str(two_point_file), "--k", "1"])
    assert status == 1
    assert text == ""
