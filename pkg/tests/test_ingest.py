# -*- coding: utf-8 -*-
"""Tests for reading, converting, exporting and summarizing angle files."""
import logging
import math

import numpy as np
import pytest

from circmode.circdist import TWO_PI, AngleSample
from circmode.errors import IngestError
from circmode.ingest import (
    AngleFileSpec,
    AngleTextParser,
    export_angles,
    load_angles,
    read_angle_file,
    summarize,
    to_internal,
)


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_single_radian_value(tmp_path):
    """Test that a single radian reading is kept as is."""
    sample = load_angles(AngleFileSpec(_write(tmp_path, "one.txt", "3.1415926536\n")))
    assert sample.n == 1
    assert sample.angles[0] == pytest.approx(math.pi, abs=1e-10)


def test_degree_values_are_converted(tmp_path):
    """Test degree conversion, with 0 degrees mapped to 2π."""
    sample = load_angles(AngleFileSpec(_write(tmp_path, "deg.txt", "90\n0\n"), unit="degrees"))
    np.testing.assert_allclose(sample.angles, [math.pi / 2, TWO_PI])


def test_math_convention_is_turned_into_compass():
    """Test that east-counterclockwise readings become north-clockwise ones."""
    np.testing.assert_allclose(to_internal([0.0], "radians", "math"), [math.pi / 2])
    np.testing.assert_allclose(to_internal([90.0], "degrees", "math"), [TWO_PI])
    np.testing.assert_allclose(to_internal([180.0], "degrees", "math"), [3 * math.pi / 2])


def test_comments_and_blank_lines_are_skipped(tmp_path):
    """Test the plain-text layout with comments."""
    text = "# heading\n1.0  # first\n\n2.0\n"
    sample = load_angles(AngleFileSpec(_write(tmp_path, "c.txt", text)))
    np.testing.assert_allclose(sample.angles, [1.0, 2.0])


def test_bad_rows_are_reported_with_line_numbers(tmp_path):
    """Test that a strict load reports every unreadable row with its line number."""
    path = _write(tmp_path, "bad.txt", "1.0\nabc\n400\n2.0\n")
    result = read_angle_file(AngleFileSpec(path, unit="degrees"))
    assert result.errors == [
        "L2: Cannot read 'abc' as an angle.",
        "L3: Angle 400 is outside [0, 360] degrees.",
    ]
    with pytest.raises(IngestError) as info:
        load_angles(AngleFileSpec(path, unit="degrees"), strict=True)
    assert "L2" in str(info.value)


def test_bad_rows_are_skipped_with_warnings(tmp_path, caplog):
    """Test that the default load keeps readable rows and warns about the rest."""
    path = _write(tmp_path, "bad.txt", "1.0\nabc\n400\n2.0\n")
    with caplog.at_level(logging.WARNING, logger="circmode"):
        sample = load_angles(AngleFileSpec(path, unit="degrees"))
    assert sample.n == 2
    assert "L2: Cannot read 'abc' as an angle." in caplog.text
    assert "L3: Angle 400 is outside [0, 360] degrees." in caplog.text


def test_parser_collects_errors_per_line():
    """Test the text parser directly."""
    parser = AngleTextParser("radians")
    values, errors = parser.parse_text("0.5\n1e-3\nnan\n-0.25\n")
    assert values == [0.5, 1e-3, -0.25]
    assert errors == ["L3: Cannot read 'nan' as an angle."]


def test_missing_and_empty_files(tmp_path):
    """Test that absent files and files without angles are refused."""
    with pytest.raises(IngestError):
        load_angles(AngleFileSpec(tmp_path / "absent.txt"))
    with pytest.raises(IngestError) as info:
        load_angles(AngleFileSpec(_write(tmp_path, "empty.txt", "# nothing\n")))
    assert "No angles" in str(info.value)


def test_duplicates_are_warned_about(tmp_path):
    """Test that repeated values load with a warning."""
    result = read_angle_file(AngleFileSpec(_write(tmp_path, "dup.txt", "1.0\n1.0\n2.0\n")))
    assert result.sample.has_ties
    assert len(result.warnings) == 1
    assert "occur more than once" in result.warnings[0]


def test_unknown_options_are_refused(tmp_path):
    """Test validation of unit, convention and delimiter."""
    path = tmp_path / "x.txt"
    with pytest.raises(IngestError):
        AngleFileSpec(path, unit="gradians")
    with pytest.raises(IngestError):
        AngleFileSpec(path, convention="nautical")
    with pytest.raises(IngestError):
        AngleFileSpec(path, delimiter=";")


def test_csv_column_by_name_and_position(synthetic_csv, synthetic_sample):
    """Test reading a delimited file by column name, position and default."""
    by_name = load_angles(AngleFileSpec(synthetic_csv, unit="degrees", column="direction_deg"))
    by_position = load_angles(AngleFileSpec(synthetic_csv, unit="degrees", column=0))
    default = load_angles(AngleFileSpec(synthetic_csv, unit="degrees"))
    assert by_name.n == 50
    np.testing.assert_allclose(by_name.angles, synthetic_sample.angles)
    np.testing.assert_array_equal(by_name.angles, by_position.angles)
    np.testing.assert_array_equal(by_name.angles, default.angles)


def test_csv_unknown_column(synthetic_csv):
    """Test the error for a column that is not in the header."""
    with pytest.raises(IngestError) as info:
        load_angles(AngleFileSpec(synthetic_csv, unit="degrees", column="bearing"))
    assert "direction_deg" in str(info.value)
    with pytest.raises(IngestError):
        load_angles(AngleFileSpec(synthetic_csv, unit="degrees", column=7))


def test_csv_bad_cell_line_number(tmp_path):
    """Test that data rows of a delimited file are numbered from line 2."""
    path = _write(tmp_path, "bad.csv", "angle,tag\n10,a\nx,b\n")
    result = read_angle_file(AngleFileSpec(path, unit="degrees"))
    assert result.errors == ["L3: Cannot read 'x' as an angle."]


def test_export_then_load(tmp_path, make_sample):
    """Test that exported samples load back unchanged."""
    sample = make_sample(61, 25)
    path = export_angles(sample, tmp_path / "out.txt")
    np.testing.assert_allclose(load_angles(AngleFileSpec(path)).angles, sample.angles, rtol=0, atol=1e-12)


def test_summary_of_single_direction():
    """Test the summary of one observation."""
    summary = summarize(AngleSample.from_values([math.pi / 2]))
    assert summary.n == 1
    assert summary.mean_direction == pytest.approx(math.pi / 2)
    assert summary.resultant_length == pytest.approx(1.0)
    assert summary.circular_variance == pytest.approx(0.0, abs=1e-15)


def test_summary_of_cancelling_directions():
    """Test that opposite directions have no mean direction."""
    summary = summarize(AngleSample.from_values([TWO_PI, math.pi]))
    assert not summary.mean_defined
    assert summary.circular_variance == pytest.approx(1.0)


def test_summary_rotates_with_the_data(make_sample):
    """Test that the mean direction moves with a rotation and R does not change."""
    sample = make_sample(62, 40, spread=0.4)
    base = summarize(sample)
    moved = summarize(sample.rotated(0.8))
    gap = (moved.mean_direction - base.mean_direction - 0.8) % TWO_PI
    assert min(gap, TWO_PI - gap) < 1e-10
    assert moved.resultant_length == pytest.approx(base.resultant_length, rel=1e-12)
