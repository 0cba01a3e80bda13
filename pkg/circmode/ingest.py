# -*- coding: utf-8 -*-
"""Reading angular datasets into samples.

Two layouts are understood: plain text with one angle per line (``#`` starts a
comment) and delimited files with a header row. Angles are stored internally
in the compass convention (0 = north, increasing clockwise) on (0, 2π].
"""

import csv
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .circdist import TWO_PI, AngleSample, circular_mean
from .errors import IngestError

logger = logging.getLogger(__name__)

UNITS = ("radians", "degrees")
CONVENTIONS = ("compass", "math")
DELIMITERS = {"auto": None, ",": ",", "comma": ",", "\t": "\t", "tab": "\t"}
SUFFIX_DELIMITERS = {".csv": ",", ".tsv": "\t", ".tab": "\t"}


@dataclass(frozen=True)
class AngleFileSpec:
    """Where to read angles from and how to interpret them.

    Attributes:
        path: file to read.
        unit: "radians" or "degrees" (degrees must lie in [0, 360]).
        convention: "compass" (clockwise from north) or "math" (counterclockwise from east).
        column: column name or zero-based position in a delimited file; first column when omitted.
        delimiter: "auto", "," or tab. "auto" treats .csv/.tsv/.tab files and any spec
            naming a column as delimited and sniffs the separator.
    """

    path: Union[str, Path]
    unit: str = "radians"
    convention: str = "compass"
    column: Optional[Union[str, int]] = None
    delimiter: str = "auto"

    def __post_init__(self):
        if self.unit not in UNITS:
            raise IngestError(f"Unknown unit '{self.unit}'; expected one of {', '.join(UNITS)}")
        if self.convention not in CONVENTIONS:
            raise IngestError(f"Unknown convention '{self.convention}'; expected one of {', '.join(CONVENTIONS)}")
        if self.delimiter not in DELIMITERS:
            raise IngestError(f"Unknown delimiter '{self.delimiter}'; expected auto, ',' or tab")

    @property
    def is_delimited(self) -> bool:
        if self.delimiter != "auto" or self.column is not None:
            return True
        return Path(self.path).suffix.lower() in SUFFIX_DELIMITERS


@dataclass
class AngleReadResult:
    sample: Optional[AngleSample]
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class SampleSummary:  # pylint: disable=too-few-public-methods
    n: int
    mean_direction: Optional[float]
    resultant_length: float
    circular_variance: float

    @property
    def mean_defined(self) -> bool:
        return self.mean_direction is not None


class AngleTextParser:
    """Line parser for one-angle-per-line text.

    Problems are collected as ``L<line>: <message>`` strings instead of raised,
    so every bad row of a file is reported at once.
    """

    def __init__(self, unit: str = "radians"):
        self.unit = unit
        self.values: List[float] = []
        self.errors: List[str] = []

        self.COMMENT_RE = re.compile(r"#.*$")
        self.NUMBER_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")

    def parse_value(self, text: str, line_num: int) -> Optional[float]:
        """Check one cell and return its value, recording an error if it is unusable."""
        text = text.strip()
        if not self.NUMBER_RE.fullmatch(text):
            self.errors.append(f"L{line_num}: Cannot read '{text}' as an angle.")
            return None
        value = float(text)
        if not math.isfinite(value):
            self.errors.append(f"L{line_num}: Angle '{text}' is not finite.")
            return None
        if self.unit == "degrees" and not 0.0 <= value <= 360.0:
            self.errors.append(f"L{line_num}: Angle {text} is outside [0, 360] degrees.")
            return None
        return value

    def parse_line(self, line_text: str, line_num: int):
        line = self.COMMENT_RE.sub("", line_text).strip()
        if not line:
            return
        value = self.parse_value(line, line_num)
        if value is not None:
            self.values.append(value)

    def parse_text(self, text_content: str) -> Tuple[List[float], List[str]]:
        self.values = []
        self.errors = []
        for i, line_text in enumerate(text_content.splitlines()):
            self.parse_line(line_text, i + 1)
        return self.values, self.errors


def to_internal(values, unit: str = "radians", convention: str = "compass") -> np.ndarray:
    """Convert raw readings to compass radians on (0, 2π]."""
    angles = np.asarray(values, dtype=float)
    if unit == "degrees":
        angles = np.deg2rad(angles)
    if convention == "math":
        angles = math.pi / 2.0 - angles
    return TWO_PI - np.mod(-angles, TWO_PI)


def _read_delimited(spec: AngleFileSpec, parser: AngleTextParser) -> List[float]:
    sep = DELIMITERS[spec.delimiter] or SUFFIX_DELIMITERS.get(Path(spec.path).suffix.lower())
    try:
        frame = pd.read_csv(
            spec.path,
            sep=sep,
            engine="python",
            dtype=str,
            keep_default_na=False,
            comment="#",
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError, csv.Error) as exc:
        raise IngestError(f"Cannot read delimited file {spec.path}: {exc}") from exc
    if frame.shape[1] == 0:
        raise IngestError(f"Delimited file {spec.path} has no columns.")
    column = spec.column
    if column is None:
        name = frame.columns[0]
    elif isinstance(column, int) or str(column).isdigit():
        position = int(column)
        if position >= frame.shape[1]:
            raise IngestError(f"Column {position} requested but {spec.path} has {frame.shape[1]} column(s).")
        name = frame.columns[position]
    elif column in frame.columns:
        name = column
    else:
        raise IngestError(f"Column '{column}' not found in {spec.path}; columns are {', '.join(map(str, frame.columns))}")
    values = []
    for row_index, cell in enumerate(frame[name].tolist()):
        # header is line 1
        value = parser.parse_value(str(cell), row_index + 2)
        if value is not None:
            values.append(value)
    return values


def read_angle_file(spec: AngleFileSpec) -> AngleReadResult:
    """Parse a file, returning the sample with every row error and warning found."""
    path = Path(spec.path)
    if not path.is_file():
        raise IngestError(f"Angle file not found: {path}")
    parser = AngleTextParser(spec.unit)
    if spec.is_delimited:
        raw = _read_delimited(spec, parser)
    else:
        raw, _ = parser.parse_text(path.read_text(encoding="utf-8"))
    result = AngleReadResult(None, list(parser.errors))
    if not raw:
        return result
    result.sample = AngleSample(to_internal(raw, spec.unit, spec.convention))
    repeated = result.sample.duplicates()
    if repeated.size:
        result.warnings.append(
            f"{repeated.size} angle value(s) occur more than once (e.g. {repeated[0]:.12g} rad); "
            "the multimodality tests need distinct observations."
        )
    return result


def load_angles(spec: AngleFileSpec, strict: bool = False) -> AngleSample:
    """Read an angle file into a sample.

    Unreadable rows are logged as warnings with their line numbers and skipped;
    with ``strict`` any unreadable row aborts the load instead.
    """
    result = read_angle_file(spec)
    if result.errors:
        if strict:
            raise IngestError(f"{len(result.errors)} unreadable row(s) in {spec.path}:\n" + "\n".join(result.errors))
        for message in result.errors:
            logger.warning("%s: %s", spec.path, message)
    for message in result.warnings:
        logger.warning("%s: %s", spec.path, message)
    if result.sample is None:
        raise IngestError(f"No angles found in {spec.path}")
    return result.sample


def export_angles(sample: AngleSample, path: Union[str, Path]) -> Path:
    """Write the sample as compass radians, one per line, at full precision."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.writelines(f"{value!r}\n" for value in sample.angles.tolist())
    return path


def summarize(sample: AngleSample) -> SampleSummary:
    """Mean direction, mean resultant length R and circular variance 1 - R."""
    mean, resultant = circular_mean(sample.angles)
    return SampleSummary(sample.n, mean, resultant, 1.0 - resultant)
