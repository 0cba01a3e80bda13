# -*- coding: utf-8 -*-
"""Configuration for pytest."""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the root directory to Python path
root_dir = Path(__file__).parent.parent
sys.path.append(str(root_dir))

from circmode.circdist import AngleSample  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def synthetic_csv():
    """50 distinct compass directions in degrees, column ``direction_deg``."""
    return FIXTURES / "synthetic_directions.csv"


@pytest.fixture
def synthetic_sample(synthetic_csv):
    degrees = np.loadtxt(synthetic_csv, delimiter=",", skiprows=1, usecols=0)
    return AngleSample(np.deg2rad(degrees))


@pytest.fixture
def two_point_file(tmp_path):
    path = tmp_path / "two_points.txt"
    path.write_text(f"{math.pi / 2!r}\n{3 * math.pi / 2!r}\n", encoding="utf-8")
    return path


def random_sample(seed, n, spread=None):
    """Tie-free sample: uniform angles, or a two-cluster mixture when ``spread`` is given."""
    generator = np.random.default_rng(seed)
    if spread is None:
        return AngleSample(generator.uniform(0.0, 2 * math.pi, n))
    centres = generator.choice([math.pi / 2, 4.0], size=n)
    return AngleSample(centres + spread * generator.standard_normal(n))


@pytest.fixture
def make_sample():
    return random_sample
